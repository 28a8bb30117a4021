"""Real-valued genetic algorithm over trajectory-plan parameters.

An individual is the plan's parameter table flattened to one real vector
(acceleration, body_dir, ball_dir per node, in node order).  Each generation
draws a mating pool with one of four selection schemes, mates random pool
pairs by weighted-mean crossover, perturbs every offspring with bounded
Gaussian mutation, and keeps the best ``population_size`` of parents plus
offspring — so the best fitness never decreases.

Fitness is analytic: each node is scored from its direction parameters and
its bearing/distance to the obstacle, with obstacle-proximity raising the
weight of turning away; the plan score is the sum over nodes.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import EmptyPopulation, LengthMismatch, ValidationFailed
from .geometry import Point2, wrap_angle
from .plan import (
    NodeParams,
    PlanLimits,
    TrajectoryPlan,
    plan_to_document,
    with_node_params,
)

SELECTION_METHODS = ("roulette", "rank", "sus", "tournament")
#: Linear-ranking weights run from RANK_PRESSURE_LOW (worst) to
#: RANK_PRESSURE_HIGH (best).
RANK_PRESSURE_LOW = 0.5
RANK_PRESSURE_HIGH = 1.5
PARAMS_PER_NODE = 3

GA_REPORT_FORMAT = "dribbleforge-ga-report/1"


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 40
    generation_count: int = 1000
    crossover_probability: float = 0.8
    parent_selection_probability: float = 0.6
    selection_method: str = "roulette"
    mutation_coefficient: float = 4.0
    initial_mutation_coefficient: float = 4.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.generation_count < 0:
            raise ValueError("generation_count must be non-negative")
        for name in ("crossover_probability", "parent_selection_probability"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.selection_method not in SELECTION_METHODS:
            raise ValueError(
                f"selection_method must be one of {SELECTION_METHODS}"
            )
        for name in ("mutation_coefficient", "initial_mutation_coefficient"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class FitnessConfig:
    alpha_user: float = 0.66
    beta_user: float = 0.33
    rho: float = math.pi

    def __post_init__(self):
        if self.alpha_user < 0 or self.beta_user < 0:
            raise ValueError("alpha_user and beta_user must be non-negative")
        if not self.rho > 0:
            raise ValueError("rho must be positive")


@dataclass
class Individual:
    """Flat parameter vector plus a lazily filled fitness cache."""

    params: tuple[float, ...]
    cached_fitness: float | None = None


@dataclass(frozen=True)
class NodeContext:
    """Everything the per-node fitness needs, in the plan frame."""

    body_dir: float
    ball_dir: float
    body_rel_obs: float
    ball_rel_obs: float
    dist: float


@dataclass(frozen=True)
class ParamSpace:
    """Per-entry bounds and spans for a plan's flattened parameter vector."""

    lows: tuple[float, ...]
    highs: tuple[float, ...]
    spans: tuple[float, ...]

    @classmethod
    def for_plan(cls, limits: PlanLimits, node_count: int) -> "ParamSpace":
        lo_acc, hi_acc = 0.0, limits.max_acceleration
        lo_body, hi_body = limits.body_dir_range
        lo_ball, hi_ball = limits.ball_dir_range
        lows = (lo_acc, lo_body, lo_ball) * node_count
        highs = (hi_acc, hi_body, hi_ball) * node_count
        spans = tuple(h - l for l, h in zip(lows, highs))
        return cls(lows=lows, highs=highs, spans=spans)

    def clamp(self, values: Sequence[float]) -> tuple[float, ...]:
        # float() also demotes numpy scalars so params stay plain floats
        return tuple(
            float(min(max(v, lo), hi))
            for v, lo, hi in zip(values, self.lows, self.highs)
        )


@dataclass
class EvolutionResult:
    best_plan: TrajectoryPlan
    #: (best, mean, worst) per generation; entry 0 is the initial population.
    history: list[tuple[float, float, float]]
    rng_seed: int
    seed_fitness: float
    best_fitness: float
    cancelled: bool = False


# --------------------------------------------------------------------------
# Fitness

def coeff_alpha_beta(cfg: FitnessConfig, dist: float) -> tuple[float, float]:
    """Distance-dependent weights: large near the obstacle, tapering to a
    tenth of the user gain far away."""
    scale = 0.1 + 50.0 * math.exp(-2.0 * dist)
    return cfg.alpha_user * scale, cfg.beta_user * scale


def node_context(position: Point2, params: NodeParams) -> NodeContext:
    """Build the fitness inputs for one node.

    This is the single place fixing the frame convention: the obstacle sits
    at the plan origin, ``body_rel_obs`` is the bearing from the node to the
    obstacle, and ``ball_rel_obs`` is that bearing minus the ball direction,
    wrapped to (−π, π].
    """
    body_rel_obs = math.atan2(-position.y, -position.x)
    return NodeContext(
        body_dir=params.body_dir,
        ball_dir=params.ball_dir,
        body_rel_obs=body_rel_obs,
        ball_rel_obs=wrap_angle(body_rel_obs - params.ball_dir),
        dist=math.hypot(position.x, position.y),
    )


def node_fitness(ctx: NodeContext, cfg: FitnessConfig) -> float:
    """Score one node; always positive.

    The exponent rewards a large body turn (weighted by obstacle
    proximity), penalizes facing the obstacle, penalizes ball-direction
    magnitude, and penalizes the ball pointing anywhere but away from the
    obstacle.
    """
    alpha, beta = coeff_alpha_beta(cfg, ctx.dist)
    desired = (alpha * ctx.body_dir ** 2
               - (ctx.body_dir - ctx.body_rel_obs) ** 2
               - beta * ctx.ball_dir ** 2
               - (ctx.ball_rel_obs - math.pi) ** 2)
    return math.exp(desired / (cfg.rho * cfg.rho))


def plan_fitness(individual: Individual, layout: Sequence[Point2],
                 cfg: FitnessConfig) -> float:
    params = individual.params
    if len(params) != PARAMS_PER_NODE * len(layout):
        raise LengthMismatch(
            f"individual has {len(params)} entries for {len(layout)} nodes"
        )
    total = 0.0
    for i, pos in enumerate(layout):
        acc, body, ball = params[PARAMS_PER_NODE * i:PARAMS_PER_NODE * (i + 1)]
        ctx = node_context(pos, NodeParams(acc, body, ball))
        total += node_fitness(ctx, cfg)
    return total


# --------------------------------------------------------------------------
# Encoding

def encode_plan(plan: TrajectoryPlan) -> Individual:
    flat: list[float] = []
    for node in plan.nodes:
        flat.extend((node.params.acceleration, node.params.body_dir,
                     node.params.ball_dir))
    return Individual(params=tuple(flat))


def decode_onto(plan: TrajectoryPlan, individual: Individual) -> TrajectoryPlan:
    """Apply an individual's parameters to the plan's layout."""
    params = individual.params
    if len(params) != PARAMS_PER_NODE * len(plan.nodes):
        raise LengthMismatch(
            f"individual has {len(params)} entries for {len(plan.nodes)} nodes"
        )
    space = ParamSpace.for_plan(plan.limits, len(plan.nodes))
    clamped = space.clamp(params)
    triples = [
        NodeParams(*clamped[PARAMS_PER_NODE * i:PARAMS_PER_NODE * (i + 1)])
        for i in range(len(plan.nodes))
    ]
    return with_node_params(plan, triples)


# --------------------------------------------------------------------------
# Operators

def mutate(ind: Individual, space: ParamSpace, coeff: float,
           rng: np.random.Generator) -> Individual:
    """Perturb every entry by span·GRN·coeff/100 with GRN a standard normal
    clipped to [−1, 1], then clamp into bounds — so each entry moves at most
    coeff percent of its span."""
    grn = np.clip(rng.standard_normal(len(ind.params)), -1.0, 1.0)
    moved = [
        v + s * g * coeff / 100.0
        for v, s, g in zip(ind.params, space.spans, grn)
    ]
    return Individual(params=space.clamp(moved))


def crossover_pair(a: Individual, b: Individual,
                   rng: np.random.Generator) -> tuple[Individual, Individual]:
    """Weighted-mean mating: one weight pair drawn in [0.8, 1.2] is used for
    every entry, so each child is a convex mix of its parents."""
    if len(a.params) != len(b.params):
        raise LengthMismatch("parents have different lengths")
    wi = float(rng.uniform(0.8, 1.2))
    wj = float(rng.uniform(0.8, 1.2))
    total = wi + wj
    child1 = tuple((wi * ak + wj * bk) / total
                   for ak, bk in zip(a.params, b.params))
    child2 = tuple((wj * ak + wi * bk) / total
                   for ak, bk in zip(a.params, b.params))
    return Individual(params=child1), Individual(params=child2)


def init_population(seed: Individual, cfg: GaConfig, space: ParamSpace,
                    rng: np.random.Generator | None = None) -> list[Individual]:
    """Population of ``population_size``: the unmutated seed at index 0,
    then mutants of it at ``initial_mutation_coefficient`` strength."""
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    pop = [Individual(params=seed.params)]
    for _ in range(cfg.population_size - 1):
        pop.append(mutate(seed, space, cfg.initial_mutation_coefficient, rng))
    return pop


def select_parents(pop: Sequence[Individual], fitnesses: Sequence[float],
                   cfg: GaConfig, count: int,
                   rng: np.random.Generator) -> list[Individual]:
    """Draw ``count`` parents (with replacement) into the mating pool."""
    if not pop:
        raise EmptyPopulation("cannot select from an empty population")
    if len(pop) != len(fitnesses):
        raise LengthMismatch("one fitness per individual required")
    n = len(pop)
    method = cfg.selection_method

    if method == "tournament":
        picks = []
        for _ in range(count):
            i, j = rng.integers(0, n, size=2)
            if (fitnesses[i], -i) >= (fitnesses[j], -j):
                better, worse = i, j
            else:
                better, worse = j, i
            win = rng.random() < cfg.parent_selection_probability
            picks.append(better if win else worse)
        return [pop[i] for i in picks]

    if method == "roulette":
        weights = np.asarray(fitnesses, dtype=float)
    elif method == "rank":
        order = sorted(range(n), key=lambda i: (fitnesses[i], -i))
        weights = np.empty(n)
        for r, i in enumerate(order):
            if n == 1:
                weights[i] = 1.0
            else:
                weights[i] = (RANK_PRESSURE_LOW
                              + (RANK_PRESSURE_HIGH - RANK_PRESSURE_LOW)
                              * r / (n - 1))
    elif method == "sus":
        return _sus(pop, fitnesses, count, rng)
    else:  # pragma: no cover - rejected by GaConfig validation
        raise ValueError(f"unknown selection method {method!r}")

    probs = weights / weights.sum()
    picks = rng.choice(n, size=count, replace=True, p=probs)
    return [pop[i] for i in picks]


def _sus(pop: Sequence[Individual], fitnesses: Sequence[float], count: int,
         rng: np.random.Generator) -> list[Individual]:
    """Stochastic universal sampling: one spin, ``count`` equally spaced
    pointers over the fitness wheel."""
    total = float(sum(fitnesses))
    step = total / count
    start = rng.uniform(0.0, step)
    picks = []
    cumulative = 0.0
    index = 0
    for k in range(count):
        pointer = start + k * step
        while cumulative + fitnesses[index] < pointer and index < len(pop) - 1:
            cumulative += fitnesses[index]
            index += 1
        picks.append(pop[index])
    return picks


def survivor_select(pop: Sequence[Individual], fitnesses: Sequence[float],
                    n: int) -> list[Individual]:
    """Keep the ``n`` fittest, ties to the lower index, sorted descending."""
    if not pop:
        raise EmptyPopulation("cannot select survivors from nothing")
    if len(pop) != len(fitnesses):
        raise LengthMismatch("one fitness per individual required")
    order = sorted(range(len(pop)), key=lambda i: (-fitnesses[i], i))
    return [pop[i] for i in order[:n]]


# --------------------------------------------------------------------------
# Generation loop

def _fitness_of(ind: Individual, layout: Sequence[Point2],
                cfg: FitnessConfig) -> float:
    if ind.cached_fitness is None:
        ind.cached_fitness = plan_fitness(ind, layout, cfg)
    return ind.cached_fitness


def _mating_pool_size(cfg: GaConfig) -> int:
    if cfg.selection_method == "tournament":
        return cfg.population_size
    return max(2, math.ceil(cfg.parent_selection_probability
                            * cfg.population_size))


def evolve(seed_plan: TrajectoryPlan, ga: GaConfig, fit: FitnessConfig,
           on_generation: Callable[[int, float, float, float], None] | None = None,
           cancel=None) -> EvolutionResult:
    """Run the full generation loop from the seed plan.

    ``on_generation(generation, best, mean, worst)`` fires once for the
    initial population (generation 0) and once per completed generation.
    ``cancel`` may be anything with ``is_set()``; when it trips, the loop
    stops at the next generation boundary and returns the progress so far
    with ``cancelled=True``.  Deterministic for a fixed ``rng_seed``: one
    RNG stream drives initialization, selection, mating and mutation.
    """
    rng = np.random.default_rng(ga.rng_seed)
    space = ParamSpace.for_plan(seed_plan.limits, len(seed_plan.nodes))
    layout = seed_plan.positions
    seed_ind = encode_plan(seed_plan)
    seed_fitness = plan_fitness(seed_ind, layout, fit)

    pop = init_population(seed_ind, ga, space, rng)
    fits = [_fitness_of(ind, layout, fit) for ind in pop]
    history = [_stats(fits)]
    if on_generation is not None:
        on_generation(0, *history[0])

    cancelled = False
    for gen in range(1, ga.generation_count + 1):
        if cancel is not None and cancel.is_set():
            cancelled = True
            break
        pool = select_parents(pop, fits, ga, _mating_pool_size(ga), rng)
        offspring: list[Individual] = []
        while len(offspring) < ga.population_size:
            i, j = rng.integers(0, len(pool), size=2)
            a, b = pool[i], pool[j]
            if rng.random() < ga.crossover_probability:
                c1, c2 = crossover_pair(a, b, rng)
            else:
                c1, c2 = Individual(a.params), Individual(b.params)
            offspring.append(c1)
            if len(offspring) < ga.population_size:
                offspring.append(c2)
        offspring = [mutate(c, space, ga.mutation_coefficient, rng)
                     for c in offspring]

        combined = list(pop) + offspring
        combined_fits = fits + [_fitness_of(c, layout, fit)
                                for c in offspring]
        pop = survivor_select(combined, combined_fits, ga.population_size)
        fits = [ind.cached_fitness for ind in pop]  # survivors are cached
        history.append(_stats(fits))
        if on_generation is not None:
            on_generation(gen, *history[-1])

    best = pop[0]  # survivor_select sorts descending
    return EvolutionResult(
        best_plan=decode_onto(seed_plan, best),
        history=history,
        rng_seed=ga.rng_seed,
        seed_fitness=seed_fitness,
        best_fitness=best.cached_fitness,
        cancelled=cancelled,
    )


def _stats(fits: Sequence[float]) -> tuple[float, float, float]:
    return (max(fits), sum(fits) / len(fits), min(fits))


# --------------------------------------------------------------------------
# Config documents and run reports

_GA_FIELDS = {
    "population_size": int,
    "generation_count": int,
    "crossover_probability": float,
    "parent_selection_probability": float,
    "selection_method": str,
    "mutation_coefficient": float,
    "initial_mutation_coefficient": float,
    "rng_seed": int,
}

_FITNESS_FIELDS = {"alpha_user": float, "beta_user": float, "rho": float}


def _config_from_document(doc: dict, fields: dict, factory, label: str):
    if not isinstance(doc, dict):
        raise ValidationFailed([{"node": None, "field": None,
                                 "message": f"{label} must be an object"}])
    problems = []
    kwargs = {}
    for key, value in doc.items():
        if key not in fields:
            problems.append({"node": None, "field": key,
                             "message": f"unknown {label} field {key!r}"})
            continue
        want = fields[key]
        if want is str:
            if not isinstance(value, str):
                problems.append({"node": None, "field": key,
                                 "message": f"{key} must be a string"})
                continue
        elif want is int:
            if not isinstance(value, int) or isinstance(value, bool):
                problems.append({"node": None, "field": key,
                                 "message": f"{key} must be an integer"})
                continue
        else:
            if (not isinstance(value, (int, float)) or isinstance(value, bool)
                    or not math.isfinite(value)):
                problems.append({"node": None, "field": key,
                                 "message": f"{key} must be a finite number"})
                continue
            value = float(value)
        kwargs[key] = value
    if problems:
        raise ValidationFailed(problems)
    try:
        return factory(**kwargs)
    except ValueError as exc:
        raise ValidationFailed([{"node": None, "field": None,
                                 "message": str(exc)}]) from exc


def ga_config_from_document(doc: dict) -> GaConfig:
    return _config_from_document(doc, _GA_FIELDS, GaConfig, "ga config")


def fitness_config_from_document(doc: dict) -> FitnessConfig:
    return _config_from_document(doc, _FITNESS_FIELDS, FitnessConfig,
                                 "fitness config")


def ga_config_to_document(cfg: GaConfig) -> dict:
    return {name: getattr(cfg, name) for name in _GA_FIELDS}


def fitness_config_to_document(cfg: FitnessConfig) -> dict:
    return {name: getattr(cfg, name) for name in _FITNESS_FIELDS}


def evolution_report(result: EvolutionResult, ga: GaConfig,
                     fit: FitnessConfig) -> dict:
    return {
        "format": GA_REPORT_FORMAT,
        "ga": ga_config_to_document(ga),
        "fitness": fitness_config_to_document(fit),
        "seed_fitness": result.seed_fitness,
        "best_fitness": result.best_fitness,
        "cancelled": result.cancelled,
        "history": [
            {"generation": g, "best": b, "mean": m, "worst": w}
            for g, (b, m, w) in enumerate(result.history)
        ],
        "best_plan": plan_to_document(result.best_plan),
    }


def write_history_csv(history: Iterable[tuple[float, float, float]],
                      path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "best", "mean", "worst"])
        for g, (best, mean, worst) in enumerate(history):
            writer.writerow([g, repr(best), repr(mean), repr(worst)])

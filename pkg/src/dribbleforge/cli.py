"""Command-line entry points."""

from __future__ import annotations

import functools
import json
from pathlib import Path

import click

from .atlas import dribble_action, load_atlas
from .errors import DribbleForgeError, ValidationFailed
from .evolution import (
    FitnessConfig,
    GaConfig,
    evolution_report,
    evolve,
    fitness_config_from_document,
    ga_config_from_document,
    write_history_csv,
)
from .fixtures import seed_plan
from .geometry import Point2, wrap_angle
from .plan import load_plan, save_plan
from .simulation import (
    SimConfig,
    simulate,
    trace_metrics,
    write_field_csv,
    write_trace_csv,
)


def _friendly_errors(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except ValidationFailed as exc:
            lines = [
                f"node={d['node']} field={d['field']}: {d['message']}"
                for d in exc.details
            ]
            raise click.ClickException("invalid document\n" + "\n".join(lines))
        except DribbleForgeError as exc:
            raise click.ClickException(str(exc))
    return wrapper


def _parse_pair(text: str, label: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise click.ClickException(f"{label} must look like 'x,y', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise click.ClickException(f"{label} must be numeric, got {text!r}")


def _load_json(path: str, label: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"{label}: invalid JSON: {exc}")


@click.group()
def main():
    """Design, evolve and replay obstacle-relative dribbling plans."""


@main.command()
@click.option("--plan", "plan_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Seed plan document (JSON).")
@click.option("--ga", "ga_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="GA config JSON (defaults if omitted).")
@click.option("--fitness", "fitness_path",
              type=click.Path(exists=True, dir_okay=False), default=None,
              help="Fitness config JSON (defaults if omitted).")
@click.option("--out", "out_path", type=click.Path(dir_okay=False),
              default=None, help="Write the run report JSON here.")
@click.option("--history-csv", "history_csv_path",
              type=click.Path(dir_okay=False), default=None,
              help="Write generation,best,mean,worst CSV here.")
@click.option("--quiet", is_flag=True, help="No progress output.")
@_friendly_errors
def optimize(plan_path, ga_path, fitness_path, out_path, history_csv_path,
             quiet):
    """Evolve a plan's node parameters and report the run."""
    plan = load_plan(plan_path)
    ga = (ga_config_from_document(_load_json(ga_path, "--ga"))
          if ga_path else GaConfig())
    fit = (fitness_config_from_document(_load_json(fitness_path, "--fitness"))
           if fitness_path else FitnessConfig())

    stride = max(1, ga.generation_count // 10)

    def progress(gen, best, mean, worst):
        if not quiet and gen % stride == 0:
            click.echo(f"generation {gen}: best={best:.4f} mean={mean:.4f} "
                       f"worst={worst:.4f}")

    result = evolve(plan, ga, fit, on_generation=progress)
    report = evolution_report(result, ga, fit)
    if out_path:
        Path(out_path).write_text(json.dumps(report, indent=2) + "\n",
                                  encoding="utf-8")
    if history_csv_path:
        write_history_csv(result.history, history_csv_path)
    if not quiet:
        click.echo(f"seed fitness {result.seed_fitness:.4f} -> "
                   f"best {result.best_fitness:.4f}")


@main.command(name="simulate")
@click.option("--plan", "plan_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--start", default="-12,0", show_default=True,
              help="Start position 'x,y' in the plan frame.")
@click.option("--v0", default="4,0", show_default=True,
              help="Initial velocity 'vx,vy' in m/s.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False),
              default=None, help="Write the trace CSV here.")
@click.option("--max-steps", default=300, show_default=True, type=int)
@_friendly_errors
def simulate_cmd(plan_path, start, v0, out_path, max_steps):
    """Roll the agent through a plan and summarize the trace."""
    plan = load_plan(plan_path)
    start_xy = _parse_pair(start, "--start")
    v0_xy = _parse_pair(v0, "--v0")
    cfg = SimConfig(max_steps=max_steps)
    trace = simulate(plan, Point2(*start_xy), v0_xy, cfg)
    metrics = trace_metrics(trace, Point2(0.0, 0.0))
    if out_path:
        write_trace_csv(trace, out_path)
    click.echo(f"termination: {trace.termination.value}")
    if metrics.finish_time is not None:
        click.echo(f"finish time: {metrics.finish_time:.1f} s")
    click.echo(f"min obstacle distance: {metrics.min_obstacle_distance:.3f} m "
               f"(kickable radius {cfg.kickable_radius})")
    click.echo(f"path length: {metrics.path_length:.3f} m")
    if metrics.mean_speed_before is not None:
        click.echo(f"mean speed before obstacle: "
                   f"{metrics.mean_speed_before:.3f} m/s")
    if metrics.mean_speed_after is not None:
        click.echo(f"mean speed after obstacle: "
                   f"{metrics.mean_speed_after:.3f} m/s")


@main.command(name="field-dump")
@click.option("--atlas", "atlas_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--grid", default="40x30", show_default=True,
              help="Sample grid 'NXxNY'.")
@click.option("--obstacle", default=None,
              help="World obstacle position 'x,y' (default: first anchor).")
@click.option("--out", "out_path", required=True,
              type=click.Path(dir_okay=False))
@_friendly_errors
def field_dump(atlas_path, grid, obstacle, out_path):
    """Sample the world-frame action field around an obstacle as CSV.

    body_dir is written as a world bearing (plan value plus frame
    rotation); the speed column is left empty, as no run is simulated.
    """
    atlas = load_atlas(atlas_path)
    try:
        nx_text, ny_text = grid.lower().split("x")
        nx, ny = int(nx_text), int(ny_text)
    except ValueError:
        raise click.ClickException(f"--grid must look like '40x30', got {grid!r}")
    if nx < 1 or ny < 1:
        raise click.ClickException("--grid must be at least 1x1")
    if obstacle is not None:
        obs = Point2(*_parse_pair(obstacle, "--obstacle"))
    else:
        obs = atlas.anchors[0].obstacle_position

    reach = max(
        max(abs(p.x), abs(p.y))
        for p in atlas.anchors[0].plan.positions
    )
    x_min, y_min = obs.x - reach, obs.y - reach
    dx, dy = 2 * reach / nx, 2 * reach / ny
    rows = []
    for j in range(ny):
        for i in range(nx):
            p = Point2(x_min + (i + 0.5) * dx, y_min + (j + 0.5) * dy)
            action = dribble_action(atlas, p, obs)
            rows.append({
                "x": p.x,
                "y": p.y,
                "accel": action.params.acceleration,
                "body_dir": wrap_angle(action.params.body_dir
                                       + action.frame_rotation),
                "speed": None,
            })
    write_field_csv(rows, out_path)
    click.echo(f"wrote {len(rows)} samples to {out_path}")


@main.command()
@click.option("--plan", "plan_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
def validate(plan_path):
    """Check a plan document; exit nonzero with per-node diagnostics."""
    try:
        plan = load_plan(plan_path)
    except ValidationFailed as exc:
        for d in exc.details:
            click.echo(f"invalid: node={d['node']} field={d['field']}: "
                       f"{d['message']}", err=True)
        raise SystemExit(1)
    except DribbleForgeError as exc:
        click.echo(f"invalid: {exc}", err=True)
        raise SystemExit(1)
    click.echo(f"OK: {len(plan.nodes)} nodes, "
               f"{len(plan.triangulation.triangles)} triangles")


@main.command()
@click.option("--port", default=8700, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static", "static_dir",
              type=click.Path(exists=True, file_okay=False), default=None,
              help="Editor asset directory to serve at /.")
@click.option("--plan", "plan_path",
              type=click.Path(exists=True, dir_okay=False), default=None,
              help="Initial workspace plan (default: bundled seed).")
@_friendly_errors
def serve(port, host, static_dir, plan_path):
    """Run the editor backend."""
    import uvicorn

    from .service import create_app

    initial = load_plan(plan_path) if plan_path else seed_plan()
    app = create_app(initial_plan=initial, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()

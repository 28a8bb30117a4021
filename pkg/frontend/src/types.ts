// Document shapes mirrored from the backend's JSON contracts.  The editor
// never invents fields: what the server sends is what the state holds.

export interface PlanNodeDoc {
  x: number;
  y: number;
  acceleration: number;
  body_dir: number;
  ball_dir: number;
}

export interface PlanLimitsDoc {
  max_acceleration: number;
  body_dir_range: [number, number];
  ball_dir_range: [number, number];
}

export interface PlanDoc {
  format: string;
  limits: PlanLimitsDoc;
  nodes: PlanNodeDoc[];
}

export interface TriangulationDoc {
  triangles: [number, number, number][];
}

export interface GaForm {
  population_size: number;
  generation_count: number;
  crossover_probability: number;
  parent_selection_probability: number;
  selection_method: "roulette" | "rank" | "sus" | "tournament";
  mutation_coefficient: number;
  initial_mutation_coefficient: number;
  rng_seed: number;
}

export interface FitnessForm {
  alpha_user: number;
  beta_user: number;
  rho: number;
}

export interface GenerationEvent {
  generation: number;
  best: number;
  mean: number;
  worst: number;
}

export type JobStatus = "pending" | "running" | "done" | "cancelled" | "failed";

export interface JobDoc {
  id: string;
  status: JobStatus;
  generations_completed: number;
  history: GenerationEvent[];
  result: { best_plan: PlanDoc } | null;
  error: string | null;
}

export interface TraceStateDoc {
  t: number;
  x: number;
  y: number;
  vx: number;
  vy: number;
}

export interface TraceMetricsDoc {
  min_obstacle_distance: number;
  path_length: number;
  finish_time: number | null;
  mean_speed_before: number | null;
  mean_speed_after: number | null;
  fallback_used: boolean;
}

export interface TraceDoc {
  states: TraceStateDoc[];
  commands: { acceleration: number; body_dir: number; ball_dir: number }[];
  termination: "finished" | "step_limit";
  fallback_used: boolean;
  metrics?: TraceMetricsDoc;
}

export interface ValidationDetail {
  node: number | null;
  field: string | null;
  message: string;
}

// Server defaults for the optimizer form (same values the backend assumes
// when a field is omitted).
export const GA_FORM_DEFAULTS: GaForm = {
  population_size: 40,
  generation_count: 1000,
  crossover_probability: 0.8,
  parent_selection_probability: 0.6,
  selection_method: "roulette",
  mutation_coefficient: 4,
  initial_mutation_coefficient: 4,
  rng_seed: 0,
};

export const FITNESS_FORM_DEFAULTS: FitnessForm = {
  alpha_user: 0.66,
  beta_user: 0.33,
  rho: Math.PI,
};

// Thin client over the backend's HTTP/JSON surface.  fetch and EventSource
// are injectable so tests can run without a server or a browser.

import type {
  FitnessForm,
  GaForm,
  GenerationEvent,
  JobDoc,
  JobStatus,
  PlanDoc,
  TraceDoc,
  TriangulationDoc,
  ValidationDetail,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  details: ValidationDetail[];

  constructor(status: number, details: ValidationDetail[]) {
    super(details.map((d) => d.message).join("; ") || `HTTP ${status}`);
    this.name = "ApiError";
    this.status = status;
    this.details = details;
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface EventSourceLike {
  addEventListener(type: string, handler: (ev: MessageEvent) => void): void;
  close(): void;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

async function unwrap<T>(resp: Response): Promise<T> {
  if (resp.ok) {
    return (await resp.json()) as T;
  }
  let details: ValidationDetail[] = [];
  try {
    const body = await resp.json();
    if (Array.isArray(body?.detail)) {
      details = body.detail;
    } else if (typeof body?.detail === "string") {
      details = [{ node: null, field: null, message: body.detail }];
    }
  } catch {
    // non-JSON error body; fall through with the bare status
  }
  throw new ApiError(resp.status, details);
}

export class ApiClient {
  private fetchFn: FetchLike;
  private eventSourceFactory: EventSourceFactory;
  readonly base: string;

  constructor(opts?: {
    base?: string;
    fetchFn?: FetchLike;
    eventSourceFactory?: EventSourceFactory;
  }) {
    this.base = opts?.base ?? "";
    this.fetchFn = opts?.fetchFn ?? ((url, init) => fetch(url, init));
    this.eventSourceFactory =
      opts?.eventSourceFactory ??
      ((url) => new EventSource(url) as unknown as EventSourceLike);
  }

  getPlan(): Promise<PlanDoc> {
    return this.fetchFn(`${this.base}/api/plan`).then((r) => unwrap<PlanDoc>(r));
  }

  putPlan(doc: PlanDoc): Promise<PlanDoc> {
    return this.fetchFn(`${this.base}/api/plan`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(doc),
    }).then((r) => unwrap<PlanDoc>(r));
  }

  getTriangulation(): Promise<TriangulationDoc> {
    return this.fetchFn(`${this.base}/api/plan/triangulation`).then((r) =>
      unwrap<TriangulationDoc>(r),
    );
  }

  startOptimize(ga: Partial<GaForm>, fitness: Partial<FitnessForm>): Promise<string> {
    return this.fetchFn(`${this.base}/api/optimize`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ ga, fitness }),
    })
      .then((r) => unwrap<{ job_id: string }>(r))
      .then((body) => body.job_id);
  }

  getJob(jobId: string): Promise<JobDoc> {
    return this.fetchFn(`${this.base}/api/optimize/${jobId}`).then((r) =>
      unwrap<JobDoc>(r),
    );
  }

  cancelJob(jobId: string): Promise<JobDoc> {
    return this.fetchFn(`${this.base}/api/optimize/${jobId}`, {
      method: "DELETE",
    }).then((r) => unwrap<JobDoc>(r));
  }

  simulate(body: {
    start?: [number, number];
    v0?: [number, number];
    sim_config?: Record<string, number>;
  }): Promise<TraceDoc> {
    return this.fetchFn(`${this.base}/api/simulate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => unwrap<TraceDoc>(r));
  }

  // Subscribes to a job's progress stream.  Returns a closer; terminal
  // events (done/cancelled/failed) close the source automatically.
  streamJob(
    jobId: string,
    handlers: {
      onGeneration: (ev: GenerationEvent) => void;
      onTerminal: (status: JobStatus) => void;
    },
  ): () => void {
    const source = this.eventSourceFactory(
      `${this.base}/api/optimize/${jobId}/events`,
    );
    source.addEventListener("generation", (ev) => {
      handlers.onGeneration(JSON.parse(ev.data) as GenerationEvent);
    });
    for (const terminal of ["done", "cancelled", "failed"] as const) {
      source.addEventListener(terminal, () => {
        source.close();
        handlers.onTerminal(terminal);
      });
    }
    return () => source.close();
  }
}

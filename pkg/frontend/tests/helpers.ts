// Shared fakes: an in-memory stand-in for the backend (same JSON shapes,
// same error envelope), a scriptable EventSource, and a canvas context
// stub that just records calls.

import planFixture from "./fixtures/plan.json";
import triFixture from "./fixtures/triangulation.json";
import traceFixture from "./fixtures/trace.json";
import type { EventSourceLike } from "../src/api";
import type { PlanDoc, TraceDoc, TriangulationDoc } from "../src/types";

export const FIXTURE_PLAN = planFixture as PlanDoc;
export const FIXTURE_TRIANGULATION = triFixture as TriangulationDoc;
export const FIXTURE_TRACE = traceFixture as TraceDoc;

function clone<T>(doc: T): T {
  return JSON.parse(JSON.stringify(doc)) as T;
}

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export class FakeServer {
  plan: PlanDoc = clone(FIXTURE_PLAN);
  triangulation: TriangulationDoc = clone(FIXTURE_TRIANGULATION);
  trace: TraceDoc = clone(FIXTURE_TRACE);
  busy = false;
  putCount = 0;
  lastPutBody: PlanDoc | null = null;

  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    if (url.endsWith("/api/plan") && method === "GET") {
      return json(clone(this.plan));
    }
    if (url.endsWith("/api/plan") && method === "PUT") {
      this.putCount += 1;
      const doc = JSON.parse(init!.body as string) as PlanDoc;
      this.lastPutBody = doc;
      const problems = this.validate(doc);
      if (problems.length > 0) {
        return json({ detail: problems }, 422);
      }
      this.plan = clone(doc);
      return json(clone(doc));
    }
    if (url.endsWith("/api/plan/triangulation")) {
      return json(clone(this.triangulation));
    }
    if (url.endsWith("/api/simulate")) {
      return json(clone(this.trace));
    }
    if (url.endsWith("/api/optimize") && method === "POST") {
      if (this.busy) {
        return json(
          { detail: [{ node: null, field: null, message: "busy" }] },
          409,
        );
      }
      return json({ job_id: "job-1" });
    }
    if (url.includes("/api/optimize/") && method === "DELETE") {
      return json({ id: "job-1", status: "cancelled" });
    }
    if (url.includes("/api/optimize/")) {
      return json({
        id: "job-1",
        status: "done",
        generations_completed: 0,
        history: [],
        result: { best_plan: clone(this.plan) },
        error: null,
      });
    }
    return json({ detail: [] }, 404);
  };

  // Mirrors the server's node-level error envelope for range problems.
  private validate(doc: PlanDoc) {
    const problems: { node: number; field: string; message: string }[] = [];
    doc.nodes.forEach((node, i) => {
      const checks: [string, number, number, number][] = [
        ["acceleration", node.acceleration, 0, doc.limits.max_acceleration],
        ["body_dir", node.body_dir, ...doc.limits.body_dir_range],
        ["ball_dir", node.ball_dir, ...doc.limits.ball_dir_range],
      ];
      for (const [field, value, lo, hi] of checks) {
        if (typeof value !== "number" || value < lo || value > hi) {
          problems.push({
            node: i,
            field,
            message: `node ${i}: ${field} outside [${lo}, ${hi}]`,
          });
        }
      }
    });
    return problems;
  }
}

export class FakeEventSource implements EventSourceLike {
  url: string;
  closed = false;
  private listeners = new Map<string, ((ev: MessageEvent) => void)[]>();

  constructor(url: string) {
    this.url = url;
  }

  addEventListener(type: string, handler: (ev: MessageEvent) => void): void {
    const existing = this.listeners.get(type) ?? [];
    existing.push(handler);
    this.listeners.set(type, existing);
  }

  close(): void {
    this.closed = true;
  }

  emit(type: string, payload: unknown): void {
    for (const handler of this.listeners.get(type) ?? []) {
      handler({ data: JSON.stringify(payload) } as MessageEvent);
    }
  }
}

export class StubCtx {
  calls: string[] = [];
  strokeStyle: string | CanvasGradient | CanvasPattern = "";
  fillStyle: string | CanvasGradient | CanvasPattern = "";
  lineWidth = 1;

  clearRect(): void {
    this.calls.push("clearRect");
  }

  beginPath(): void {
    this.calls.push("beginPath");
  }

  moveTo(): void {
    this.calls.push("moveTo");
  }

  lineTo(): void {
    this.calls.push("lineTo");
  }

  arc(): void {
    this.calls.push("arc");
  }

  stroke(): void {
    this.calls.push("stroke");
  }

  fill(): void {
    this.calls.push("fill");
  }
}

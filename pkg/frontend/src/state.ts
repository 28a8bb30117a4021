// Editor state machine: one workspace plan mirrored from the server, a
// working draft for edits, and the INSERT / EDIT / PLAY mode switch.
//
// The server stays the source of truth: every change lands via PUT and the
// mirror is replaced by whatever canonical document the server echoes, so
// a save-then-reload always reproduces the byte-identical document.

import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";
import type {
  PlanDoc,
  PlanNodeDoc,
  TriangulationDoc,
  ValidationDetail,
} from "./types.js";

export type EditorMode = "insert" | "edit" | "play";

export interface ClampNotice {
  node: number;
  field: "acceleration" | "body_dir" | "ball_dir";
  requested: number;
  applied: number;
}

function deepClone<T>(doc: T): T {
  return JSON.parse(JSON.stringify(doc)) as T;
}

export const DEFAULT_NEW_NODE = {
  acceleration: 1.5,
  body_dir: 0,
  ball_dir: 0,
};

export class EditorStore {
  private api: ApiClient;
  mode: EditorMode = "edit";
  serverPlan: PlanDoc | null = null;
  draft: PlanDoc | null = null;
  triangulation: TriangulationDoc | null = null;
  selectedNode: number | null = null;
  lastValidation: ValidationDetail[] = [];
  lastClamp: ClampNotice | null = null;
  onChange: (() => void) | null = null;

  constructor(api: ApiClient) {
    this.api = api;
  }

  private notify(): void {
    this.onChange?.();
  }

  get dirty(): boolean {
    if (this.serverPlan === null || this.draft === null) {
      return false;
    }
    return JSON.stringify(this.serverPlan) !== JSON.stringify(this.draft);
  }

  async load(): Promise<void> {
    this.serverPlan = await this.api.getPlan();
    this.draft = deepClone(this.serverPlan);
    this.triangulation = await this.api.getTriangulation();
    this.lastValidation = [];
    this.notify();
  }

  // Mode changes refuse to drop unsaved edits unless forced.
  setMode(mode: EditorMode, opts?: { discardEdits?: boolean }): boolean {
    if (mode !== "edit" && this.dirty && !opts?.discardEdits) {
      return false;
    }
    if (mode !== "edit" && this.dirty && opts?.discardEdits) {
      this.draft = deepClone(this.serverPlan!);
    }
    this.mode = mode;
    if (mode !== "edit") {
      this.selectedNode = null;
    }
    this.notify();
    return true;
  }

  selectNode(index: number | null): void {
    this.selectedNode = index;
    this.notify();
  }

  nearestNodeIndex(x: number, y: number): number | null {
    if (!this.draft || this.draft.nodes.length === 0) {
      return null;
    }
    let best = 0;
    let bestDist = Infinity;
    this.draft.nodes.forEach((n, i) => {
      const d = Math.hypot(n.x - x, n.y - y);
      if (d < bestDist) {
        best = i;
        bestDist = d;
      }
    });
    return best;
  }

  private clamp(
    node: number,
    field: ClampNotice["field"],
    value: number,
  ): number {
    const limits = this.draft!.limits;
    const [lo, hi] =
      field === "acceleration"
        ? [0, limits.max_acceleration]
        : field === "body_dir"
          ? limits.body_dir_range
          : limits.ball_dir_range;
    const applied = Math.min(Math.max(value, lo), hi);
    if (applied !== value) {
      this.lastClamp = { node, field, requested: value, applied };
    }
    return applied;
  }

  updateNodeParams(
    index: number,
    patch: Partial<Pick<PlanNodeDoc, "acceleration" | "body_dir" | "ball_dir">>,
  ): void {
    if (!this.draft || index < 0 || index >= this.draft.nodes.length) {
      throw new Error(`no node ${index}`);
    }
    this.lastClamp = null;
    const node = this.draft.nodes[index];
    for (const field of ["acceleration", "body_dir", "ball_dir"] as const) {
      const value = patch[field];
      if (value !== undefined) {
        node[field] = this.clamp(index, field, value);
      }
    }
    this.notify();
  }

  moveNode(index: number, x: number, y: number): void {
    if (!this.draft || index < 0 || index >= this.draft.nodes.length) {
      throw new Error(`no node ${index}`);
    }
    this.draft.nodes[index].x = x;
    this.draft.nodes[index].y = y;
    this.notify();
  }

  // INSERT mode: a click adds a node and saves immediately.
  async insertNode(x: number, y: number): Promise<boolean> {
    if (!this.draft) {
      throw new Error("no plan loaded");
    }
    this.draft.nodes.push({ x, y, ...DEFAULT_NEW_NODE });
    const saved = await this.save();
    if (!saved) {
      this.draft.nodes.pop();
      this.notify();
    }
    return saved;
  }

  async removeNode(index: number): Promise<boolean> {
    if (!this.draft || index < 0 || index >= this.draft.nodes.length) {
      throw new Error(`no node ${index}`);
    }
    const removed = this.draft.nodes.splice(index, 1)[0];
    const saved = await this.save();
    if (!saved) {
      this.draft.nodes.splice(index, 0, removed);
      this.notify();
    } else if (this.selectedNode === index) {
      this.selectedNode = null;
    }
    return saved;
  }

  // PUT the draft; on success adopt the server's canonical echo so the
  // mirror stays bit-exact with a subsequent GET.
  async save(): Promise<boolean> {
    if (!this.draft) {
      throw new Error("no plan loaded");
    }
    try {
      const echoed = await this.api.putPlan(this.draft);
      this.serverPlan = echoed;
      this.draft = deepClone(echoed);
      this.triangulation = await this.api.getTriangulation();
      this.lastValidation = [];
      this.notify();
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        this.lastValidation = err.details;
        this.notify();
        return false;
      }
      throw err;
    }
  }

  async revert(): Promise<void> {
    if (this.serverPlan) {
      this.draft = deepClone(this.serverPlan);
      this.lastValidation = [];
      this.notify();
    }
  }

  // Node indices the last failed save complained about.
  invalidNodes(): Set<number> {
    const out = new Set<number>();
    for (const d of this.lastValidation) {
      if (d.node !== null) {
        out.add(d.node);
      }
    }
    return out;
  }
}

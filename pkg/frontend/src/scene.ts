// Canvas drawing of the plan view: obstacle at the origin, triangulation
// edges, one glyph per node (body-direction arrow scaled/tinted by
// acceleration, tick for ball direction), plus trace overlays in PLAY
// mode.  Only the Ctx2D subset below is used, so tests can pass a stub.

import type { PlanDoc, TraceStateDoc, TriangulationDoc } from "./types.js";

export interface Ctx2D {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
}

export interface RenderSummary {
  nodeGlyphs: number;
  triangleEdges: number;
  tracePoints: number;
}

export class Viewport {
  width: number;
  height: number;
  // world metres shown across the canvas width
  span: number;
  centerX = 0;
  centerY = 0;

  constructor(width: number, height: number, span = 30) {
    this.width = width;
    this.height = height;
    this.span = span;
  }

  get scale(): number {
    return this.width / this.span;
  }

  worldToScreen(x: number, y: number): [number, number] {
    return [
      this.width / 2 + (x - this.centerX) * this.scale,
      this.height / 2 - (y - this.centerY) * this.scale,
    ];
  }

  screenToWorld(px: number, py: number): [number, number] {
    return [
      this.centerX + (px - this.width / 2) / this.scale,
      this.centerY - (py - this.height / 2) / this.scale,
    ];
  }
}

function uniqueEdges(tri: TriangulationDoc): [number, number][] {
  const seen = new Set<string>();
  const edges: [number, number][] = [];
  for (const [a, b, c] of tri.triangles) {
    for (const [u, v] of [
      [a, b],
      [b, c],
      [c, a],
    ] as [number, number][]) {
      const key = u < v ? `${u}-${v}` : `${v}-${u}`;
      if (!seen.has(key)) {
        seen.add(key);
        edges.push(u < v ? [u, v] : [v, u]);
      }
    }
  }
  return edges;
}

function drawArrow(
  ctx: Ctx2D,
  view: Viewport,
  x: number,
  y: number,
  angle: number,
  length: number,
): void {
  const [sx, sy] = view.worldToScreen(x, y);
  const [ex, ey] = view.worldToScreen(
    x + Math.cos(angle) * length,
    y + Math.sin(angle) * length,
  );
  ctx.beginPath();
  ctx.moveTo(sx, sy);
  ctx.lineTo(ex, ey);
  ctx.stroke();
  const head = 0.18 * length;
  for (const side of [-1, 1]) {
    const a = angle + Math.PI + (side * Math.PI) / 7;
    const [hx, hy] = view.worldToScreen(
      x + Math.cos(angle) * length + Math.cos(a) * head,
      y + Math.sin(angle) * length + Math.sin(a) * head,
    );
    ctx.beginPath();
    ctx.moveTo(ex, ey);
    ctx.lineTo(hx, hy);
    ctx.stroke();
  }
}

export interface SceneOptions {
  plan: PlanDoc | null;
  triangulation: TriangulationDoc | null;
  selectedNode: number | null;
  invalidNodes: Set<number>;
  trace: TraceStateDoc[] | null;
  // index into trace for the animated agent dot; null hides it
  traceCursor: number | null;
  kickableRadius: number;
  // optimized-plan comparison, drawn faint under the workspace plan
  overlay?: PlanDoc | null;
}

export function renderScene(
  ctx: Ctx2D,
  view: Viewport,
  opts: SceneOptions,
): RenderSummary {
  ctx.clearRect(0, 0, view.width, view.height);
  const summary: RenderSummary = {
    nodeGlyphs: 0,
    triangleEdges: 0,
    tracePoints: 0,
  };

  // axes through the obstacle
  ctx.strokeStyle = "#d8d8d8";
  ctx.lineWidth = 1;
  for (const [a, b] of [
    [view.worldToScreen(-view.span, 0), view.worldToScreen(view.span, 0)],
    [view.worldToScreen(0, -view.span), view.worldToScreen(0, view.span)],
  ]) {
    ctx.beginPath();
    ctx.moveTo(a[0], a[1]);
    ctx.lineTo(b[0], b[1]);
    ctx.stroke();
  }

  // obstacle marker and its kickable-radius ring
  const [ox, oy] = view.worldToScreen(0, 0);
  ctx.fillStyle = "#c0392b";
  ctx.beginPath();
  ctx.arc(ox, oy, 6, 0, Math.PI * 2);
  ctx.fill();
  ctx.strokeStyle = "#c0392b";
  ctx.beginPath();
  ctx.arc(ox, oy, opts.kickableRadius * view.scale, 0, Math.PI * 2);
  ctx.stroke();

  if (opts.overlay) {
    ctx.strokeStyle = "#d9b8dc";
    ctx.lineWidth = 1;
    for (const node of opts.overlay.nodes) {
      const share = node.acceleration / opts.overlay.limits.max_acceleration;
      drawArrow(ctx, view, node.x, node.y, node.body_dir, 0.6 + 1.2 * share);
    }
  }

  const plan = opts.plan;
  if (plan && opts.triangulation) {
    ctx.strokeStyle = "#b8c8dc";
    for (const [u, v] of uniqueEdges(opts.triangulation)) {
      const nu = plan.nodes[u];
      const nv = plan.nodes[v];
      if (!nu || !nv) {
        continue;
      }
      const [ax, ay] = view.worldToScreen(nu.x, nu.y);
      const [bx, by] = view.worldToScreen(nv.x, nv.y);
      ctx.beginPath();
      ctx.moveTo(ax, ay);
      ctx.lineTo(bx, by);
      ctx.stroke();
      summary.triangleEdges += 1;
    }
  }

  if (plan) {
    plan.nodes.forEach((node, i) => {
      const accelShare = node.acceleration / plan.limits.max_acceleration;
      ctx.strokeStyle = opts.invalidNodes.has(i)
        ? "#c0392b"
        : i === opts.selectedNode
          ? "#1f6feb"
          : "#2f6f4f";
      ctx.lineWidth = i === opts.selectedNode ? 2.5 : 1.5;
      // body-direction arrow, length tracking acceleration
      drawArrow(ctx, view, node.x, node.y, node.body_dir, 0.6 + 1.2 * accelShare);
      // ball-direction tick
      const [tx, ty] = view.worldToScreen(node.x, node.y);
      const [ux, uy] = view.worldToScreen(
        node.x + Math.cos(node.ball_dir) * 0.45,
        node.y + Math.sin(node.ball_dir) * 0.45,
      );
      ctx.beginPath();
      ctx.moveTo(tx, ty);
      ctx.lineTo(ux, uy);
      ctx.stroke();
      // node dot
      ctx.fillStyle = i === opts.selectedNode ? "#1f6feb" : "#234";
      ctx.beginPath();
      ctx.arc(tx, ty, 3.5, 0, Math.PI * 2);
      ctx.fill();
      summary.nodeGlyphs += 1;
    });
  }

  if (opts.trace && opts.trace.length > 0) {
    ctx.strokeStyle = "#8250df";
    ctx.lineWidth = 2;
    ctx.beginPath();
    opts.trace.forEach((s, i) => {
      const [px, py] = view.worldToScreen(s.x, s.y);
      if (i === 0) {
        ctx.moveTo(px, py);
      } else {
        ctx.lineTo(px, py);
      }
      summary.tracePoints += 1;
    });
    ctx.stroke();
    if (opts.traceCursor !== null) {
      const cursor =
        opts.trace[Math.min(opts.traceCursor, opts.trace.length - 1)];
      const [cx, cy] = view.worldToScreen(cursor.x, cursor.y);
      ctx.fillStyle = "#8250df";
      ctx.beginPath();
      ctx.arc(cx, cy, 5, 0, Math.PI * 2);
      ctx.fill();
    }
  }

  return summary;
}

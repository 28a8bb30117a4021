// Fitness-over-generations chart fed by the job's progress stream: one
// appended point per generation event, three series (best / mean / worst).

import type { Ctx2D } from "./scene.js";
import type { GenerationEvent } from "./types.js";

export class FitnessChart {
  generations: number[] = [];
  best: number[] = [];
  mean: number[] = [];
  worst: number[] = [];

  append(ev: GenerationEvent): void {
    this.generations.push(ev.generation);
    this.best.push(ev.best);
    this.mean.push(ev.mean);
    this.worst.push(ev.worst);
  }

  reset(): void {
    this.generations = [];
    this.best = [];
    this.mean = [];
    this.worst = [];
  }

  get pointCount(): number {
    return this.generations.length;
  }

  // The optimizer keeps its elites, so a healthy stream never lets the
  // best series dip; the UI surfaces a violation rather than hiding it.
  bestIsNonDecreasing(): boolean {
    for (let i = 1; i < this.best.length; i++) {
      if (this.best[i] < this.best[i - 1]) {
        return false;
      }
    }
    return true;
  }

  draw(ctx: Ctx2D, width: number, height: number): void {
    ctx.clearRect(0, 0, width, height);
    if (this.pointCount === 0) {
      return;
    }
    const lo = Math.min(...this.worst);
    const hi = Math.max(...this.best);
    const spanY = hi - lo || 1;
    const spanX = Math.max(this.generations[this.pointCount - 1], 1);
    const px = (g: number) => (g / spanX) * (width - 20) + 10;
    const py = (v: number) => height - 12 - ((v - lo) / spanY) * (height - 24);

    const series: [number[], string][] = [
      [this.worst, "#c0392b"],
      [this.mean, "#8a8a8a"],
      [this.best, "#1f6feb"],
    ];
    for (const [values, color] of series) {
      ctx.strokeStyle = color;
      ctx.lineWidth = 1.5;
      ctx.beginPath();
      values.forEach((v, i) => {
        const x = px(this.generations[i]);
        const y = py(v);
        if (i === 0) {
          ctx.moveTo(x, y);
        } else {
          ctx.lineTo(x, y);
        }
      });
      ctx.stroke();
    }
  }
}

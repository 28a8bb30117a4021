// PLAY-mode animation over a simulation trace.  The cursor advances in
// wall-clock time scaled to the trace's own dt, so a 6-second run takes
// six real seconds at speed 1.

import type { TraceDoc } from "./types.js";

export interface Readouts {
  minObstacleDistance: number | null;
  finishTime: number | null;
  termination: string | null;
  cleared: boolean | null;
}

export class TracePlayback {
  trace: TraceDoc | null = null;
  cursor = 0;
  playing = false;
  speedScale = 1;
  private startedAtMs = 0;
  private startTraceTime = 0;

  load(trace: TraceDoc): void {
    this.trace = trace;
    this.cursor = 0;
    this.playing = false;
  }

  play(nowMs: number): void {
    if (!this.trace || this.trace.states.length === 0) {
      return;
    }
    if (this.cursor >= this.trace.states.length - 1) {
      this.cursor = 0;
    }
    this.playing = true;
    this.startedAtMs = nowMs;
    this.startTraceTime = this.trace.states[this.cursor].t;
  }

  pause(): void {
    this.playing = false;
  }

  // Advance to the state whose timestamp matches the elapsed wall clock;
  // returns true while the animation still runs.
  tick(nowMs: number): boolean {
    if (!this.playing || !this.trace) {
      return false;
    }
    const targetTime =
      this.startTraceTime + ((nowMs - this.startedAtMs) / 1000) * this.speedScale;
    const states = this.trace.states;
    let i = this.cursor;
    while (i < states.length - 1 && states[i + 1].t <= targetTime) {
      i += 1;
    }
    this.cursor = i;
    if (i >= states.length - 1) {
      this.playing = false;
      return false;
    }
    return true;
  }

  currentState() {
    if (!this.trace || this.trace.states.length === 0) {
      return null;
    }
    return this.trace.states[Math.min(this.cursor, this.trace.states.length - 1)];
  }

  readouts(kickableRadius: number): Readouts {
    const metrics = this.trace?.metrics;
    if (!this.trace || !metrics) {
      return {
        minObstacleDistance: null,
        finishTime: null,
        termination: null,
        cleared: null,
      };
    }
    return {
      minObstacleDistance: metrics.min_obstacle_distance,
      finishTime: metrics.finish_time,
      termination: this.trace.termination,
      cleared: metrics.min_obstacle_distance > kickableRadius,
    };
  }
}

/**
 * The live trial loop, kept free of DOM and canvas so the protocol
 * behavior is directly testable against a scripted stub server.
 *
 * Responsibilities: run the hello/start_trial/tool_update/cue_state/
 * confirm/trial_result conversation, keep a latest-state buffer the
 * renderer reads at its own cadence, and echo the user's pointer/height
 * input as tool updates capped at 120 Hz. The view performs zero
 * guidance math: every displayed number (state, motors, distance, tier,
 * deviation, time) is carried verbatim from a server message.
 */

import { Connection } from "./connection.js";
import {
  Condition,
  CueStateMsg,
  ServerMsg,
  StartTrialMsg,
  TrialResultMsg,
} from "./protocol.js";

export const MAX_UPDATE_HZ = 120;

export interface CompletedTrial {
  trial: number;
  direction_deg: number;
  zone: string;
  /** Server-reported, displayed unmodified. */
  deviation_mm: number;
  time_s: number;
  /** The client's own input echo, for the review sparkline. */
  trace: Array<{ x: number; y: number }>;
}

export type Phase =
  | "idle"
  | "in_trial"
  | "result"
  | "error"
  | "disconnected";

export interface ViewModel {
  phase: Phase;
  condition: Condition;
  trial: StartTrialMsg | null;
  /** null until the server has spoken; the UI never invents one. */
  cue: CueStateMsg | null;
  lastResult: TrialResultMsg | null;
  tool: { x_mm: number; y_mm: number; z_mm: number };
  /** Target point iff the server sent one (AR-bearing conditions only). */
  target: [number, number, number] | null;
  completed: CompletedTrial[];
  errorMessage: string | null;
}

export class TrialView {
  private phase: Phase = "idle";
  private trial: StartTrialMsg | null = null;
  private cue: CueStateMsg | null = null;
  private lastResult: TrialResultMsg | null = null;
  private tool = { x_mm: 0, y_mm: 0, z_mm: 0 };
  private trace: Array<{ x: number; y: number }> = [];
  private completed: CompletedTrial[] = [];
  private errorMessage: string | null = null;
  private lastSentMs = -Infinity;
  private lastSentT = -1;
  private readonly startMs: number;

  constructor(
    private readonly connection: Connection,
    readonly participant: string,
    readonly condition: Condition,
    private readonly now: () => number = () => performance.now(),
  ) {
    this.startMs = this.now();
    connection.onMessage((msg) => this.handle(msg));
    connection.onClose(() => {
      if (this.phase !== "error") this.phase = "disconnected";
    });
  }

  start(): void {
    this.connection.send({
      type: "hello",
      participant: this.participant,
      condition: this.condition,
    });
  }

  private handle(msg: ServerMsg): void {
    switch (msg.type) {
      case "start_trial":
        this.trial = msg;
        this.phase = "in_trial";
        this.tool = { x_mm: 0, y_mm: 0, z_mm: 0 };
        this.trace = [{ x: 0, y: 0 }];
        this.cue = null;
        break;
      case "cue_state":
        this.cue = msg; // latest-state buffer; renderer reads on its own clock
        break;
      case "trial_result":
        this.lastResult = msg;
        this.phase = "result";
        if (this.trial) {
          this.completed.push({
            trial: msg.trial,
            direction_deg: this.trial.direction_deg,
            zone: this.trial.zone,
            deviation_mm: msg.deviation_mm,
            time_s: msg.time_s,
            trace: this.trace,
          });
        }
        break;
      case "error":
        this.phase = "error";
        this.errorMessage = msg.message;
        break;
    }
  }

  /** Pointer moved to plane coordinates (mm). */
  moveTool(x_mm: number, y_mm: number): void {
    if (this.phase !== "in_trial" && this.phase !== "result") return;
    this.tool.x_mm = x_mm;
    this.tool.y_mm = y_mm;
    this.trace.push({ x: x_mm, y: y_mm });
    this.maybeSendUpdate();
  }

  /** Scroll / key height adjustment (mm out of plane). */
  adjustHeight(dz_mm: number): void {
    if (this.phase !== "in_trial" && this.phase !== "result") return;
    this.tool.z_mm += dz_mm;
    this.maybeSendUpdate();
  }

  /** Spacebar: the foot-pedal stand-in. */
  confirm(): void {
    if (this.phase !== "in_trial") return;
    this.connection.send({ type: "confirm" });
  }

  private maybeSendUpdate(): void {
    const nowMs = this.now();
    if (nowMs - this.lastSentMs < 1000 / MAX_UPDATE_HZ) return;
    this.lastSentMs = nowMs;
    // session timestamps must be monotone even if the clock stalls
    const t_s = Math.max((nowMs - this.startMs) / 1000, this.lastSentT + 1e-4);
    this.lastSentT = t_s;
    this.connection.send({
      type: "tool_update",
      t_s,
      x_mm: this.tool.x_mm,
      y_mm: this.tool.y_mm,
      z_mm: this.tool.z_mm,
    });
  }

  view(): ViewModel {
    return {
      phase: this.phase,
      condition: this.condition,
      trial: this.trial,
      cue: this.cue,
      lastResult: this.lastResult,
      tool: { ...this.tool },
      target: this.trial?.target_mm ?? null,
      completed: [...this.completed],
      errorMessage: this.errorMessage,
    };
  }
}

/**
 * Session protocol messages, exactly as the guidance service speaks them:
 * newline-delimited JSON, one object per line (see docs/protocol.md in the
 * repository root). The UI treats every numeric field as opaque server
 * truth; nothing here computes guidance values.
 */

export type Condition = "haptics_only" | "ar_only" | "ar_plus_haptics";

export interface HelloMsg {
  type: "hello";
  participant: string;
  condition: Condition;
}

export interface StartTrialMsg {
  type: "start_trial";
  trial: number;
  direction_deg: number;
  zone: "T1" | "T2" | "T3";
  /** Present only in AR-bearing conditions; haptics-only never sees it. */
  target_mm?: [number, number, number];
}

export interface ToolUpdateMsg {
  type: "tool_update";
  t_s: number;
  x_mm: number;
  y_mm: number;
  z_mm: number;
}

export interface CueStateMsg {
  type: "cue_state";
  t_s: number;
  state: string;
  /** 12 intensities in [0, 1], motor A first, normalized by the server. */
  motors: number[];
  distance_mm: number;
  tier: "far" | "medium" | "close";
}

export interface ConfirmMsg {
  type: "confirm";
}

export interface TrialResultMsg {
  type: "trial_result";
  trial: number;
  deviation_mm: number;
  time_s: number;
}

export interface ErrorMsg {
  type: "error";
  message: string;
}

export type ServerMsg = StartTrialMsg | CueStateMsg | TrialResultMsg | ErrorMsg;
export type ClientMsg = HelloMsg | ToolUpdateMsg | ConfirmMsg;

const SERVER_TYPES = new Set(["start_trial", "cue_state", "trial_result", "error"]);

/** Parse one server line; throws on anything outside the schema. */
export function parseServerLine(line: string): ServerMsg {
  let obj: unknown;
  try {
    obj = JSON.parse(line);
  } catch {
    throw new Error(`not JSON: ${line}`);
  }
  const msg = obj as { type?: string };
  if (!msg || typeof msg.type !== "string" || !SERVER_TYPES.has(msg.type)) {
    throw new Error(`unknown server message: ${line}`);
  }
  if (msg.type === "cue_state") {
    const cue = msg as CueStateMsg;
    if (!Array.isArray(cue.motors) || cue.motors.length !== 12) {
      throw new Error("cue_state must carry 12 motor intensities");
    }
  }
  return msg as ServerMsg;
}

export function serializeClientMsg(msg: ClientMsg): string {
  return JSON.stringify(msg) + "\n";
}

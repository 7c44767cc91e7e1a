/**
 * Pure scene construction: view model in, draw list out. Rendering to a
 * canvas is a separate, trivial painter (render.ts), so everything the
 * user sees is assertable in tests by querying primitive ids.
 *
 * Millimetre-to-pixel scale is fixed at 4 px/mm with the plane origin
 * centered. The top-down view puts the forward (0 deg) direction up and
 * the 90 deg lateral direction right, matching the ring (motor A up).
 */

import { ringLayout } from "./ring.js";
import { ViewModel } from "./trialView.js";

export const PX_PER_MM = 4;
export const PLANE_BAND_MM = 5; // drawn band guides on the side strip

export type Primitive =
  | { kind: "circle"; id: string; x: number; y: number; r: number;
      fill?: string; stroke?: string; alpha?: number }
  | { kind: "line"; id: string; x1: number; y1: number; x2: number; y2: number;
      stroke: string; alpha?: number }
  | { kind: "rect"; id: string; x: number; y: number; w: number; h: number;
      fill?: string; stroke?: string; alpha?: number }
  | { kind: "text"; id: string; x: number; y: number; text: string;
      fill?: string; size?: number }
  | { kind: "polyline"; id: string; points: Array<{ x: number; y: number }>;
      stroke: string; alpha?: number };

export interface SceneLayout {
  width: number;
  height: number;
  planeCx: number;
  planeCy: number;
  stripX: number;   // side-elevation strip left edge
  stripW: number;
  ringCx: number;
  ringCy: number;
  ringR: number;
}

export function defaultLayout(width = 960, height = 760): SceneLayout {
  return {
    width,
    height,
    planeCx: (width - 240) / 2,
    planeCy: height / 2,
    stripX: width - 220,
    stripW: 60,
    ringCx: width - 110,
    ringCy: 180,
    ringR: 70,
  };
}

/** Plane mm -> top-down screen px (forward up, lateral right). */
export function worldToScreen(layout: SceneLayout, x_mm: number, y_mm: number) {
  return {
    sx: layout.planeCx - PX_PER_MM * y_mm,
    sy: layout.planeCy - PX_PER_MM * x_mm,
  };
}

/** Top-down screen px -> plane mm (inverse of worldToScreen). */
export function screenToWorld(layout: SceneLayout, sx: number, sy: number) {
  return {
    x_mm: (layout.planeCy - sy) / PX_PER_MM,
    y_mm: (layout.planeCx - sx) / PX_PER_MM,
  };
}

export function buildScene(view: ViewModel, layout: SceneLayout = defaultLayout()): Primitive[] {
  const out: Primitive[] = [];
  const { planeCx, planeCy } = layout;

  // -- top-down plane view ---------------------------------------------------
  out.push({ kind: "rect", id: "plane-bg", x: 0, y: 0,
             w: layout.stripX - 20, h: layout.height, fill: "#10141c" });
  out.push({ kind: "line", id: "axis-forward", x1: planeCx, y1: planeCy,
             x2: planeCx, y2: planeCy - 40 * PX_PER_MM, stroke: "#2b3a55" });
  out.push({ kind: "line", id: "axis-lateral", x1: planeCx, y1: planeCy,
             x2: planeCx + 40 * PX_PER_MM, y2: planeCy, stroke: "#2b3a55" });
  for (const r of [30, 60, 90]) {
    out.push({ kind: "circle", id: `zone-ring:${r}`, x: planeCx, y: planeCy,
               r: r * PX_PER_MM, stroke: "#223048" });
  }

  // target overlay only when the server sent coordinates (AR conditions)
  if (view.target) {
    const { sx, sy } = worldToScreen(layout, view.target[0], view.target[1]);
    out.push({ kind: "circle", id: "target", x: sx, y: sy,
               r: 10 * PX_PER_MM, fill: "#3fa7ff", alpha: 0.5 });
  }

  // the user's own tool tip echo
  const tip = worldToScreen(layout, view.tool.x_mm, view.tool.y_mm);
  out.push({ kind: "circle", id: "tip", x: tip.sx, y: tip.sy, r: 6,
             fill: "#ffd24a" });
  if (view.completed.length === 0 && view.trial === null) {
    out.push({ kind: "text", id: "waiting", x: planeCx - 60, y: planeCy,
               text: "waiting for trial...", fill: "#8fa3c0" });
  }

  // -- side-elevation strip (height vs the plane) -----------------------------
  const stripCy = layout.height / 2;
  out.push({ kind: "rect", id: "strip-bg", x: layout.stripX, y: 40,
             w: layout.stripW, h: layout.height - 80, fill: "#10141c" });
  out.push({ kind: "line", id: "strip-plane", x1: layout.stripX,
             y1: stripCy, x2: layout.stripX + layout.stripW, y2: stripCy,
             stroke: "#4a5a75" });
  for (const sign of [1, -1]) {
    const y = stripCy - sign * PLANE_BAND_MM * PX_PER_MM;
    out.push({ kind: "line", id: `strip-band:${sign > 0 ? "+" : "-"}${PLANE_BAND_MM}`,
               x1: layout.stripX, y1: y, x2: layout.stripX + layout.stripW, y2: y,
               stroke: "#2b3a55" });
  }
  out.push({ kind: "circle", id: "strip-tip", x: layout.stripX + layout.stripW / 2,
             y: stripCy - view.tool.z_mm * PX_PER_MM, r: 5, fill: "#ffd24a" });

  // -- actuator ring (intensities verbatim from the latest cue_state) --------
  const intensities = view.cue?.motors ?? new Array(12).fill(0);
  out.push({ kind: "circle", id: "ring-outline", x: layout.ringCx, y: layout.ringCy,
             r: layout.ringR, stroke: "#2b3a55" });
  for (const m of ringLayout(intensities)) {
    const x = layout.ringCx + m.x * layout.ringR;
    const y = layout.ringCy + m.y * layout.ringR;
    out.push({ kind: "circle", id: `motor:${m.label}`, x, y, r: 9,
               fill: m.intensity > 0 ? "#ff5d43" : "#1c2533",
               stroke: "#3a4a66", alpha: m.intensity > 0 ? 0.25 + 0.75 * m.intensity : 1.0 });
    out.push({ kind: "text", id: `motor-label:${m.label}`, x: x - 4, y: y + 4,
               text: m.label, fill: "#c8d4e8", size: 10 });
  }

  // -- status texts: every number verbatim from server messages --------------
  if (view.cue) {
    out.push({ kind: "text", id: "status-state", x: layout.stripX, y: 300,
               text: `state: ${view.cue.state}`, fill: "#c8d4e8" });
    out.push({ kind: "text", id: "status-distance", x: layout.stripX, y: 320,
               text: `distance: ${view.cue.distance_mm} mm`, fill: "#c8d4e8" });
    out.push({ kind: "text", id: "status-tier", x: layout.stripX, y: 340,
               text: `tier: ${view.cue.tier}`, fill: "#c8d4e8" });
  }
  if (view.trial) {
    out.push({ kind: "text", id: "status-trial", x: layout.stripX, y: 280,
               text: `trial ${view.trial.trial} (${view.trial.zone})`, fill: "#c8d4e8" });
  }
  if (view.phase === "result" && view.lastResult) {
    out.push({ kind: "text", id: "result-banner", x: planeCx - 120, y: 60,
               text: `deviation ${view.lastResult.deviation_mm} mm in ${view.lastResult.time_s} s`,
               fill: "#9fe870", size: 16 });
  }
  if (view.phase === "disconnected") {
    out.push({ kind: "rect", id: "banner-disconnected-bg", x: 0, y: 0,
               w: layout.width, h: 28, fill: "#7a2030" });
    out.push({ kind: "text", id: "banner-disconnected", x: 12, y: 19,
               text: "connection lost - reconnecting...", fill: "#ffffff" });
  }
  if (view.phase === "error" && view.errorMessage) {
    out.push({ kind: "text", id: "banner-error", x: 12, y: 19,
               text: `protocol error: ${view.errorMessage}`, fill: "#ff8d7a" });
  }
  return out;
}

export function findById(scene: Primitive[], id: string): Primitive | undefined {
  return scene.find((p) => p.id === id);
}

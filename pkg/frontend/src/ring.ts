/**
 * The 12-motor wristband ring as the UI draws it: labels A..L every
 * 30 degrees with A at the top (the dorsal motor / forward direction),
 * angles increasing clockwise on screen. Intensity 0 is off, 1 is full,
 * straight from the server's normalized values.
 */

export const RING_LABELS = "ABCDEFGHIJKL";

export interface MotorDot {
  label: string;
  angleDeg: number;
  /** Unit position: x right, y down, A at (0, -1). */
  x: number;
  y: number;
  intensity: number;
}

export function ringLayout(intensities: readonly number[]): MotorDot[] {
  if (intensities.length !== 12) {
    throw new Error(`expected 12 intensities, got ${intensities.length}`);
  }
  return Array.from(RING_LABELS, (label, i) => {
    const angleDeg = i * 30;
    const rad = (angleDeg * Math.PI) / 180;
    return {
      label,
      angleDeg,
      x: Math.sin(rad),
      y: -Math.cos(rad),
      intensity: clamp01(intensities[i] ?? 0),
    };
  });
}

export function litLabels(intensities: readonly number[]): string[] {
  return ringLayout(intensities)
    .filter((m) => m.intensity > 0)
    .map((m) => m.label);
}

function clamp01(v: number): number {
  return v < 0 ? 0 : v > 1 ? 1 : v;
}

import { describe, expect, it } from "vitest";
import { litLabels, ringLayout } from "../src/ring.js";

const zeros = new Array(12).fill(0);

describe("ring layout", () => {
  it("places A at the top and spaces motors 30 degrees apart", () => {
    const dots = ringLayout(zeros);
    expect(dots.map((d) => d.label).join("")).toBe("ABCDEFGHIJKL");
    const a = dots[0]!;
    expect(a.x).toBeCloseTo(0, 12);
    expect(a.y).toBeCloseTo(-1, 12); // up on screen
    const d = dots[3]!; // 90 deg -> screen right
    expect(d.angleDeg).toBe(90);
    expect(d.x).toBeCloseTo(1, 12);
    expect(d.y).toBeCloseTo(0, 12);
    for (let i = 1; i < 12; i++) {
      expect(dots[i]!.angleDeg - dots[i - 1]!.angleDeg).toBe(30);
    }
  });

  it("maps intensity 0 to off and clamps into [0, 1]", () => {
    const intensities = [...zeros];
    intensities[0] = 1.4;   // clamped to full
    intensities[5] = -0.2;  // clamped to off
    intensities[7] = 0.33;
    const dots = ringLayout(intensities);
    expect(dots[0]!.intensity).toBe(1);
    expect(dots[5]!.intensity).toBe(0);
    expect(dots[7]!.intensity).toBeCloseTo(0.33);
    expect(litLabels(intensities)).toEqual(["A", "H"]);
  });

  it("rejects wrong-length intensity arrays", () => {
    expect(() => ringLayout([0, 1])).toThrow(/12/);
  });
});

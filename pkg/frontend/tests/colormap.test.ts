import { describe, expect, it } from "vitest";

import { colormap, dequantize, heatmapColors, roundHalfToEven } from "../src/colormap";

describe("colormap", () => {
  it("pins the endpoints and mid color", () => {
    expect(colormap(0)).toEqual([0, 0, 255]); // pure blue
    expect(colormap(0.5)).toEqual([255, 255, 255]); // mid color
    expect(colormap(1)).toEqual([255, 0, 0]); // pure red
  });

  it("clamps out-of-range inputs", () => {
    expect(colormap(-3)).toEqual(colormap(0));
    expect(colormap(42)).toEqual(colormap(1));
  });

  it("is monotone red-up, blue-down", () => {
    let prevRed = -1;
    let prevBlue = 256;
    for (let i = 0; i <= 100; i++) {
      const [r, , b] = colormap(i / 100);
      expect(r).toBeGreaterThanOrEqual(prevRed);
      expect(b).toBeLessThanOrEqual(prevBlue);
      prevRed = r;
      prevBlue = b;
    }
  });

  it("rounds half to even like the exporter", () => {
    expect(roundHalfToEven(2.5)).toBe(2);
    expect(roundHalfToEven(3.5)).toBe(4);
    expect(roundHalfToEven(2.4)).toBe(2);
    expect(roundHalfToEven(2.6)).toBe(3);
  });
});

describe("dequantize", () => {
  it("inverts quantization within the documented error bound", () => {
    const min = -0.25;
    const max = 0.85;
    const span = max - min;
    const exact = [min, min + 0.3 * span, min + 0.62 * span, max];
    const quantized = new Uint8Array(exact.map((s) => Math.round(((s - min) / span) * 255)));
    const restored = dequantize(quantized, min, max);
    for (let i = 0; i < exact.length; i++) {
      expect(Math.abs(restored[i] - exact[i])).toBeLessThanOrEqual(span / 510 + 1e-12);
    }
  });

  it("handles a degenerate range", () => {
    const restored = dequantize(new Uint8Array([0, 0]), 2.5, 2.5);
    expect(Array.from(restored)).toEqual([2.5, 2.5]);
  });
});

describe("heatmapColors", () => {
  it("colors extremes pure blue and pure red", () => {
    const colors = heatmapColors(new Uint8Array([0, 255]), 0, 1);
    expect(Array.from(colors.slice(0, 3))).toEqual([0, 0, 255]);
    expect(Array.from(colors.slice(3, 6))).toEqual([255, 0, 0]);
  });

  it("maps a degenerate range to the mid color", () => {
    const colors = heatmapColors(new Uint8Array([0, 0, 0]), 1, 1);
    for (let i = 0; i < 3; i++) {
      expect(Array.from(colors.slice(3 * i, 3 * i + 3))).toEqual([255, 255, 255]);
    }
  });
});

/**
 * The blue→white→red score ramp, identical to the CLI's heatmap export so
 * a served heatmap and a written PLY look the same: t=0 pure blue, t=0.5
 * white, t=1 pure red, u8 channels rounded half-to-even to match the
 * exporter's rounding.
 */

export function roundHalfToEven(x: number): number {
  const floor = Math.floor(x);
  const diff = x - floor;
  if (diff > 0.5) return floor + 1;
  if (diff < 0.5) return floor;
  return floor % 2 === 0 ? floor : floor + 1;
}

/** Map t in [0, 1] to an RGB triple of u8 values. */
export function colormap(t: number): [number, number, number] {
  const clamped = Math.min(1, Math.max(0, t));
  let r: number;
  let g: number;
  let b: number;
  if (clamped <= 0.5) {
    const s = clamped * 2;
    r = s;
    g = s;
    b = 1;
  } else {
    const s = (clamped - 0.5) * 2;
    r = 1;
    g = 1 - s;
    b = 1 - s;
  }
  return [roundHalfToEven(r * 255), roundHalfToEven(g * 255), roundHalfToEven(b * 255)];
}

/** Dequantize served u8 heatmap values back to float scores. */
export function dequantize(values: Uint8Array, min: number, max: number): Float64Array {
  const span = max - min;
  const out = new Float64Array(values.length);
  for (let i = 0; i < values.length; i++) {
    out[i] = min + (values[i] / 255) * span;
  }
  return out;
}

/**
 * Per-point u8 RGB colors for dequantized scores, normalized over the
 * served [min, max] range; a degenerate range maps every point to the
 * mid color, matching the exporter.
 */
export function heatmapColors(values: Uint8Array, min: number, max: number): Uint8Array {
  const out = new Uint8Array(values.length * 3);
  const degenerate = max <= min;
  for (let i = 0; i < values.length; i++) {
    const t = degenerate ? 0.5 : values[i] / 255;
    const [r, g, b] = colormap(t);
    out[3 * i] = r;
    out[3 * i + 1] = g;
    out[3 * i + 2] = b;
  }
  return out;
}

/** Sliding-window grid over the full file extent.
 *
 * Same rule as the back-end: windows start every `shift` seconds while the
 * start lies inside the extent, trailing windows are clipped, and an extent
 * shorter than the window yields exactly one segment.
 */

import { ScaleSpec } from "./types.js";

export function segmentExtent(extent: number, scale: ScaleSpec): Array<[number, number]> {
  if (extent <= 0) return [];
  if (scale.shift <= 0 || scale.shift > scale.window) {
    throw new Error(`bad scale: window ${scale.window}, shift ${scale.shift}`);
  }
  if (extent < scale.window - 1e-9) {
    return [[0, extent]];
  }
  const out: Array<[number, number]> = [];
  for (let k = 0; ; k++) {
    const start = k * scale.shift;
    if (start >= extent - 1e-9) break;
    out.push([start, Math.min(start + scale.window, extent)]);
  }
  return out;
}

export function parseScaleList(text: string): ScaleSpec[] {
  const scales = text.split(",").map((part) => {
    const [w, s] = part.split(":").map(Number);
    if (!isFinite(w) || !isFinite(s)) {
      throw new Error(`bad scale entry '${part}', expected window:shift`);
    }
    return { window: w, shift: s };
  });
  if (scales.length === 0) throw new Error("scale list must be nonempty");
  return scales;
}

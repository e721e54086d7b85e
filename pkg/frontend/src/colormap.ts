/** Viridis-style colormap from a small anchor table, linearly interpolated. */

import type { Color } from "./raster.js";

const ANCHORS: Color[] = [
  [68, 1, 84],
  [71, 44, 122],
  [59, 81, 139],
  [44, 113, 142],
  [33, 144, 141],
  [39, 173, 129],
  [92, 200, 99],
  [170, 220, 50],
  [253, 231, 37],
];

/** t in [0, 1] -> RGB. */
export function viridis(t: number): Color {
  const clamped = Math.min(1, Math.max(0, t));
  const scaled = clamped * (ANCHORS.length - 1);
  const lo = Math.floor(scaled);
  const hi = Math.min(lo + 1, ANCHORS.length - 1);
  const frac = scaled - lo;
  return [0, 1, 2].map((i) =>
    Math.round(ANCHORS[lo][i] * (1 - frac) + ANCHORS[hi][i] * frac),
  ) as Color;
}

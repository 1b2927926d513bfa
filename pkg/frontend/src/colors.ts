// Viridis control points; perceptually uniform and colorblind-safe.
const VIRIDIS: Array<[number, number, number]> = [
  [68, 1, 84], [72, 40, 120], [62, 74, 137], [49, 104, 142],
  [38, 130, 142], [31, 158, 137], [53, 183, 121], [109, 205, 89],
  [180, 222, 44], [253, 231, 37],
];

// 12 distinguishable categorical hues (tableau-style).
export const CATEGORY_COLORS = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
  "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
];

export const MAX_PIE_SLICES = 12;

/** Map t in [0,1] onto the continuous colormap. */
export function continuousColor(t: number): string {
  const clamped = Math.min(1, Math.max(0, t));
  const pos = clamped * (VIRIDIS.length - 1);
  const i = Math.min(Math.floor(pos), VIRIDIS.length - 2);
  const f = pos - i;
  const mix = (a: number, b: number) => Math.round(a + (b - a) * f);
  const [r1, g1, b1] = VIRIDIS[i];
  const [r2, g2, b2] = VIRIDIS[i + 1];
  return `rgb(${mix(r1, r2)},${mix(g1, g2)},${mix(b1, b2)})`;
}

export interface PieSlice {
  label: string;
  count: number;
  color: string;
}

/** Slices sorted by count (desc), capped: smaller categories merge into
 * "other" so a node never draws more than MAX_PIE_SLICES wedges. colorOf
 * keeps a label's hue consistent across nodes. */
export function pieSlices(composition: Record<string, number>,
                          colorOf?: Map<string, string>): PieSlice[] {
  const entries = Object.entries(composition)
    .sort((a, b) => b[1] - a[1] || a[0].localeCompare(b[0]));
  let kept = entries;
  let other = 0;
  if (entries.length > MAX_PIE_SLICES) {
    kept = entries.slice(0, MAX_PIE_SLICES - 1);
    other = entries.slice(MAX_PIE_SLICES - 1).reduce((s, e) => s + e[1], 0);
  }
  const slices = kept.map(([label, count], i) => ({
    label,
    count,
    color: colorOf?.get(label) ?? CATEGORY_COLORS[i % CATEGORY_COLORS.length],
  }));
  if (other > 0) slices.push({ label: "other", count: other, color: "#999999" });
  return slices;
}

/** Stable color per label across all nodes: rank by total count. */
export function labelColorIndex(
  compositions: Array<Record<string, number>>): Map<string, string> {
  const totals = new Map<string, number>();
  for (const comp of compositions) {
    for (const [label, count] of Object.entries(comp)) {
      totals.set(label, (totals.get(label) ?? 0) + count);
    }
  }
  const ranked = [...totals.entries()]
    .sort((a, b) => b[1] - a[1] || a[0].localeCompare(b[0]));
  const map = new Map<string, string>();
  ranked.forEach(([label], i) => {
    map.set(label, CATEGORY_COLORS[i % CATEGORY_COLORS.length]);
  });
  return map;
}

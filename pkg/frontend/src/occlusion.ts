/** Label occlusion: when two labels would overlap, the heavier term wins. */

export interface LabelBox {
  id: number;
  weight: number;
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

function intersects(a: LabelBox, b: LabelBox): boolean {
  return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

/** Ids whose labels are shown: greedy placement by descending weight
 * (ties by id), skipping any label that collides with one already placed. */
export function resolveLabelOcclusion(boxes: LabelBox[]): Set<number> {
  const ranked = [...boxes].sort((a, b) => b.weight - a.weight || a.id - b.id);
  const placed: LabelBox[] = [];
  const shown = new Set<number>();
  for (const box of ranked) {
    if (placed.every((p) => !intersects(p, box))) {
      placed.push(box);
      shown.add(box.id);
    }
  }
  return shown;
}

/** Glyph radius: strictly increasing in weight. */
export function glyphRadius(weight: number, maxWeight: number, rMin = 3, rMax = 16): number {
  if (weight <= 0 || maxWeight <= 0) return rMin;
  return rMin + (rMax - rMin) * Math.sqrt(weight / maxWeight);
}

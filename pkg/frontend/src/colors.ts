import type { CurationTag } from './types.js';

/** Impact color ramp: blue at 0, green at 1, red at 2 and above. */
export function impactColor(score: number): string {
  if (score < 0) throw new Error(`impact score must be nonnegative, got ${score}`);
  let r: number, g: number, b: number;
  if (score <= 1) {
    r = 0;
    g = Math.round(255 * score);
    b = Math.round(255 * (1 - score));
  } else {
    const t = Math.min(score, 2) - 1;
    r = Math.round(255 * t);
    g = Math.round(255 * (1 - t));
    b = 0;
  }
  const hex = (v: number) => v.toString(16).padStart(2, '0');
  return `#${hex(r)}${hex(g)}${hex(b)}`;
}

/** Curation mode: accepted terms green, rejected red, undecided neutral gray. */
export function curationColor(tag: CurationTag): string {
  switch (tag) {
    case 'EPS':
      return '#2e9e4f';
    case 'NOT_EPS':
      return '#d3382c';
    default:
      return '#9aa0a6';
  }
}

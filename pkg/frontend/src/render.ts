/** Canvas renderer for the term map. */

import { curationColor, impactColor } from './colors.js';
import { glyphRadius, resolveLabelOcclusion, type LabelBox } from './occlusion.js';
import { project, visibleTerms, type TermView } from './state.js';
import type { ColorMode, Viewport } from './types.js';

export interface RenderOptions {
  width: number;
  height: number;
  viewport: Viewport;
  colorMode: ColorMode;
  fitScale: number;
  selectedId: number | null;
}

export function termColor(term: TermView, mode: ColorMode): string {
  return mode === 'impact' ? impactColor(term.impact) : curationColor(term.tag);
}

export function renderMap(
  ctx: CanvasRenderingContext2D,
  terms: TermView[],
  options: RenderOptions,
): void {
  const { width, height, viewport, colorMode, fitScale, selectedId } = options;
  ctx.clearRect(0, 0, width, height);
  if (terms.length === 0) {
    ctx.fillStyle = '#666';
    ctx.font = '14px sans-serif';
    ctx.textAlign = 'center';
    ctx.fillText('No terms to show', width / 2, height / 2);
    return;
  }

  const maxWeight = Math.max(...terms.map((t) => t.weight));
  const shown = visibleTerms(terms, viewport.zoom);

  ctx.font = '11px sans-serif';
  ctx.textAlign = 'left';
  const boxes: LabelBox[] = [];
  const positions = new Map<number, [number, number, number]>();
  for (const term of shown) {
    const [px, py] = project(term.x, term.y, viewport, width, height, fitScale);
    const radius = glyphRadius(term.weight, maxWeight);
    positions.set(term.id, [px, py, radius]);
    const labelWidth = ctx.measureText(term.label).width;
    boxes.push({
      id: term.id,
      weight: term.weight,
      x0: px + radius + 2,
      y0: py - 12,
      x1: px + radius + 2 + labelWidth,
      y1: py + 2,
    });
  }
  const labeled = resolveLabelOcclusion(boxes);

  for (const term of [...shown].reverse()) {
    const [px, py, radius] = positions.get(term.id)!;
    ctx.beginPath();
    ctx.arc(px, py, radius, 0, Math.PI * 2);
    ctx.fillStyle = termColor(term, colorMode);
    ctx.globalAlpha = term.pending ? 0.5 : 0.85;
    ctx.fill();
    ctx.globalAlpha = 1.0;
    if (term.id === selectedId) {
      ctx.lineWidth = 2;
      ctx.strokeStyle = '#111';
      ctx.stroke();
    }
  }

  ctx.fillStyle = '#222';
  for (const term of shown) {
    if (!labeled.has(term.id)) continue;
    const [px, py, radius] = positions.get(term.id)!;
    ctx.fillText(term.label, px + radius + 2, py);
  }
}

/** The term whose glyph is nearest to a screen point, within tolerance. */
export function hitTest(
  terms: TermView[],
  px: number,
  py: number,
  options: RenderOptions,
): TermView | null {
  const { width, height, viewport, fitScale } = options;
  const maxWeight = Math.max(...terms.map((t) => t.weight), 1);
  let best: TermView | null = null;
  let bestDist = Infinity;
  for (const term of visibleTerms(terms, viewport.zoom)) {
    const [x, y] = project(term.x, term.y, viewport, width, height, fitScale);
    const radius = glyphRadius(term.weight, maxWeight);
    const dist = Math.hypot(x - px, y - py);
    if (dist <= radius + 4 && dist < bestDist) {
      best = term;
      bestDist = dist;
    }
  }
  return best;
}

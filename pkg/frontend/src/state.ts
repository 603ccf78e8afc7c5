/** Pure view-state logic for the curation console.
 *
 * The rendered state is always a function of (map payload, decision log,
 * viewport): replaying a recorded decision log over the same payload
 * reproduces the interactive end state exactly.
 */

import type { ApiTerm, CurationTag, MapPayload, TagDecision, Viewport } from './types.js';

export interface TermView extends ApiTerm {
  pending: boolean;
}

/** Last decision per term wins; unknown ids are ignored. */
export function replayDecisions(
  terms: ApiTerm[],
  decisions: TagDecision[],
): Map<number, CurationTag> {
  const known = new Set(terms.map((t) => t.id));
  const tags = new Map<number, CurationTag>();
  for (const term of terms) tags.set(term.id, term.tag);
  for (const decision of decisions) {
    if (known.has(decision.term_id)) tags.set(decision.term_id, decision.tag);
  }
  return tags;
}

export interface StatsReadout {
  total: number;
  eps: number;
  notEps: number;
  untagged: number;
  epsFraction: number;
  epsPercent: number;
}

/** Field statistics from the current tag state (no server round trip). */
export function computeStats(tags: Map<number, CurationTag>): StatsReadout {
  let eps = 0;
  let notEps = 0;
  for (const tag of tags.values()) {
    if (tag === 'EPS') eps += 1;
    else if (tag === 'NOT_EPS') notEps += 1;
  }
  const total = tags.size;
  const fraction = total === 0 ? 0 : eps / total;
  return {
    total,
    eps,
    notEps,
    untagged: total - eps - notEps,
    epsFraction: fraction,
    // rounded half away from zero, matching the server's display rule
    epsPercent: Math.floor(fraction * 100 + 0.5),
  };
}

/** How many terms are visible at a zoom level: a weight-rank cutoff that
 * only grows as the user zooms in. */
export function visibleCount(total: number, zoom: number, baseFraction = 0.15): number {
  if (total === 0) return 0;
  const fraction = Math.min(1, baseFraction * Math.max(1, zoom));
  const floor = Math.min(total, 20);
  return Math.max(floor, Math.min(total, Math.ceil(total * fraction)));
}

/** The top-weighted terms at this zoom; ties break on id so the visible
 * set at a higher zoom is always a superset of a lower one. */
export function visibleTerms<T extends { id: number; weight: number }>(
  terms: T[],
  zoom: number,
  baseFraction = 0.15,
): T[] {
  const ranked = [...terms].sort((a, b) => b.weight - a.weight || a.id - b.id);
  return ranked.slice(0, visibleCount(terms.length, zoom, baseFraction));
}

export interface QueuedMutation {
  decision: TagDecision;
  previous: CurationTag;
}

export type SendTag = (decision: TagDecision) => Promise<void>;

/** Thrown (or re-thrown) by the sender when the server is unreachable;
 * the mutation stays queued instead of being reverted. */
export class OfflineError extends Error {}

/** Client session: optimistic tag updates with server reconciliation.
 *
 * Mutations apply to the view immediately, enter a FIFO queue, and are
 * sent one at a time. A server rejection reverts that term to its value
 * before the failed decision; while offline the queue simply grows and
 * affected terms carry a pending indicator until a later flush succeeds.
 */
export class CurationSession {
  readonly payload: MapPayload;
  private tags: Map<number, CurationTag>;
  private appliedLog: TagDecision[] = [];
  private queue: QueuedMutation[] = [];
  private draining: Promise<void> | null = null;
  private send: SendTag;
  onChange: () => void = () => {};

  constructor(payload: MapPayload, send: SendTag, priorDecisions: TagDecision[] = []) {
    this.payload = payload;
    this.send = send;
    this.tags = replayDecisions(payload.terms, priorDecisions);
    this.appliedLog = [...priorDecisions];
  }

  tagOf(termId: number): CurationTag {
    const tag = this.tags.get(termId);
    if (tag === undefined) throw new Error(`unknown term ${termId}`);
    return tag;
  }

  isPending(termId: number): boolean {
    return this.queue.some((m) => m.decision.term_id === termId);
  }

  get pendingCount(): number {
    return this.queue.length;
  }

  /** The confirmed decision log; replaying it reproduces the confirmed state. */
  get log(): TagDecision[] {
    return [...this.appliedLog];
  }

  stats(): StatsReadout {
    return computeStats(this.tags);
  }

  terms(): TermView[] {
    return this.payload.terms.map((t) => ({
      ...t,
      tag: this.tags.get(t.id) ?? t.tag,
      pending: this.isPending(t.id),
    }));
  }

  /** Apply a tag optimistically and queue the server write. */
  tag(termId: number, tag: CurationTag, note = ''): void {
    const previous = this.tagOf(termId);
    this.tags.set(termId, tag);
    this.queue.push({ decision: { term_id: termId, tag, note }, previous });
    this.onChange();
    void this.flush();
  }

  /** Send queued mutations in order, one in flight at a time. Awaiting
   * flush always waits for the current drain to settle. */
  flush(): Promise<void> {
    if (!this.draining) {
      this.draining = this.drain().finally(() => {
        this.draining = null;
      });
    }
    return this.draining;
  }

  private async drain(): Promise<void> {
    while (this.queue.length > 0) {
      const next = this.queue[0];
      try {
        await this.send(next.decision);
      } catch (err) {
        if (err instanceof OfflineError) {
          // stay queued; a later flush retries in order
          this.onChange();
          return;
        }
        // server rejection: drop and revert just this mutation
        this.queue.shift();
        this.revert(next);
        this.onChange();
        return;
      }
      this.queue.shift();
      this.appliedLog.push(next.decision);
      this.onChange();
    }
  }

  private revert(failed: QueuedMutation): void {
    // later queued decisions for the same term stay queued; only rewind
    // the view if no newer decision supersedes the failed one
    const newer = this.queue.some((m) => m.decision.term_id === failed.decision.term_id);
    if (!newer && this.tags.get(failed.decision.term_id) === failed.decision.tag) {
      this.tags.set(failed.decision.term_id, failed.previous);
    }
  }
}

/** Screen transform: pan and zoom preserve relative distances. */
export function project(
  x: number,
  y: number,
  viewport: Viewport,
  width: number,
  height: number,
  fitScale: number,
): [number, number] {
  const scale = fitScale * viewport.zoom;
  return [
    (x - viewport.centerX) * scale + width / 2,
    (y - viewport.centerY) * scale + height / 2,
  ];
}

export function unproject(
  px: number,
  py: number,
  viewport: Viewport,
  width: number,
  height: number,
  fitScale: number,
): [number, number] {
  const scale = fitScale * viewport.zoom;
  return [
    (px - width / 2) / scale + viewport.centerX,
    (py - height / 2) / scale + viewport.centerY,
  ];
}

/** Scale that fits the whole map into the canvas at zoom 1. */
export function fitScale(
  terms: { x: number; y: number }[],
  width: number,
  height: number,
  margin = 40,
): number {
  if (terms.length === 0) return 1;
  const xs = terms.map((t) => t.x);
  const ys = terms.map((t) => t.y);
  const spanX = Math.max(...xs) - Math.min(...xs);
  const spanY = Math.max(...ys) - Math.min(...ys);
  const span = Math.max(spanX, spanY, 1e-9);
  return (Math.min(width, height) - 2 * margin) / span;
}

/** Synonym helper: lexically similar terms share tokens ('mri scan' vs
 * 'mri'). Advisory only; the expert decides. */

export function tokenize(label: string): Set<string> {
  return new Set(
    label
      .toLowerCase()
      .split(/[\s\-_/]+/)
      .filter((t) => t.length > 0),
  );
}

export interface SimilarTerm {
  id: number;
  label: string;
  shared: number;
}

export function similarTerms(
  selected: { id: number; label: string },
  all: { id: number; label: string }[],
  limit = 8,
): SimilarTerm[] {
  const reference = tokenize(selected.label);
  const scored: SimilarTerm[] = [];
  for (const term of all) {
    if (term.id === selected.id) continue;
    const tokens = tokenize(term.label);
    let shared = 0;
    for (const tok of tokens) if (reference.has(tok)) shared += 1;
    if (shared > 0) scored.push({ id: term.id, label: term.label, shared });
  }
  scored.sort((a, b) => b.shared - a.shared || a.label.localeCompare(b.label));
  return scored.slice(0, limit);
}

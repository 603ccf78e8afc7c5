"""Term extraction, co-occurrence networks, map layout, and impact coloring.

Terms are stopword-delimited word sequences of one to four words taken from
lowercased titles and abstracts, counted at most once per publication. The
most relevant candidates are selected by the divergence of a term's
co-occurrence profile from the corpus-wide term distribution, positioned by
minimizing the similarity-weighted sum of squared distances under a unit
mean-distance constraint, and colored by average normalized citation impact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from . import kernels
from .corpus import CorpusStore, Publication, normalized_citation_score

_SEGMENT_SPLIT = re.compile(r"[.,;:!?()\[\]{}<>\"/|]+")
_TOKEN = re.compile(r"[a-z0-9]+(?:[-'][a-z0-9]+)*")
_NUMERIC = re.compile(r"[0-9]+$")


class CurationTag(str, Enum):
    EPS = "EPS"
    NOT_EPS = "NOT_EPS"
    UNTAGGED = "UNTAGGED"


def load_default_stopwords() -> frozenset[str]:
    path = Path(__file__).parent / "data" / "stopwords_en.txt"
    words = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


def candidate_terms(text: str, stopwords: frozenset[str], max_len: int = 4) -> set[str]:
    """Distinct candidate terms of one publication text.

    Stopwords, bare numbers, and punctuation delimit runs; every contiguous
    word sequence of length 1..max_len inside a run is a candidate.
    Single-character candidates are discarded as noise.
    """
    found: set[str] = set()
    for segment in _SEGMENT_SPLIT.split(text.lower()):
        run: list[str] = []
        tokens = _TOKEN.findall(segment)
        tokens.append("")  # sentinel flushes the last run
        for tok in tokens:
            if not tok or tok in stopwords or _NUMERIC.match(tok):
                for i in range(len(run)):
                    for j in range(i + 1, min(i + max_len, len(run)) + 1):
                        term = " ".join(run[i:j])
                        if len(term) > 1:
                            found.add(term)
                run = []
            else:
                run.append(tok)
    return found


@dataclass(frozen=True)
class TermEntry:
    term: str
    doc_frequency: int
    occurrences: frozenset[str]
    relevance: float


@dataclass(frozen=True)
class TermCatalog:
    """Selected terms (by relevance rank) plus the full candidate pool."""

    entries: tuple[TermEntry, ...]
    candidates: tuple[TermEntry, ...]
    selection_size: int | None
    min_doc_frequency: int

    def __len__(self) -> int:
        return len(self.entries)

    def terms(self) -> list[str]:
        return [e.term for e in self.entries]


def auto_min_doc_frequency(n_pubs: int) -> int:
    """Default threshold: 10 for large corpora, scaled down for desk corpora."""
    return max(3, min(10, n_pubs // 1000))


def _binary_incidence(occurrence_lists: Sequence[frozenset[str]], doc_index: dict[str, int]) -> sparse.csr_matrix:
    rows, cols = [], []
    for t, occ in enumerate(occurrence_lists):
        for doc in sorted(occ):
            rows.append(doc_index[doc])
            cols.append(t)
    data = np.ones(len(rows), dtype=np.int64)
    return sparse.csr_matrix((data, (rows, cols)),
                             shape=(len(doc_index), len(occurrence_lists)), dtype=np.int64)


def _cooccurrence_counts(occurrence_lists: Sequence[frozenset[str]], docs: Sequence[str]) -> sparse.csr_matrix:
    doc_index = {d: i for i, d in enumerate(docs)}
    inc = _binary_incidence(occurrence_lists, doc_index)
    counts = (inc.T @ inc).tocsr()
    counts.setdiag(0)
    counts.eliminate_zeros()
    return counts


def _relevance_scores(counts: sparse.csr_matrix) -> np.ndarray:
    """Divergence of each term's co-occurrence profile from the overall
    term distribution; terms that co-occur indiscriminately score near zero."""
    s = np.asarray(counts.sum(axis=1)).ravel().astype(np.float64)
    total = float(s.sum())
    k = counts.shape[0]
    scores = np.zeros(k, dtype=np.float64)
    if total == 0.0:
        return scores
    coo = counts.tocoo()
    c = coo.data.astype(np.float64)
    contrib = c * np.log(c * total / (s[coo.row] * s[coo.col]))
    np.add.at(scores, coo.row, contrib)
    nonzero = s > 0
    scores[nonzero] /= s[nonzero]
    return scores


def extract_terms(pubs: Iterable[Publication], selection_size: int | None = 2000,
                  *, min_doc_frequency: int | None = None,
                  stopwords: frozenset[str] | None = None,
                  max_len: int = 4) -> TermCatalog:
    """Extract candidate terms and select the most relevant ones.

    ``selection_size=None`` keeps every candidate (used for topic labeling).
    Candidates below the minimum document frequency are dropped. Selection
    ranks by relevance, breaking ties by document frequency then
    alphabetically.
    """
    pubs = sorted(pubs, key=lambda p: p.id)
    if not pubs:
        raise ValueError("empty publication set")
    if all(not p.text.strip() for p in pubs):
        raise ValueError("no text in publication set")
    stopwords = stopwords if stopwords is not None else load_default_stopwords()

    occurrences: dict[str, set[str]] = {}
    for pub in pubs:
        for term in candidate_terms(pub.text, stopwords, max_len):
            occurrences.setdefault(term, set()).add(pub.id)

    min_df = min_doc_frequency if min_doc_frequency is not None else auto_min_doc_frequency(len(pubs))
    kept = sorted(t for t, occ in occurrences.items() if len(occ) >= min_df)
    if not kept:
        raise ValueError(
            f"no candidate term reaches the minimum document frequency {min_df}")

    occ_lists = [frozenset(occurrences[t]) for t in kept]
    counts = _cooccurrence_counts(occ_lists, [p.id for p in pubs])
    relevance = _relevance_scores(counts)

    candidates = tuple(
        TermEntry(term=t, doc_frequency=len(occ_lists[i]), occurrences=occ_lists[i],
                  relevance=float(relevance[i]))
        for i, t in enumerate(kept)
    )
    ranked = sorted(candidates, key=lambda e: (-e.relevance, -e.doc_frequency, e.term))
    selected = ranked if selection_size is None else ranked[:selection_size]
    return TermCatalog(entries=tuple(selected), candidates=candidates,
                       selection_size=selection_size, min_doc_frequency=min_df)


def cooccurrence_counts(catalog: TermCatalog) -> sparse.csr_matrix:
    """Publication-level co-occurrence counts over the selected terms."""
    docs = sorted({d for e in catalog.entries for d in e.occurrences})
    return _cooccurrence_counts([e.occurrences for e in catalog.entries], docs)


def association_strength(counts: sparse.csr_matrix) -> sparse.csr_matrix:
    """Similarity w_ij = c_ij * T / (s_i * s_j) with s the per-term
    co-occurrence totals and T their overall sum."""
    s = np.asarray(counts.sum(axis=1)).ravel().astype(np.float64)
    total = float(s.sum())
    coo = counts.tocoo()
    if total == 0.0:
        data = np.zeros(len(coo.data), dtype=np.float64)
    else:
        data = coo.data.astype(np.float64) * total / (s[coo.row] * s[coo.col])
    out = sparse.csr_matrix((data, (coo.row, coo.col)), shape=counts.shape)
    out.eliminate_zeros()
    return out


def cooccurrence(catalog: TermCatalog) -> sparse.csr_matrix:
    """Association-strength similarity matrix over the selected terms."""
    return association_strength(cooccurrence_counts(catalog))


@dataclass(frozen=True)
class LayoutResult:
    positions: np.ndarray
    objective: float
    trace: np.ndarray
    start_index: int


def _as_sym_csr(similarities) -> sparse.csr_matrix:
    if sparse.issparse(similarities):
        mat = similarities.tocsr().astype(np.float64)
    else:
        mat = sparse.csr_matrix(np.asarray(similarities, dtype=np.float64))
    if mat.shape[0] != mat.shape[1]:
        raise ValueError("similarity matrix must be square")
    if (mat != mat.T).nnz != 0:
        raise ValueError("similarity matrix must be symmetric")
    if mat.nnz and mat.data.min() < 0:
        raise ValueError("similarities must be nonnegative")
    mat = mat.copy()
    mat.setdiag(0)
    mat.eliminate_zeros()
    return mat


def _descend(X: np.ndarray, kern, indptr, indices, weights, pair_count: float,
             iters: int, tol: float) -> tuple[np.ndarray, float, list[float]]:
    """Backtracking gradient descent on the scale-invariant ratio V/D^2.

    Positions are recentered and rescaled to mean pairwise distance 1 after
    every accepted step, so the recorded objective is the constrained V.
    """
    X = X - X.mean(axis=0)
    v, d = kern.vos_energy(X, indptr, indices, weights)
    if d > 0.0:
        f = pair_count / d
        X = X * f
        v, d = v * f * f, pair_count
    g_val = v / (d * d)
    trace = [v]
    step = None
    for _ in range(iters):
        grad = np.asarray(kern.vos_grad(X, indptr, indices, weights, v, d))
        gnorm2 = float(np.sum(grad * grad))
        if gnorm2 <= 1e-300:
            break
        if step is None:
            # first move of the order of the configuration's own scale;
            # a fixed step would vanish against the 1/D^2 gradient factor
            step = float(np.sqrt(np.sum(X * X) / gnorm2))
        accepted = False
        while step >= 1e-16:
            xn = X - step * grad
            vn, dn = kern.vos_energy(xn, indptr, indices, weights)
            gn = vn / (dn * dn)
            if gn <= g_val - 1e-4 * step * gnorm2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        f = pair_count / dn
        X = (xn - xn.mean(axis=0)) * f
        v, d = vn * f * f, pair_count
        prev = g_val
        g_val = gn
        assert v <= trace[-1] * (1.0 + 1e-12) + 1e-12, "layout objective increased"
        trace.append(v)
        step *= 2.0
        if prev - g_val <= tol * max(abs(prev), 1e-30):
            break
    return X, v, trace


def canonicalize_positions(X: np.ndarray, weights: np.ndarray | None = None) -> np.ndarray:
    """Center on the origin, align the principal axis horizontally, and fix
    both reflections: an axis flips when its weighted third moment is
    negative. Rigid-equivalent inputs map to the same output."""
    X = X - X.mean(axis=0)
    w = np.ones(len(X)) if weights is None else np.asarray(weights, dtype=np.float64)
    cxx = float(np.dot(X[:, 0], X[:, 0]))
    cyy = float(np.dot(X[:, 1], X[:, 1]))
    cxy = float(np.dot(X[:, 0], X[:, 1]))
    theta = 0.5 * np.arctan2(2.0 * cxy, cxx - cyy)
    c, s = np.cos(theta), np.sin(theta)
    rotated = np.column_stack([X[:, 0] * c + X[:, 1] * s,
                               -X[:, 0] * s + X[:, 1] * c])
    if float(np.dot(w, rotated[:, 0] ** 3)) < 0.0:
        rotated[:, 0] = -rotated[:, 0]
    if float(np.dot(w, rotated[:, 1] ** 3)) < 0.0:
        rotated[:, 1] = -rotated[:, 1]
    return rotated


def layout_detail(similarities, seed: int, iters: int = 500, *,
                  random_starts: int = 10, tol: float = 1e-10,
                  weights: np.ndarray | None = None,
                  backend: str | None = None) -> LayoutResult:
    """Seeded layout minimizing sum(w_ij * d_ij^2) with mean pairwise
    distance fixed at 1; the best of ``random_starts`` descents wins."""
    mat = _as_sym_csr(similarities)
    n = mat.shape[0]
    if n < 2:
        raise ValueError("layout needs at least 2 terms")
    kern = kernels.get_backend(backend)
    indptr = mat.indptr.astype(np.int64)
    indices = mat.indices.astype(np.int64)
    data = mat.data.astype(np.float64)
    pair_count = n * (n - 1) / 2.0

    best: tuple[float, int, np.ndarray, list[float]] | None = None
    seeds = np.random.SeedSequence(seed).spawn(random_starts)
    for s_i in range(random_starts):
        rng = np.random.default_rng(seeds[s_i])
        x0 = rng.standard_normal((n, 2))
        x, v, trace = _descend(x0, kern, indptr, indices, data, pair_count, iters, tol)
        if best is None or v < best[0]:
            best = (v, s_i, x, trace)
    v, s_i, x, trace = best
    positions = canonicalize_positions(x, weights)
    return LayoutResult(positions=positions, objective=float(v),
                        trace=np.array(trace), start_index=s_i)


def layout(similarities, seed: int, iters: int = 500, **kwargs) -> np.ndarray:
    return layout_detail(similarities, seed, iters, **kwargs).positions


def layout_objective(X: np.ndarray, similarities, backend: str | None = None) -> float:
    """Objective value of a configuration (invariant under rigid motion)."""
    mat = _as_sym_csr(similarities)
    kern = kernels.get_backend(backend)
    v, _ = kern.vos_energy(np.asarray(X, dtype=np.float64),
                           mat.indptr.astype(np.int64),
                           mat.indices.astype(np.int64),
                           mat.data.astype(np.float64))
    return float(v)


def mean_pairwise_distance(X: np.ndarray, backend: str | None = None) -> float:
    n = len(X)
    if n < 2:
        raise ValueError("need at least 2 points")
    kern = kernels.get_backend(backend)
    empty = sparse.csr_matrix((n, n), dtype=np.float64)
    _, d = kern.vos_energy(np.asarray(X, dtype=np.float64),
                           empty.indptr.astype(np.int64),
                           empty.indices.astype(np.int64),
                           empty.data.astype(np.float64))
    return float(d) / (n * (n - 1) / 2.0)


def score_terms(catalog: TermCatalog, store: CorpusStore) -> np.ndarray:
    """Mean normalized citation score over each term's occurrence set."""
    out = np.zeros(len(catalog.entries), dtype=np.float64)
    for i, entry in enumerate(catalog.entries):
        if not entry.occurrences:
            raise ValueError(f"term {entry.term!r} has an empty occurrence set")
        vals = [normalized_citation_score(pid, store) for pid in sorted(entry.occurrences)]
        out[i] = sum(vals) / len(vals)
    return out


def color_scale(score: float) -> tuple[int, int, int]:
    """Blue at 0, green at 1, red at 2 and above, linear in between."""
    if score < 0:
        raise ValueError(f"impact score must be nonnegative, got {score}")
    if score <= 1.0:
        t = score
        return (0, int(round(255 * t)), int(round(255 * (1.0 - t))))
    t = min(score, 2.0) - 1.0
    return (int(round(255 * t)), int(round(255 * (1.0 - t))), 0)


def color_hex(score: float) -> str:
    r, g, b = color_scale(score)
    return f"#{r:02x}{g:02x}{b:02x}"


@dataclass(frozen=True)
class MapTerm:
    id: int
    label: str
    x: float
    y: float
    weight: int
    impact: float
    tag: CurationTag = CurationTag.UNTAGGED


@dataclass(frozen=True)
class TermMap:
    terms: tuple[MapTerm, ...]

    def __len__(self) -> int:
        return len(self.terms)

    def with_tags(self, tags: dict[int, CurationTag]) -> "TermMap":
        return TermMap(terms=tuple(
            MapTerm(t.id, t.label, t.x, t.y, t.weight, t.impact, tags.get(t.id, t.tag))
            for t in self.terms))


def build_term_map(catalog: TermCatalog, positions: np.ndarray, impacts: np.ndarray) -> TermMap:
    """Assemble the map rows; ids are 1-based in catalog order."""
    if len(positions) != len(catalog.entries) or len(impacts) != len(catalog.entries):
        raise ValueError("positions/impacts must align with catalog entries")
    terms = tuple(
        MapTerm(id=i + 1, label=e.term, x=float(positions[i, 0]), y=float(positions[i, 1]),
                weight=e.doc_frequency, impact=float(impacts[i]))
        for i, e in enumerate(catalog.entries))
    return TermMap(terms=terms)

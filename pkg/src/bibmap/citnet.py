"""Citation graph construction, topic clustering, and theme aggregation.

Clustering maximizes the pairwise quality Q = sum over within-cluster node
pairs of (w_ij - gamma) by seeded iterated local moving with a refinement
and aggregation cycle, then repairs undersized clusters by strongest-link
merging. Results are deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .corpus import CorpusStore

RESIDUAL_TOPIC = -1


@dataclass(frozen=True)
class CitationGraph:
    """Undirected weighted graph in CSR form over canonically sorted ids."""

    ids: tuple[Hashable, ...]
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index_of", {v: i for i, v in enumerate(self.ids)})

    def __repr__(self) -> str:
        return f"CitationGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"

    @property
    def n_nodes(self) -> int:
        return len(self.ids)

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    def total_weight(self) -> float:
        return float(self.weights.sum()) / 2.0

    def strength(self, node: Hashable) -> float:
        i = self._index_of[node]
        return float(self.weights[self.indptr[i]:self.indptr[i + 1]].sum())

    def edge_list(self) -> list[tuple[Hashable, Hashable, float]]:
        """Each undirected edge once, endpoints in canonical order."""
        out = []
        for i in range(self.n_nodes):
            for e in range(self.indptr[i], self.indptr[i + 1]):
                j = int(self.indices[e])
                if i < j:
                    out.append((self.ids[i], self.ids[j], float(self.weights[e])))
        return out

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[Hashable, Hashable, float]],
                   nodes: Iterable[Hashable] = ()) -> "CitationGraph":
        """Coalesce parallel edges by weight sum; self-loops are rejected."""
        acc: dict[tuple[Hashable, Hashable], float] = {}
        node_set = set(nodes)
        for a, b, w in edges:
            if a == b:
                raise ValueError(f"self-loop on {a!r}")
            if w <= 0:
                raise ValueError(f"non-positive edge weight {w!r} on ({a!r}, {b!r})")
            node_set.add(a)
            node_set.add(b)
            key = (a, b) if a < b else (b, a)
            acc[key] = acc.get(key, 0.0) + w
        ids = tuple(sorted(node_set))
        index = {v: i for i, v in enumerate(ids)}
        n = len(ids)
        deg = np.zeros(n, dtype=np.int64)
        pairs = sorted(((index[a], index[b]) for a, b in acc), key=lambda p: p)
        for a, b in pairs:
            deg[a] += 1
            deg[b] += 1
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = np.zeros(indptr[-1], dtype=np.int64)
        weights = np.zeros(indptr[-1], dtype=np.float64)
        cursor = indptr[:-1].copy()
        for (a, b) in pairs:
            w = acc[(ids[a], ids[b])]
            indices[cursor[a]] = b
            weights[cursor[a]] = w
            cursor[a] += 1
            indices[cursor[b]] = a
            weights[cursor[b]] = w
            cursor[b] += 1
        # neighbor lists ascending within each row (pairs sorted lexicographically)
        for i in range(n):
            lo, hi = indptr[i], indptr[i + 1]
            order = np.argsort(indices[lo:hi], kind="stable")
            indices[lo:hi] = indices[lo:hi][order]
            weights[lo:hi] = weights[lo:hi][order]
        return cls(ids=ids, indptr=indptr, indices=indices, weights=weights)


def build_graph(store: CorpusStore, weighting: str = "per-reference-normalized") -> CitationGraph:
    """Undirected citation graph over the whole store.

    ``unit`` adds weight 1 per citation relation; ``per-reference-normalized``
    spreads a total weight of 1 over each publication's references.
    """
    if weighting not in ("unit", "per-reference-normalized"):
        raise ValueError(f"unknown weighting {weighting!r}")
    if len(store) == 0:
        raise ValueError("empty store")
    edges: list[tuple[str, str, float]] = []
    for pid in store.sorted_ids():
        refs = sorted(store.pub(pid).references)
        if not refs:
            continue
        w = 1.0 if weighting == "unit" else 1.0 / len(refs)
        for ref in refs:
            edges.append((pid, ref, w))
    return CitationGraph.from_edges(edges, nodes=store.sorted_ids())


@dataclass(frozen=True)
class QualityParams:
    resolution: float
    min_cluster_size: int = 50
    seed: int = 0
    max_passes: int = 10

    def __post_init__(self) -> None:
        if self.resolution <= 0:
            raise ValueError(f"resolution must be positive, got {self.resolution}")
        if self.min_cluster_size < 1:
            raise ValueError(f"min_cluster_size must be >= 1, got {self.min_cluster_size}")
        if self.max_passes < 1:
            raise ValueError(f"max_passes must be >= 1, got {self.max_passes}")


@dataclass(frozen=True)
class TopicClustering:
    assignment: dict[Hashable, int]
    topics: dict[int, tuple[int, tuple[Hashable, ...]]]

    @property
    def residual(self) -> tuple[Hashable, ...]:
        return self.topics.get(RESIDUAL_TOPIC, (0, ()))[1]

    def topic_ids(self, include_residual: bool = False) -> list[int]:
        return [t for t in sorted(self.topics) if include_residual or t != RESIDUAL_TOPIC]

    def members(self, topic: int) -> tuple[Hashable, ...]:
        return self.topics[topic][1]

    def size(self, topic: int) -> int:
        return self.topics[topic][0]


def quality(graph: CitationGraph, assignment: Mapping[Hashable, int] | np.ndarray,
            resolution: float) -> float:
    """Q = sum over within-cluster pairs of (w_ij - resolution)."""
    if isinstance(assignment, Mapping):
        labels = np.array([assignment[v] for v in graph.ids], dtype=np.int64)
    else:
        labels = np.asarray(assignment, dtype=np.int64)
    return _quality_arrays(graph.indptr, graph.indices, graph.weights,
                           np.ones(graph.n_nodes, dtype=np.int64), labels, resolution)


def _quality_arrays(indptr, indices, weights, node_size, labels, resolution) -> float:
    n = len(node_size)
    if n == 0:
        return 0.0
    src = np.repeat(np.arange(n), np.diff(indptr))
    within = float(weights[labels[src] == labels[indices]].sum()) / 2.0
    compact = np.unique(labels, return_inverse=True)[1]
    totals = np.bincount(compact, weights=node_size)
    sq = np.bincount(compact, weights=node_size.astype(np.float64) ** 2)
    pairs = float((totals * totals - sq).sum()) / 2.0
    return within - resolution * pairs


def _compact(labels: np.ndarray) -> np.ndarray:
    return np.unique(labels, return_inverse=True)[1].astype(np.int64)


def _aggregate(indptr, indices, weights, node_size, groups):
    """Collapse nodes by group; drops internal edges, sums parallel ones."""
    k = int(groups.max()) + 1 if len(groups) else 0
    new_size = np.bincount(groups, weights=node_size, minlength=k).astype(np.int64)
    src = np.repeat(np.arange(len(node_size)), np.diff(indptr))
    gs, gd = groups[src], groups[indices]
    mask = gs != gd
    key = gs[mask] * k + gd[mask]
    uniq, inverse = np.unique(key, return_inverse=True)
    sums = np.zeros(len(uniq), dtype=np.float64)
    np.add.at(sums, inverse, weights[mask])
    new_src = (uniq // k).astype(np.int64)
    new_dst = (uniq % k).astype(np.int64)
    counts = np.bincount(new_src, minlength=k)
    new_indptr = np.zeros(k + 1, dtype=np.int64)
    np.cumsum(counts, out=new_indptr[1:])
    return new_indptr, new_dst, sums, new_size


def _one_cycle(indptr, indices, weights, init, resolution, rng, kern):
    """Local moving with refinement and aggregation until exhaustion.

    Returns a flat assignment over the original nodes. Quality never
    decreases across local-moving passes (asserted per pass).
    """
    assign = _compact(np.asarray(init, dtype=np.int64))
    node_size = np.ones(len(assign), dtype=np.int64)
    level = (indptr, indices, weights)
    maps: list[np.ndarray] = []

    while True:
        n_level = len(node_size)
        zeros = np.zeros(n_level, dtype=np.int64)
        csize = np.bincount(assign, weights=node_size, minlength=n_level).astype(np.int64)
        order = rng.permutation(n_level).astype(np.int64)
        q_before = _quality_arrays(*level, node_size, assign, resolution)
        kern.local_move(level[0], level[1], level[2], node_size, assign, csize,
                        order, resolution, zeros)
        q_after = _quality_arrays(*level, node_size, assign, resolution)
        assert q_after >= q_before - 1e-9, "local moving decreased quality"

        if len(np.unique(assign)) == n_level:
            break

        # constrained moving from singletons splits clusters into cohesive parts
        sub = np.arange(n_level, dtype=np.int64)
        sub_csize = node_size.copy()
        order2 = rng.permutation(n_level).astype(np.int64)
        kern.local_move(level[0], level[1], level[2], node_size, sub, sub_csize,
                        order2, resolution, assign)
        groups = _compact(sub)
        k_groups = int(groups.max()) + 1
        if k_groups == n_level:
            break

        new_indptr, new_indices, new_weights, new_size = _aggregate(
            *level, node_size, groups)
        # each refined group inherits its parent cluster
        first_member = np.zeros(k_groups, dtype=np.int64)
        first_member[groups[::-1]] = np.arange(n_level - 1, -1, -1)
        new_assign = _compact(assign[first_member])

        maps.append(groups)
        level = (new_indptr, new_indices, new_weights)
        node_size = new_size
        assign = new_assign

    flat = assign
    for groups in reversed(maps):
        flat = flat[groups]
    return _compact(flat)


def _optimize(graph: CitationGraph, params: QualityParams, kern) -> np.ndarray:
    rng = np.random.default_rng(np.random.PCG64(params.seed))
    n = graph.n_nodes
    arrays = (graph.indptr, graph.indices, graph.weights)
    node_size = np.ones(n, dtype=np.int64)

    best = np.arange(n, dtype=np.int64)
    best_q = _quality_arrays(*arrays, node_size, best, params.resolution)
    current = best
    for _ in range(params.max_passes):
        candidate = _one_cycle(*arrays, current, params.resolution, rng, kern)
        q = _quality_arrays(*arrays, node_size, candidate, params.resolution)
        if q > best_q + 1e-12:
            best, best_q = candidate, q
            current = candidate
        else:
            # stalled: restart from a fresh singleton state to escape the optimum
            current = np.arange(n, dtype=np.int64)
    return best


def _enforce_min_size(graph: CitationGraph, labels: np.ndarray, min_size: int) -> np.ndarray:
    """Merge undersized clusters into their strongest-linked cluster; clusters
    with no external links go to the residual topic."""
    labels = labels.copy()
    indptr, indices, weights = graph.indptr, graph.indices, graph.weights
    while True:
        active = labels >= 0
        if not active.any():
            break
        sizes = np.bincount(labels[active])
        undersized = [c for c in range(len(sizes)) if 0 < sizes[c] < min_size]
        if not undersized:
            break
        c = min(undersized, key=lambda t: (sizes[t], t))
        members = np.flatnonzero(labels == c)
        link = np.zeros(len(sizes), dtype=np.float64)
        for v in members:
            for e in range(indptr[v], indptr[v + 1]):
                t = labels[indices[e]]
                if t >= 0 and t != c:
                    link[t] += weights[e]
        if link.sum() == 0.0:
            labels[members] = RESIDUAL_TOPIC
        else:
            labels[members] = int(np.argmax(link))
    return labels


def _relabel_by_first_occurrence(labels: np.ndarray) -> np.ndarray:
    out = labels.copy()
    active = labels >= 0
    values = labels[active]
    if len(values) == 0:
        return out
    uniq, first = np.unique(values, return_index=True)
    order = np.argsort(first, kind="stable")
    lookup = np.zeros(int(uniq.max()) + 1, dtype=np.int64)
    lookup[uniq[order]] = np.arange(len(uniq), dtype=np.int64)
    out[active] = lookup[values]
    return out


def cluster(graph: CitationGraph, params: QualityParams, backend: str | None = None) -> TopicClustering:
    """Partition the graph into topics.

    Seeded and deterministic: the same (graph, params) always yields the
    same assignment. After optimization, clusters smaller than
    ``min_cluster_size`` are merged into their strongest-linked cluster;
    isolated undersized clusters land in the residual topic (id -1).
    """
    if graph.n_nodes == 0:
        raise ValueError("empty graph")
    kern = kernels.get_backend(backend)
    labels = _optimize(graph, params, kern)
    labels = _enforce_min_size(graph, labels, params.min_cluster_size)
    labels = _relabel_by_first_occurrence(labels)

    assignment = {graph.ids[i]: int(labels[i]) for i in range(graph.n_nodes)}
    topics: dict[int, tuple[int, tuple[Hashable, ...]]] = {}
    for t in sorted(set(labels.tolist())):
        members = tuple(graph.ids[i] for i in np.flatnonzero(labels == t))
        topics[int(t)] = (len(members), members)
    return TopicClustering(assignment=assignment, topics=topics)


@dataclass(frozen=True)
class TopicLinkMatrix:
    """Symmetric inter-topic edge weights; diagonal is zero by construction."""

    topic_ids: tuple[int, ...]
    links: dict[tuple[int, int], float]  # keys (s, t) with s < t

    def weight(self, s: int, t: int) -> float:
        if s == t:
            return 0.0
        key = (s, t) if s < t else (t, s)
        return self.links.get(key, 0.0)

    def submatrix(self, keep: Iterable[int]) -> "TopicLinkMatrix":
        keep_set = set(keep)
        return TopicLinkMatrix(
            topic_ids=tuple(t for t in self.topic_ids if t in keep_set),
            links={k: w for k, w in self.links.items() if k[0] in keep_set and k[1] in keep_set},
        )

    def to_graph(self) -> CitationGraph:
        edges = [(s, t, w) for (s, t), w in self.links.items() if w > 0]
        return CitationGraph.from_edges(edges, nodes=self.topic_ids)


def topic_link_matrix(clustering: TopicClustering, graph: CitationGraph) -> TopicLinkMatrix:
    """Total edge weight between members of distinct topics.

    The residual topic is excluded; it is not a research topic.
    """
    links: dict[tuple[int, int], float] = {}
    labels = np.array([clustering.assignment[v] for v in graph.ids], dtype=np.int64)
    for i in range(graph.n_nodes):
        s = int(labels[i])
        if s == RESIDUAL_TOPIC:
            continue
        for e in range(graph.indptr[i], graph.indptr[i + 1]):
            j = int(graph.indices[e])
            if j <= i:
                continue
            t = int(labels[j])
            if t == RESIDUAL_TOPIC or t == s:
                continue
            key = (s, t) if s < t else (t, s)
            links[key] = links.get(key, 0.0) + float(graph.weights[e])
    return TopicLinkMatrix(topic_ids=tuple(clustering.topic_ids()), links=links)


@dataclass(frozen=True)
class ThemeSet:
    theme_of: dict[int, int]
    labels: dict[int, str]
    merge_log: tuple[dict, ...]
    resolution: float | None = None

    def theme_ids(self) -> list[int]:
        return sorted(set(self.theme_of.values()))

    def topics_of(self, theme: int) -> list[int]:
        return sorted(t for t, th in self.theme_of.items() if th == theme)


def aggregate_themes(matrix: TopicLinkMatrix, target_k: int,
                     merges: Sequence[Sequence[int]] = (),
                     labels: Mapping[int, str] | None = None,
                     seed: int = 0, tolerance: int = 2,
                     backend: str | None = None) -> ThemeSet:
    """Cluster topics into about ``target_k`` groups, then apply manual merges.

    The resolution is found by bisection; if no resolution yields a count
    within ``tolerance`` of the target, the achievable range is reported.
    Merge directives name algorithmic cluster ids and are applied in order;
    the merged theme keeps the lowest involved id.
    """
    if target_k < 1:
        raise ValueError("target_k must be >= 1")
    graph = matrix.to_graph()
    if graph.n_nodes == 0:
        raise ValueError("empty topic link matrix")

    max_w = max((w for w in matrix.links.values()), default=1.0)
    lo, hi = 1e-12, max_w * 1.0000001 + 1e-12

    def count_at(gamma: float) -> tuple[int, TopicClustering]:
        params = QualityParams(resolution=gamma, min_cluster_size=1, seed=seed, max_passes=10)
        clustering = cluster(graph, params, backend=backend)
        return len(clustering.topic_ids(include_residual=True)), clustering

    k_lo, part_lo = count_at(lo)
    k_hi, part_hi = count_at(hi)
    best_k, best_part, best_gamma = (k_lo, part_lo, lo) if abs(k_lo - target_k) <= abs(k_hi - target_k) \
        else (k_hi, part_hi, hi)
    if k_lo <= target_k <= k_hi:
        for _ in range(64):
            if best_k == target_k:
                break
            mid = (lo + hi) / 2.0
            k_mid, part_mid = count_at(mid)
            if abs(k_mid - target_k) < abs(best_k - target_k):
                best_k, best_part, best_gamma = k_mid, part_mid, mid
            if k_mid < target_k:
                lo = mid
            elif k_mid > target_k:
                hi = mid
            else:
                break
    if abs(best_k - target_k) > tolerance:
        raise ValueError(
            f"cannot reach target_k={target_k}: achievable cluster counts range "
            f"from {k_lo} (lowest resolution) to {k_hi} (highest); closest found was {best_k}")

    theme_of = {int(t): best_part.assignment[t] for t in matrix.topic_ids}
    algorithmic_ids = sorted(set(theme_of.values()))

    merge_log: list[dict] = []
    current: dict[int, int] = {c: c for c in algorithmic_ids}
    for i, directive in enumerate(merges):
        named = [int(c) for c in directive]
        unknown = [c for c in named if c not in current]
        if unknown:
            raise ValueError(f"merge directive {i} names unknown cluster(s) {unknown}")
        if len(named) < 2:
            raise ValueError(f"merge directive {i} must name at least two clusters")
        targets = sorted({current[c] for c in named})
        new_id = targets[0]
        for c in current:
            if current[c] in targets:
                current[c] = new_id
        merge_log.append({"directive": i, "clusters": named, "theme": new_id})

    theme_of = {t: current[c] for t, c in theme_of.items()}

    final_labels: dict[int, str] = {}
    if labels:
        for raw_id, text in labels.items():
            c = int(raw_id)
            if c not in current:
                raise ValueError(f"label for unknown algorithmic cluster {c}")
            theme = current[c]
            if theme in final_labels and final_labels[theme] != text:
                raise ValueError(
                    f"conflicting labels for theme {theme}: {final_labels[theme]!r} vs {text!r}")
            final_labels[theme] = text
    for theme in sorted(set(theme_of.values())):
        final_labels.setdefault(theme, f"theme-{theme}")

    return ThemeSet(theme_of=theme_of, labels=final_labels, merge_log=tuple(merge_log),
                    resolution=best_gamma)

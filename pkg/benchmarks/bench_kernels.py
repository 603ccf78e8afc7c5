#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot paths on synthetic instances: queue-driven local moving
on a planted-partition citation graph, and the layout descent on a dense
term-similarity matrix. Clustering results must be bit-identical across
backends; layout objectives must agree to optimization tolerance.

Usage:
    python benchmarks/bench_kernels.py [--quick]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from bibmap import kernels
from bibmap.citnet import CitationGraph, QualityParams, cluster, quality
from bibmap.termmap import layout_detail


def planted_graph(n_nodes: int, n_blocks: int, p_in: float, p_out: float,
                  seed: int) -> CitationGraph:
    rng = np.random.default_rng(seed)
    block = rng.integers(0, n_blocks, size=n_nodes)
    edges = []
    # sample ~6 candidate partners per node instead of the full n^2 grid
    for i in range(n_nodes):
        same = np.flatnonzero(block == block[i])
        for j in rng.choice(n_nodes, size=6, replace=False):
            if j == i:
                continue
            p = p_in if block[j] == block[i] else p_out
            if rng.random() < p:
                edges.append((int(min(i, j)), int(max(i, j)), 1.0))
        if len(same) > 1:
            j = int(rng.choice(same))
            if j != i:
                edges.append((min(i, j), max(i, j), 1.0))
    return CitationGraph.from_edges(edges, nodes=range(n_nodes))


def bench_clustering(n_nodes: int, seed: int = 0) -> dict:
    graph = planted_graph(n_nodes, n_blocks=max(4, n_nodes // 300),
                          p_in=0.8, p_out=0.02, seed=seed)
    params = QualityParams(resolution=0.05, min_cluster_size=5, seed=seed, max_passes=5)
    out = {"nodes": graph.n_nodes, "edges": graph.n_edges}
    results = {}
    for backend in available_backends():
        start = time.perf_counter()
        clustering = cluster(graph, params, backend=backend)
        out[f"{backend}_s"] = time.perf_counter() - start
        results[backend] = clustering
        out[f"{backend}_q"] = quality(graph, clustering.assignment, params.resolution)
    if len(results) == 2:
        same = results["native"].assignment == results["pure"].assignment
        out["identical"] = same
        assert same, "backends disagree on the clustering"
    return out


def bench_layout(n_terms: int, seed: int = 0, iters: int = 200) -> dict:
    rng = np.random.default_rng(seed)
    w = np.zeros((n_terms, n_terms))
    for i in range(n_terms):
        for j in rng.choice(n_terms, size=8, replace=False):
            if i != j:
                w[i, j] = w[j, i] = rng.uniform(0.1, 1.0)
    out = {"terms": n_terms}
    objectives = {}
    for backend in available_backends():
        start = time.perf_counter()
        res = layout_detail(w, seed=seed, iters=iters, random_starts=3, backend=backend)
        out[f"{backend}_s"] = time.perf_counter() - start
        objectives[backend] = res.objective
        out[f"{backend}_obj"] = res.objective
    if len(objectives) == 2:
        rel = abs(objectives["native"] - objectives["pure"]) / max(objectives.values())
        out["obj_rel_diff"] = rel
    return out


def available_backends() -> list[str]:
    names = ["pure"]
    try:
        kernels.get_backend("native")
        names.insert(0, "native")
    except RuntimeError:
        pass
    return names


def fmt_row(label: str, row: dict) -> str:
    parts = [f"{label:<24}"]
    for key, value in row.items():
        if isinstance(value, float):
            parts.append(f"{key}={value:.3f}")
        else:
            parts.append(f"{key}={value}")
    return "  ".join(parts)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller instances")
    args = parser.parse_args()

    if "native" not in available_backends():
        print("note: compiled kernels not built; timing the pure backend only")

    cluster_sizes = [2_000, 10_000] if args.quick else [2_000, 10_000, 50_000]
    layout_sizes = [200, 500] if args.quick else [200, 500, 2_000]

    print("== clustering: local moving on planted-partition graphs ==")
    for n in cluster_sizes:
        print(fmt_row(f"graph n={n}", bench_clustering(n)))
    print()
    print("== layout: constrained descent on term similarity matrices ==")
    for n in layout_sizes:
        print(fmt_row(f"terms n={n}", bench_layout(n)))


if __name__ == "__main__":
    main()

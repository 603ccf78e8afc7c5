"""Pipeline configuration, stage orchestration, and run manifests.

Stages communicate only through artifacts on disk, so each command can run
in a separate process. The config hash covers the analysis parameters and
the corpus content digest, never filesystem paths, which keeps reruns into
different directories byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import platform
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__, formats, kernels
from .analytics import (EmergingCriteria, country_theme_table, emerging_topic_table,
                        theme_share_table, yearly_theme_series)
from .citnet import (CitationGraph, QualityParams, ThemeSet, TopicClustering,
                     aggregate_themes, build_graph, cluster, topic_link_matrix)
from .corpus import CorpusStore, DocType, FieldTaxonomy, IngestConfig, ingest_path
from .interface import InterfaceCriteria, select_interface_topics
from .labeling import label_topics
from .termmap import build_term_map, cooccurrence, extract_terms, layout_detail, score_terms


class PipelineError(RuntimeError):
    """A stage cannot run: bad configuration or missing upstream artifacts."""


@dataclass
class PipelineConfig:
    corpus: str
    output: str
    taxonomy: str | None = None
    year_min: int = 2001
    year_max: int = 2010
    census_year: int | None = None
    include_doc_types: tuple[str, ...] = ("article", "review")
    cohort_counting: str = "whole"
    weighting: str = "per-reference-normalized"
    resolution: float = 0.05
    min_cluster_size: int = 50
    max_passes: int = 10
    seed: int = 0
    selection_size: int = 2000
    min_doc_frequency: int | None = None
    layout_iters: int = 500
    layout_starts: int = 10
    eps_threshold: float = 0.34
    hls_threshold: float = 0.34
    counting: str = "whole"
    target_themes: int = 8
    merge_config: str | None = None
    emerging_growth_factor: float = 4.0
    emerging_first_year_max: int = 30
    emerging_last_year_min: int = 60
    country: str = "GB"
    impact_baseline: float = 0.10

    _HASH_EXCLUDED = ("corpus", "output", "taxonomy", "merge_config")

    @classmethod
    def from_file(cls, path: str | Path, overrides: dict | None = None) -> "PipelineConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.from_dict(data, overrides)

    @classmethod
    def from_dict(cls, data: dict, overrides: dict | None = None) -> "PipelineConfig":
        merged = dict(data)
        for key, value in (overrides or {}).items():
            if value is not None:
                merged[key] = value
        known = {f for f in cls.__dataclass_fields__ if not f.startswith("_")}
        unknown = set(merged) - known
        if unknown:
            raise PipelineError(f"unknown config keys: {sorted(unknown)}")
        if "include_doc_types" in merged:
            merged["include_doc_types"] = tuple(merged["include_doc_types"])
        try:
            return cls(**merged)
        except TypeError as exc:
            raise PipelineError(f"bad config: {exc}") from None

    def ingest_config(self) -> IngestConfig:
        return IngestConfig(
            year_min=self.year_min, year_max=self.year_max, census_year=self.census_year,
            include_doc_types=frozenset(DocType(t) for t in self.include_doc_types),
            cohort_counting=self.cohort_counting)

    def out_dir(self) -> Path:
        return Path(self.output)

    def corpus_sha256(self) -> str:
        try:
            digest = hashlib.sha256(Path(self.corpus).read_bytes()).hexdigest()
        except OSError as exc:
            raise PipelineError(f"cannot read corpus file {self.corpus}: {exc}") from None
        return digest

    def merge_directives(self) -> tuple[list[list[int]], dict[int, str]]:
        if not self.merge_config:
            return [], {}
        try:
            data = json.loads(Path(self.merge_config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise PipelineError(f"cannot read merge config: {exc}") from None
        merges = [list(map(int, m)) for m in data.get("merges", [])]
        labels = {int(k): str(v) for k, v in data.get("labels", {}).items()}
        return merges, labels

    def config_hash(self) -> str:
        payload = {k: v for k, v in asdict(self).items() if k not in self._HASH_EXCLUDED}
        payload["corpus_sha256"] = self.corpus_sha256()
        merges, labels = self.merge_directives()
        payload["merges"] = merges
        payload["labels"] = {str(k): v for k, v in labels.items()}
        blob = json.dumps(payload, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:12]

    def load_taxonomy(self) -> FieldTaxonomy:
        if self.taxonomy:
            return FieldTaxonomy.from_csv(self.taxonomy)
        return FieldTaxonomy.default()


def field_slug(field_code: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", field_code.lower()).strip("_")


def _write_manifest(cfg: PipelineConfig, command: str) -> None:
    out = cfg.out_dir()
    manifest = {
        "command": command,
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
        "corpus_file": Path(cfg.corpus).name,
        "corpus_sha256": cfg.corpus_sha256(),
        "kernel_backend": kernels.backend_name(),
        "versions": {
            "bibmap": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "artifacts": sorted(p.name for p in out.iterdir()
                            if p.is_file() and p.name != "run_manifest.json"),
    }
    formats.write_json_artifact(out / "run_manifest.json", manifest,
                                kind="manifest", **_meta(cfg))


def _meta(cfg: PipelineConfig) -> dict:
    return {"config_hash": cfg.config_hash(), "seed": cfg.seed}


def run_ingest(cfg: PipelineConfig) -> CorpusStore:
    out = cfg.out_dir()
    out.mkdir(parents=True, exist_ok=True)
    store = ingest_path(cfg.corpus, cfg.ingest_config())
    kept_edges = sum(len(p.references) for p in store.publications.values())
    years = sorted({p.year for p in store.publications.values()})
    summary = {
        "publications": len(store),
        "census_year": store.census_year,
        "years": years,
        "reference_edges": kept_edges,
        "field_codes": len({c for p in store.publications.values() for c in p.field_codes}),
        "corpus_sha256": cfg.corpus_sha256(),
    }
    formats.write_json_artifact(out / "ingest.json", summary, kind="ingest", **_meta(cfg))
    _write_manifest(cfg, "ingest")
    return store


def load_store(cfg: PipelineConfig) -> CorpusStore:
    """Rebuild the store; requires a prior successful ingest."""
    ingest_file = cfg.out_dir() / "ingest.json"
    if not ingest_file.exists():
        raise PipelineError("no ingest artifact found; run 'bibmap ingest' first")
    summary, _ = formats.read_json_artifact(ingest_file)
    if summary.get("corpus_sha256") != cfg.corpus_sha256():
        raise PipelineError("corpus file changed since ingest; re-run 'bibmap ingest'")
    return ingest_path(cfg.corpus, cfg.ingest_config())


def run_cluster(cfg: PipelineConfig) -> TopicClustering:
    store = load_store(cfg)
    graph = build_graph(store, cfg.weighting)
    params = QualityParams(resolution=cfg.resolution, min_cluster_size=cfg.min_cluster_size,
                           seed=cfg.seed, max_passes=cfg.max_passes)
    clustering = cluster(graph, params)
    formats.write_clustering_csv(cfg.out_dir() / "clustering.csv",
                                 clustering.assignment, **_meta(cfg))
    _write_manifest(cfg, "cluster")
    return clustering


def load_clustering(cfg: PipelineConfig) -> TopicClustering:
    path = cfg.out_dir() / "clustering.csv"
    if not path.exists():
        raise PipelineError("no clustering artifact found; run 'bibmap cluster' first")
    assignment, _ = formats.read_clustering_csv(path)
    topics: dict[int, tuple[int, tuple[str, ...]]] = {}
    groups: dict[int, list[str]] = {}
    for pid in sorted(assignment):
        groups.setdefault(assignment[pid], []).append(pid)
    for topic in sorted(groups):
        topics[topic] = (len(groups[topic]), tuple(groups[topic]))
    return TopicClustering(assignment=assignment, topics=topics)


def run_termmap(cfg: PipelineConfig, field_code: str) -> None:
    store = load_store(cfg)
    pubs = [p for p in store.publications.values() if field_code in p.field_codes]
    if not pubs:
        raise PipelineError(f"no publications carry field code {field_code!r}")
    catalog = extract_terms(pubs, cfg.selection_size, min_doc_frequency=cfg.min_doc_frequency)
    similarities = cooccurrence(catalog)
    weights = np.array([e.doc_frequency for e in catalog.entries], dtype=np.float64)
    result = layout_detail(similarities, seed=cfg.seed, iters=cfg.layout_iters,
                           random_starts=cfg.layout_starts, weights=weights)
    impacts = score_terms(catalog, store)
    term_map = build_term_map(catalog, result.positions, impacts)

    out = cfg.out_dir()
    slug = field_slug(field_code)
    formats.write_map_file(out / f"termmap_{slug}.map.txt", term_map,
                           kind="termmap", **_meta(cfg))
    coo = similarities.tocoo()
    edges = [(int(i) + 1, int(j) + 1, float(w))
             for i, j, w in zip(coo.row, coo.col, coo.data) if i < j]
    formats.write_network_file(out / f"termmap_{slug}.net.txt", edges,
                               kind="termnet", **_meta(cfg))
    formats.write_catalog_csv(out / f"termmap_{slug}.catalog.csv", catalog, **_meta(cfg))
    _write_manifest(cfg, "termmap")


def run_interface(cfg: PipelineConfig):
    store = load_store(cfg)
    clustering = load_clustering(cfg)
    taxonomy = cfg.load_taxonomy()
    criteria = InterfaceCriteria(eps_pub_threshold=cfg.eps_threshold,
                                 hls_citation_threshold=cfg.hls_threshold,
                                 counting=cfg.counting)
    report = select_interface_topics(clustering, store, taxonomy, criteria)
    out = cfg.out_dir()
    formats.write_interface_csv(out / "interface.csv", report.rows, **_meta(cfg))
    formats.write_json_artifact(out / "interface_summary.json", {
        "selected_topics": list(report.selected_ids),
        "interface_share": report.interface_share,
        "eps_threshold": criteria.eps_pub_threshold,
        "hls_threshold": criteria.hls_citation_threshold,
        "counting": criteria.counting,
    }, kind="interface-summary", **_meta(cfg))
    _write_manifest(cfg, "interface")
    return report


def load_interface_summary(cfg: PipelineConfig) -> dict:
    path = cfg.out_dir() / "interface_summary.json"
    if not path.exists():
        raise PipelineError("no interface artifact found; run 'bibmap interface' first")
    return formats.read_json_artifact(path)[0]


def run_themes(cfg: PipelineConfig) -> ThemeSet:
    store = load_store(cfg)
    clustering = load_clustering(cfg)
    summary = load_interface_summary(cfg)
    selected = [int(t) for t in summary["selected_topics"]]
    if not selected:
        raise PipelineError("no interface topics selected; nothing to aggregate")
    graph = build_graph(store, cfg.weighting)
    matrix = topic_link_matrix(clustering, graph).submatrix(selected)
    merges, labels = cfg.merge_directives()
    themes = aggregate_themes(matrix, cfg.target_themes, merges, labels, seed=cfg.seed)
    formats.write_json_artifact(cfg.out_dir() / "themes.json", {
        "theme_of": {str(t): th for t, th in sorted(themes.theme_of.items())},
        "labels": {str(t): lbl for t, lbl in sorted(themes.labels.items())},
        "merge_log": list(themes.merge_log),
    }, kind="themes", **_meta(cfg))
    _write_manifest(cfg, "themes")
    return themes


def load_themes(cfg: PipelineConfig) -> ThemeSet:
    path = cfg.out_dir() / "themes.json"
    if not path.exists():
        raise PipelineError("no themes artifact found; run 'bibmap themes' first")
    data, _ = formats.read_json_artifact(path)
    return ThemeSet(
        theme_of={int(t): int(th) for t, th in data["theme_of"].items()},
        labels={int(t): lbl for t, lbl in data["labels"].items()},
        merge_log=tuple(data["merge_log"]),
    )


def run_label(cfg: PipelineConfig) -> dict[int, list[str]]:
    store = load_store(cfg)
    clustering = load_clustering(cfg)
    catalog = extract_terms(store.publications.values(), selection_size=None,
                            min_doc_frequency=cfg.min_doc_frequency)
    labels = label_topics(clustering, catalog)
    as_lists = {t: list(lbl.terms) for t, lbl in labels.items()}
    formats.write_labels_csv(cfg.out_dir() / "labels.csv", as_lists, **_meta(cfg))
    _write_manifest(cfg, "label")
    return as_lists


def load_labels(cfg: PipelineConfig) -> dict[int, list[str]]:
    path = cfg.out_dir() / "labels.csv"
    if not path.exists():
        raise PipelineError("no labels artifact found; run 'bibmap label' first")
    _, rows, _ = formats.read_csv_artifact(path)
    return {int(r[0]): [t for t in r[1:6] if t] for r in rows}


def run_stats(cfg: PipelineConfig) -> None:
    store = load_store(cfg)
    clustering = load_clustering(cfg)
    themes = load_themes(cfg)
    labels = load_labels(cfg)
    summary = load_interface_summary(cfg)
    selected = [int(t) for t in summary["selected_topics"]]
    out = cfg.out_dir()
    meta = _meta(cfg)

    criteria = EmergingCriteria(
        first_year=cfg.year_min, last_year=cfg.year_max,
        growth_factor=cfg.emerging_growth_factor,
        first_year_max=cfg.emerging_first_year_max,
        last_year_min=cfg.emerging_last_year_min)
    emerging = emerging_topic_table(clustering, store, criteria, labels=labels,
                                    themes=themes, restrict_to=selected)
    formats.write_csv_artifact(
        out / "stats_emerging_topics.csv",
        ("topic_id", "label", "publications", "first_year_count", "last_year_count", "theme"),
        [(r["topic_id"], r["label"], r["publications"], r["first_year_count"],
          r["last_year_count"], r["theme"]) for r in emerging],
        kind="stats-emerging", **meta)

    shares = theme_share_table(themes, clustering)
    formats.write_csv_artifact(
        out / "stats_theme_shares.csv",
        ("theme_id", "label", "publications", "share"),
        shares, kind="stats-themes", **meta)

    country_rows = country_theme_table(themes, clustering, store, cfg.country,
                                       cfg.impact_baseline)
    formats.write_csv_artifact(
        out / "stats_country.csv",
        ("theme_id", "label", "country_share", "impact_score"),
        country_rows, kind="stats-country", **meta)

    series = yearly_theme_series(themes, clustering, store)
    years = list(range(cfg.year_min, cfg.year_max + 1))
    rows = []
    for theme in sorted(series):
        counts = series[theme]
        rows.append((theme, themes.labels[theme], *[counts.get(y, 0) for y in years]))
    formats.write_csv_artifact(
        out / "stats_yearly_series.csv",
        ("theme_id", "label", *[str(y) for y in years]),
        rows, kind="stats-series", **meta)
    _write_manifest(cfg, "stats")


def run_export(cfg: PipelineConfig) -> None:
    """Dump the citation graph as an integer edge list plus a node table."""
    store = load_store(cfg)
    graph = build_graph(store, cfg.weighting)
    out = cfg.out_dir()
    index = {pid: i + 1 for i, pid in enumerate(graph.ids)}
    formats.write_csv_artifact(out / "citation_nodes.csv", ("id", "pub_id"),
                               [(index[p], p) for p in graph.ids],
                               kind="graph-nodes", **_meta(cfg))
    edges = [(index[a], index[b], w) for a, b, w in graph.edge_list()]
    formats.write_network_file(out / "citation_graph.net.txt", edges,
                               kind="graph", **_meta(cfg))
    _write_manifest(cfg, "export")


def load_graph_dump(net_path: str | Path, nodes_path: str | Path) -> CitationGraph:
    edges, _ = formats.read_network_file(net_path)
    _, rows, _ = formats.read_csv_artifact(nodes_path)
    ids = {int(r[0]): r[1] for r in rows}
    return CitationGraph.from_edges(
        [(ids[a], ids[b], w) for a, b, w in edges], nodes=ids.values())

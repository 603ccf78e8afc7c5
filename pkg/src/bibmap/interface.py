"""Cross-discipline interface detection.

A topic sits at the interface between the two taxonomy sides when it holds
at least a minimum share of EPS publications and receives at least a
minimum share of its citations from HLS publications; both thresholds are
inclusive and default to 0.34.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .citnet import RESIDUAL_TOPIC, TopicClustering
from .corpus import CorpusStore, FieldTaxonomy, Publication
from .termmap import CurationTag, TermMap


@dataclass(frozen=True)
class InterfaceCriteria:
    eps_pub_threshold: float = 0.34
    hls_citation_threshold: float = 0.34
    counting: str = "whole"

    def __post_init__(self) -> None:
        for name, value in (("eps_pub_threshold", self.eps_pub_threshold),
                            ("hls_citation_threshold", self.hls_citation_threshold)):
            if not (0.0 < value <= 1.0):
                raise ValueError(f"{name} must be in (0, 1], got {value}")
        if self.counting not in ("whole", "fractional"):
            raise ValueError(f"counting must be 'whole' or 'fractional', got {self.counting!r}")


class TopicInterfaceRow(NamedTuple):
    topic_id: int
    size: int
    eps_pub_share: float
    hls_citation_share: float
    selected: bool


@dataclass(frozen=True)
class InterfaceReport:
    criteria: InterfaceCriteria
    rows: tuple[TopicInterfaceRow, ...]
    selected_ids: tuple[int, ...]
    interface_share: float | None

    def row(self, topic_id: int) -> TopicInterfaceRow:
        for r in self.rows:
            if r.topic_id == topic_id:
                return r
        raise KeyError(topic_id)


def _eps_contribution(pub: Publication, taxonomy: FieldTaxonomy, counting: str) -> float:
    if counting == "whole":
        return 1.0 if taxonomy.pub_is_eps(pub) else 0.0
    return taxonomy.eps_fraction(pub)


def _hls_contribution(pub: Publication, taxonomy: FieldTaxonomy, counting: str) -> float:
    if counting == "whole":
        return 1.0 if taxonomy.pub_is_hls(pub) else 0.0
    return taxonomy.hls_fraction(pub)


def topic_eps_share(topic: int, clustering: TopicClustering, store: CorpusStore,
                    taxonomy: FieldTaxonomy, counting: str = "whole") -> float:
    """Share of the topic's publications in EPS fields."""
    members = clustering.members(topic)
    if not members:
        raise ValueError(f"topic {topic} is empty")
    total = sum(_eps_contribution(store.pub(p), taxonomy, counting) for p in sorted(members))
    return total / len(members)


def topic_hls_citation_share(topic: int, clustering: TopicClustering, store: CorpusStore,
                             taxonomy: FieldTaxonomy, counting: str = "whole") -> float:
    """Share of the topic's incoming citations that come from HLS
    publications; 0 when the topic receives no citations."""
    members = clustering.members(topic)
    if not members:
        raise ValueError(f"topic {topic} is empty")
    total = 0
    hls = 0.0
    for member in sorted(members):
        for citer in store.in_citations(member):
            total += 1
            hls += _hls_contribution(store.pub(citer), taxonomy, counting)
    return hls / total if total else 0.0


def interface_share_from_counts(selected_pubs: float, eps_pubs: float, hls_pubs: float) -> float:
    """Publications in selected topics over all EPS plus HLS publications."""
    denom = eps_pubs + hls_pubs
    if denom == 0:
        raise ZeroDivisionError("no EPS or HLS publications in the corpus")
    return selected_pubs / denom


def side_publication_counts(store: CorpusStore, taxonomy: FieldTaxonomy) -> tuple[int, int]:
    """(EPS, HLS) publication counts; a publication tagged on both sides
    counts once on each side."""
    eps = sum(1 for p in store.publications.values() if taxonomy.pub_is_eps(p))
    hls = sum(1 for p in store.publications.values() if taxonomy.pub_is_hls(p))
    return eps, hls


def select_interface_topics(clustering: TopicClustering, store: CorpusStore,
                            taxonomy: FieldTaxonomy,
                            criteria: InterfaceCriteria | None = None) -> InterfaceReport:
    """Evaluate both shares for every topic and select those meeting both
    thresholds (inclusive). The residual topic never participates."""
    criteria = criteria or InterfaceCriteria()
    rows = []
    selected = []
    for topic in clustering.topic_ids():
        if topic == RESIDUAL_TOPIC:
            continue
        eps = topic_eps_share(topic, clustering, store, taxonomy, criteria.counting)
        hls = topic_hls_citation_share(topic, clustering, store, taxonomy, criteria.counting)
        hit = eps >= criteria.eps_pub_threshold and hls >= criteria.hls_citation_threshold
        rows.append(TopicInterfaceRow(topic, clustering.size(topic), eps, hls, hit))
        if hit:
            selected.append(topic)

    eps_total, hls_total = side_publication_counts(store, taxonomy)
    selected_pub_count = sum(clustering.size(t) for t in selected)
    share = None
    if eps_total + hls_total > 0:
        share = interface_share_from_counts(selected_pub_count, eps_total, hls_total)
    return InterfaceReport(criteria=criteria, rows=tuple(rows),
                           selected_ids=tuple(selected), interface_share=share)


def interface_share(report: InterfaceReport, store: CorpusStore,
                    taxonomy: FieldTaxonomy, clustering: TopicClustering) -> float:
    eps_total, hls_total = side_publication_counts(store, taxonomy)
    selected_pub_count = sum(clustering.size(t) for t in report.selected_ids)
    return interface_share_from_counts(selected_pub_count, eps_total, hls_total)


class TermSharePct(NamedTuple):
    fraction: float
    percent: int  # rounded for display, half away from zero


def field_eps_term_percentage(term_map: TermMap) -> TermSharePct:
    """Share of map terms tagged as EPS-related."""
    if len(term_map) == 0:
        raise ValueError("empty term map")
    tagged = sum(1 for t in term_map.terms if t.tag == CurationTag.EPS)
    fraction = tagged / len(term_map)
    return TermSharePct(fraction=fraction, percent=int(math.floor(fraction * 100 + 0.5)))

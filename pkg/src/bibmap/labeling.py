"""Algorithmic topic labeling.

Each topic gets up to five characteristic terms. A term's importance is
its within-topic document frequency; its specificity is the fraction of
its corpus-wide occurrences that fall inside the topic. Terms spread over
too many topics are excluded as too general, and the rest rank by
importance times specificity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .citnet import RESIDUAL_TOPIC, TopicClustering
from .termmap import TermCatalog


@dataclass(frozen=True)
class TopicLabel:
    topic_id: int
    terms: tuple[str, ...]
    scores: tuple[tuple[str, int, float], ...]  # (term, importance, specificity)
    empty: bool = False


def _topic_spread(catalog: TermCatalog, clustering: TopicClustering) -> dict[str, int]:
    """Number of topics each candidate term occurs in."""
    topic_of = {pid: t for pid, t in clustering.assignment.items() if t != RESIDUAL_TOPIC}
    spread: dict[str, int] = {}
    for entry in catalog.candidates:
        topics = {topic_of[p] for p in entry.occurrences if p in topic_of}
        spread[entry.term] = len(topics)
    return spread


def label_topic(topic: int, clustering: TopicClustering, catalog: TermCatalog,
                ubiquity_cap: float = 0.25,
                _spread: dict[str, int] | None = None) -> TopicLabel:
    """Label one topic with up to five terms.

    ``catalog`` must be an extraction over the whole corpus so corpus-wide
    occurrence counts are available. Terms occurring in more than
    ``ubiquity_cap`` of all topics are excluded. Ties in the combined score
    break alphabetically. A topic with no candidate terms gets an empty
    label and a warning flag.
    """
    members = set(clustering.members(topic))
    if not members:
        raise ValueError(f"topic {topic} is empty")
    n_topics = len(clustering.topic_ids())
    spread = _spread if _spread is not None else _topic_spread(catalog, clustering)

    scored = []
    for entry in catalog.candidates:
        inside = len(entry.occurrences & members)
        if inside == 0:
            continue
        if spread[entry.term] > ubiquity_cap * n_topics:
            continue
        importance = inside
        specificity = inside / entry.doc_frequency
        scored.append((entry.term, importance, specificity))

    scored.sort(key=lambda t: (-(t[1] * t[2]), t[0]))
    top = scored[:5]
    return TopicLabel(
        topic_id=topic,
        terms=tuple(t[0] for t in top),
        scores=tuple(top),
        empty=not top,
    )


def label_topics(clustering: TopicClustering, catalog: TermCatalog,
                 ubiquity_cap: float = 0.25) -> dict[int, TopicLabel]:
    """Labels for every non-residual topic (shared spread computation)."""
    spread = _topic_spread(catalog, clustering)
    return {
        topic: label_topic(topic, clustering, catalog, ubiquity_cap, _spread=spread)
        for topic in clustering.topic_ids()
    }

"""Growth, country-contribution, and citation-impact statistics.

The top-cited set of a publication group is defined with fractional
weights at the percentile boundary so its total mass is exactly the
baseline share of the group; integer citation counts make a strict
quantile ill-defined otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .citnet import RESIDUAL_TOPIC, ThemeSet, TopicClustering
from .corpus import CorpusStore


@dataclass(frozen=True)
class EmergingCriteria:
    first_year: int
    last_year: int
    growth_factor: float = 4.0
    first_year_max: int = 30
    last_year_min: int = 60

    def __post_init__(self) -> None:
        if self.growth_factor <= 1:
            raise ValueError(f"growth_factor must exceed 1, got {self.growth_factor}")
        if self.first_year >= self.last_year:
            raise ValueError("first_year must precede last_year")


def _year_count(pub_ids: Iterable[str], store: CorpusStore, year: int) -> int:
    return sum(1 for p in pub_ids if store.pub(p).year == year)


def passes_emerging(first_count: int, last_count: int, criteria: EmergingCriteria) -> bool:
    return (last_count >= criteria.growth_factor * first_count
            and first_count <= criteria.first_year_max
            and last_count >= criteria.last_year_min)


def emerging_topics(clustering: TopicClustering, store: CorpusStore,
                    criteria: EmergingCriteria) -> set[int]:
    """Topics whose output grew at least ``growth_factor`` times between the
    two years, starting small and ending substantial."""
    out = set()
    for topic in clustering.topic_ids():
        members = clustering.members(topic)
        first = _year_count(members, store, criteria.first_year)
        last = _year_count(members, store, criteria.last_year)
        if passes_emerging(first, last, criteria):
            out.add(topic)
    return out


def growth_rate(pub_ids: Iterable[str], store: CorpusStore,
                first_year: int, last_year: int) -> float:
    """Relative growth (last - first) / first; 1.58 means 158% larger."""
    ids = list(pub_ids)
    first = _year_count(ids, store, first_year)
    last = _year_count(ids, store, last_year)
    if first == 0:
        raise ValueError(f"no publications in {first_year}; growth undefined")
    return (last - first) / first


def country_contribution(pub_ids: Iterable[str], store: CorpusStore, country: str) -> float:
    """Share of publications co-authored by the country (whole counting)."""
    ids = sorted(pub_ids)
    if not ids:
        raise ValueError("empty publication set")
    hits = sum(1 for p in ids if country in store.pub(p).countries)
    return hits / len(ids)


def top_set_weights(citations: Sequence[int], baseline: float = 0.10) -> list[Fraction]:
    """Membership weight of each publication in the top-cited set.

    Publications strictly above the boundary citation count weigh 1;
    boundary-tied ones share the remaining mass equally, so the weights sum
    to exactly baseline * len(citations).
    """
    n = len(citations)
    base = Fraction(str(baseline))
    if not (0 < base < 1):
        raise ValueError(f"baseline must be in (0, 1), got {baseline}")
    target = base * n
    if target < 1:
        raise ValueError(
            f"group of {n} publications is too small for a top share of {baseline}")
    distinct = sorted(set(citations), reverse=True)
    above = 0
    boundary = distinct[-1]
    for value in distinct:
        tied = sum(1 for c in citations if c == value)
        if above + tied >= target:
            boundary = value
            break
        above += tied
    n_above = sum(1 for c in citations if c > boundary)
    n_tied = sum(1 for c in citations if c == boundary)
    tie_weight = (target - n_above) / n_tied
    return [Fraction(1) if c > boundary else tie_weight if c == boundary else Fraction(0)
            for c in citations]


@dataclass(frozen=True)
class ImpactScore:
    country: str
    theme_id: int | None
    share_top: float
    baseline: float
    score: float


def citation_impact_score(pub_ids: Iterable[str], store: CorpusStore, country: str,
                          baseline: float = 0.10, theme_id: int | None = None) -> ImpactScore:
    """Country's share of top-cited publications relative to the baseline.

    share_top is the fraction of the country's publications that fall in
    the group's top-cited set; dividing by the baseline makes 1.0 the
    world average.
    """
    ids = sorted(pub_ids)
    weights = top_set_weights([store.citations(p) for p in ids], baseline)
    country_ids = [i for i, p in enumerate(ids) if country in store.pub(p).countries]
    if not country_ids:
        return ImpactScore(country=country, theme_id=theme_id, share_top=0.0,
                           baseline=baseline, score=0.0)
    share = sum((weights[i] for i in country_ids), Fraction(0)) / len(country_ids)
    score = share / Fraction(str(baseline))
    return ImpactScore(country=country, theme_id=theme_id, share_top=float(share),
                       baseline=baseline, score=float(score))


def theme_publications(theme: int, themes: ThemeSet, clustering: TopicClustering) -> list[str]:
    out: list[str] = []
    for topic in themes.topics_of(theme):
        out.extend(clustering.members(topic))
    return sorted(out)


def theme_share_table(themes: ThemeSet, clustering: TopicClustering) -> list[tuple[int, str, int, float]]:
    """(theme id, label, publication count, share of all theme publications);
    the shares sum to 1."""
    counts = {
        theme: len(theme_publications(theme, themes, clustering))
        for theme in themes.theme_ids()
    }
    total = sum(counts.values())
    if total == 0:
        raise ValueError("themes contain no publications")
    return [(theme, themes.labels[theme], counts[theme], counts[theme] / total)
            for theme in themes.theme_ids()]


def country_theme_table(themes: ThemeSet, clustering: TopicClustering, store: CorpusStore,
                        country: str, baseline: float = 0.10) -> list[tuple[int, str, float, float]]:
    """(theme id, label, country share of publications, impact score)."""
    rows = []
    for theme in themes.theme_ids():
        pubs = theme_publications(theme, themes, clustering)
        contribution = country_contribution(pubs, store, country)
        impact = citation_impact_score(pubs, store, country, baseline, theme_id=theme)
        rows.append((theme, themes.labels[theme], contribution, impact.score))
    return rows


def yearly_theme_series(themes: ThemeSet, clustering: TopicClustering,
                        store: CorpusStore) -> dict[int, dict[int, int]]:
    """theme id -> {year -> publication count} over the corpus window."""
    out: dict[int, dict[int, int]] = {}
    for theme in themes.theme_ids():
        pubs = theme_publications(theme, themes, clustering)
        series: dict[int, int] = {}
        for p in pubs:
            year = store.pub(p).year
            series[year] = series.get(year, 0) + 1
        out[theme] = dict(sorted(series.items()))
    return out


def emerging_topic_table(clustering: TopicClustering, store: CorpusStore,
                         criteria: EmergingCriteria,
                         labels: Mapping[int, Sequence[str]] | None = None,
                         themes: ThemeSet | None = None,
                         restrict_to: Iterable[int] | None = None) -> list[dict]:
    """Rows for the emerging-topics listing, sorted by growth."""
    allowed = set(restrict_to) if restrict_to is not None else None
    rows = []
    for topic in sorted(emerging_topics(clustering, store, criteria)):
        if allowed is not None and topic not in allowed:
            continue
        members = clustering.members(topic)
        first = _year_count(members, store, criteria.first_year)
        last = _year_count(members, store, criteria.last_year)
        rows.append({
            "topic_id": topic,
            "label": "; ".join(labels.get(topic, ())) if labels else "",
            "publications": len(members),
            "first_year_count": first,
            "last_year_count": last,
            "theme": themes.labels.get(themes.theme_of.get(topic)) if themes else "",
        })
    rows.sort(key=lambda r: (-(r["last_year_count"] / max(r["first_year_count"], 1)), r["topic_id"]))
    return rows

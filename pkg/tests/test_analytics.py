from fractions import Fraction

import numpy as np
import pytest

from bibmap.analytics import (EmergingCriteria, citation_impact_score,
                              country_contribution, emerging_topics, growth_rate,
                              passes_emerging, theme_share_table, top_set_weights,
                              yearly_theme_series)
from bibmap.citnet import ThemeSet, TopicClustering
from conftest import build_store, record
from oracles import emerging_rule


def clustering_of(assignment):
    topics = {}
    for topic in sorted(set(assignment.values())):
        members = tuple(sorted(k for k, v in assignment.items() if v == topic))
        topics[topic] = (len(members), members)
    return TopicClustering(assignment=assignment, topics=topics)


CRITERIA = EmergingCriteria(first_year=2001, last_year=2010)


class TestEmerging:
    def test_rule_examples(self):
        assert passes_emerging(10, 60, CRITERIA)       # 60 >= 40, 10 <= 30, 60 >= 60
        assert not passes_emerging(31, 200, CRITERIA)  # started too large
        assert passes_emerging(0, 60, CRITERIA)        # zero baseline grows "infinitely"
        assert not passes_emerging(10, 59, CRITERIA)   # too small at the end
        assert not passes_emerging(20, 79, CRITERIA)   # under 4x

    def test_grid_matches_independent_implementation(self):
        mismatches = [
            (p1, p2)
            for p1 in range(41) for p2 in range(101)
            if passes_emerging(p1, p2, CRITERIA) != emerging_rule(p1, p2)
        ]
        assert mismatches == []

    def test_monotone_in_criteria(self):
        base = emerging_rule
        for p1 in range(0, 41, 5):
            for p2 in range(0, 101, 10):
                if passes_emerging(p1, p2, CRITERIA):
                    relaxed = EmergingCriteria(2001, 2010, growth_factor=3.0,
                                               first_year_max=40, last_year_min=50)
                    assert passes_emerging(p1, p2, relaxed)
        _ = base

    def test_topic_filter_uses_year_counts(self):
        records = []
        assignment = {}
        # topic 0: 2 pubs in 2001, 9 in 2010 -> 9 >= 8, 2 <= 3, 9 >= 9
        for i in range(2):
            records.append(record(f"a{i}", year=2001))
            assignment[f"a{i}"] = 0
        for i in range(9):
            records.append(record(f"b{i}", year=2010))
            assignment[f"b{i}"] = 0
        # topic 1: flat output
        for i in range(5):
            records.append(record(f"c{i}", year=2001))
            records.append(record(f"d{i}", year=2010))
            assignment[f"c{i}"] = 1
            assignment[f"d{i}"] = 1
        store = build_store(records)
        clustering = clustering_of(assignment)
        criteria = EmergingCriteria(2001, 2010, growth_factor=4.0,
                                    first_year_max=3, last_year_min=9)
        assert emerging_topics(clustering, store, criteria) == {0}

    def test_criteria_validation(self):
        with pytest.raises(ValueError):
            EmergingCriteria(2001, 2010, growth_factor=1.0)
        with pytest.raises(ValueError):
            EmergingCriteria(2010, 2001)


class TestGrowthRate:
    def _store(self, first, last):
        records = [record(f"a{i}", year=2001) for i in range(first)]
        records += [record(f"b{i}", year=2010) for i in range(last)]
        return build_store(records), [r["id"] for r in records]

    def test_100_to_258_is_158_percent(self):
        store, ids = self._store(100, 258)
        assert growth_rate(ids, store, 2001, 2010) == pytest.approx(1.58)

    def test_100_to_163_is_63_percent(self):
        store, ids = self._store(100, 163)
        assert growth_rate(ids, store, 2001, 2010) == pytest.approx(0.63)

    def test_equal_counts_give_zero(self):
        store, ids = self._store(7, 7)
        assert growth_rate(ids, store, 2001, 2010) == 0.0

    def test_zero_first_year_rejected(self):
        store, ids = self._store(0, 5)
        with pytest.raises(ValueError, match="undefined"):
            growth_rate(ids, store, 2001, 2010)


class TestCountryContribution:
    def test_five_of_fifty(self):
        records = [record(f"p{i:02d}", countries=("GB", "US") if i < 5 else ("US",))
                   for i in range(50)]
        store = build_store(records)
        assert country_contribution(store.publications, store, "GB") == pytest.approx(0.10)

    def test_absent_country_gives_zero(self):
        records = [record(f"p{i}", countries=("US",)) for i in range(10)]
        store = build_store(records)
        assert country_contribution(store.publications, store, "XX") == 0.0

    def test_matches_brute_force_scan(self):
        rng = np.random.default_rng(41)
        pool = ["US", "GB", "DE", "NL"]
        records = [
            record(f"p{i:02d}", countries=tuple(
                rng.choice(pool, size=int(rng.integers(1, 3)), replace=False)))
            for i in range(60)
        ]
        store = build_store(records)
        for country in pool:
            brute = sum(1 for p in store.publications.values()
                        if country in p.countries) / 60
            assert country_contribution(store.publications, store, country) == pytest.approx(brute)


def theme_store(citations: list[int], country_members: set[int], country="GB"):
    """Theme of len(citations) pubs where pub i receives citations[i]
    citations; citer j cites every pub with count > j."""
    n = len(citations)
    members = [
        record(f"m{i:03d}", year=2002,
               countries=("GB", "US") if i in country_members else ("US",))
        for i in range(n)
    ]
    max_c = max(citations) if citations else 0
    citers = []
    for j in range(max_c):
        refs = [f"m{i:03d}" for i in range(n) if citations[i] > j]
        citers.append(record(f"c{j:03d}", year=2005, references=refs))
    store = build_store(members + citers)
    return store, [f"m{i:03d}" for i in range(n)]


class TestTopSetWeights:
    def test_mass_is_exactly_baseline_times_n(self):
        rng = np.random.default_rng(55)
        for _ in range(20):
            n = int(rng.integers(10, 200))
            citations = [int(c) for c in rng.integers(0, 12, size=n)]  # heavy ties
            weights = top_set_weights(citations, 0.10)
            assert sum(weights, Fraction(0)) == Fraction(1, 10) * n

    def test_distinct_counts_take_top_k(self):
        weights = top_set_weights(list(range(10)), 0.10)
        assert weights[9] == 1 and all(w == 0 for w in weights[:9])

    def test_all_tied_spread_evenly(self):
        weights = top_set_weights([5] * 20, 0.10)
        assert all(w == Fraction(1, 10) for w in weights)

    def test_too_small_group_rejected(self):
        with pytest.raises(ValueError, match="too small"):
            top_set_weights([1, 2, 3], 0.10)


class TestImpactScore:
    def test_hand_enumerated_case(self):
        # citations 0..9; country owns the sole top-10% publication plus one other
        store, ids = theme_store(list(range(10)), country_members={9, 3})
        result = citation_impact_score(ids, store, "GB")
        assert result.share_top == pytest.approx(0.5)
        assert result.score == pytest.approx(5.0)

    def test_share_of_top_mass_ratio(self):
        # country holds 20% of its pubs in the top set -> score 2
        citations = [10] * 10 + [0] * 90
        country = {0, 1, 50, 51, 52, 53, 54, 55, 56, 57}  # 2 of 10 in top
        store, ids = theme_store(citations, country)
        result = citation_impact_score(ids, store, "GB")
        assert result.score == pytest.approx(2.0)

    def test_all_publications_pseudo_country_scores_exactly_one(self):
        rng = np.random.default_rng(77)
        citations = [int(c) for c in rng.integers(0, 9, size=60)]
        store, ids = theme_store(citations, country_members=set(range(60)))
        result = citation_impact_score(ids, store, "GB")
        assert result.score == 1.0

    def test_uniform_random_subsample_scores_one_on_average(self):
        rng = np.random.default_rng(88)
        citations = [int(c) for c in rng.integers(0, 30, size=500)]
        scores = []
        for trial in range(20):
            subset = set(rng.choice(500, size=50, replace=False).tolist())
            store, ids = theme_store(citations, subset)
            scores.append(citation_impact_score(ids, store, "GB").score)
        assert abs(np.mean(scores) - 1.0) <= 0.15

    def test_small_theme_rejected(self):
        store, ids = theme_store(list(range(5)), set())
        with pytest.raises(ValueError, match="too small"):
            citation_impact_score(ids, store, "GB")


class TestThemeTables:
    def _setup(self):
        records = []
        assignment = {}
        for t, n in [(0, 6), (1, 10), (2, 4)]:
            for i in range(n):
                pid = f"t{t}p{i}"
                records.append(record(pid, year=2001 + (i % 10)))
                assignment[pid] = t
        store = build_store(records)
        clustering = clustering_of(assignment)
        themes = ThemeSet(theme_of={0: 0, 1: 0, 2: 1},
                          labels={0: "theme a", 1: "theme b"}, merge_log=())
        return store, clustering, themes

    def test_shares_sum_to_one(self):
        store, clustering, themes = self._setup()
        table = theme_share_table(themes, clustering)
        assert sum(row[3] for row in table) == pytest.approx(1.0)
        assert table[0][2] == 16 and table[1][2] == 4

    def test_yearly_series_counts(self):
        store, clustering, themes = self._setup()
        series = yearly_theme_series(themes, clustering, store)
        assert sum(series[0].values()) == 16
        assert sum(series[1].values()) == 4

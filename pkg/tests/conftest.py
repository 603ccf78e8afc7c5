import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bibmap.corpus import DocType, FieldTaxonomy, IngestConfig, ingest


def record(pid, year=2005, title="", abstract="", doc_type="article",
           field_codes=("onc",), countries=("US",), references=()):
    return {
        "id": pid,
        "year": year,
        "title": title,
        "abstract": abstract,
        "doc_type": doc_type,
        "field_codes": list(field_codes),
        "countries": list(countries),
        "references": list(references),
    }


@pytest.fixture
def toy_taxonomy():
    return FieldTaxonomy(entries={
        "phys": ("physics", frozenset({"EPS"})),
        "mat": ("materials", frozenset({"EPS"})),
        "onc": ("oncology", frozenset({"HLS"})),
        "neuro": ("neurology", frozenset({"HLS"})),
        "biophys": ("biophysics", frozenset({"EPS", "HLS"})),
        "econ": ("economics", frozenset({"OTHER"})),
    })


@pytest.fixture
def default_config():
    return IngestConfig(year_min=2001, year_max=2010)


def build_store(records, year_min=2001, year_max=2010, census_year=None,
                include=("article", "review"), cohort_counting="whole"):
    cfg = IngestConfig(
        year_min=year_min, year_max=year_max, census_year=census_year,
        include_doc_types=frozenset(DocType(d) for d in include),
        cohort_counting=cohort_counting)
    return ingest(records, cfg)


@pytest.fixture
def synthetic_corpus_path():
    return Path(__file__).parents[1] / "src" / "bibmap" / "data" / "synthetic_corpus.jsonl.gz"

"""Corpus ingest, field taxonomy, and citation normalization.

The corpus store is immutable once built: ingest validates the record
stream, drops dangling and self references, and precomputes the incoming
citation index and the per field-and-year citation averages that the
normalized citation score divides by.
"""

from __future__ import annotations

import csv
import gzip
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Mapping

EPS = "EPS"
HLS = "HLS"
OTHER = "OTHER"

_VALID_SIDES = {EPS, HLS, OTHER}


class IngestError(ValueError):
    """Raised when the record stream cannot be turned into a corpus store."""


class DocType(str, Enum):
    ARTICLE = "article"
    REVIEW = "review"
    OTHER = "other"


@dataclass(frozen=True)
class Publication:
    """One corpus record. Collections are frozensets; iterate sorted for
    reproducible output."""

    id: str
    year: int
    title: str
    abstract: str
    doc_type: DocType
    field_codes: frozenset[str]
    countries: frozenset[str]
    references: frozenset[str]

    @property
    def text(self) -> str:
        return f"{self.title}. {self.abstract}" if self.abstract else self.title


@dataclass(frozen=True)
class FieldTaxonomy:
    """Subject-category codes mapped to a name and one or more sides.

    A code may belong to both the engineering/physical side and the
    health/life side. Codes absent from the taxonomy resolve to OTHER.
    """

    entries: dict[str, tuple[str, frozenset[str]]]

    def sides_of(self, code: str) -> frozenset[str]:
        entry = self.entries.get(code)
        return entry[1] if entry is not None else frozenset({OTHER})

    def is_eps(self, code: str) -> bool:
        return EPS in self.sides_of(code)

    def is_hls(self, code: str) -> bool:
        return HLS in self.sides_of(code)

    def pub_is_eps(self, pub: Publication) -> bool:
        return any(self.is_eps(c) for c in pub.field_codes)

    def pub_is_hls(self, pub: Publication) -> bool:
        return any(self.is_hls(c) for c in pub.field_codes)

    def eps_fraction(self, pub: Publication) -> float:
        """Fraction of the publication's field codes that are EPS-tagged."""
        codes = pub.field_codes
        return sum(1 for c in codes if self.is_eps(c)) / len(codes)

    def hls_fraction(self, pub: Publication) -> float:
        codes = pub.field_codes
        return sum(1 for c in codes if self.is_hls(c)) / len(codes)

    @classmethod
    def from_csv(cls, path: str | Path) -> "FieldTaxonomy":
        """Load a ``code,name,sides`` CSV; sides is EPS, HLS, EPS|HLS, or OTHER.

        Duplicate codes merge by unioning their sides.
        """
        entries: dict[str, tuple[str, frozenset[str]]] = {}
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(row for row in fh if not row.startswith("#"))
            header = next(reader, None)
            if header is None or [h.strip().lower() for h in header[:3]] != ["code", "name", "sides"]:
                raise ValueError(f"{path}: expected header 'code,name,sides'")
            for lineno, row in enumerate(reader, start=2):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                if len(row) < 3:
                    raise ValueError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
                code, name, sides_raw = row[0].strip(), row[1].strip(), row[2].strip()
                sides = frozenset(s.strip().upper() for s in sides_raw.split("|") if s.strip())
                if not sides or not sides <= _VALID_SIDES:
                    raise ValueError(f"{path}:{lineno}: bad sides value {sides_raw!r}")
                if code in entries:
                    prev_name, prev_sides = entries[code]
                    entries[code] = (prev_name or name, prev_sides | sides)
                else:
                    entries[code] = (name, sides)
        return cls(entries=entries)

    @classmethod
    def default(cls) -> "FieldTaxonomy":
        """The taxonomy shipped with the package (journal subject categories
        tagged EPS and/or HLS)."""
        return cls.from_csv(Path(__file__).parent / "data" / "default_taxonomy.csv")


@dataclass(frozen=True)
class IngestConfig:
    year_min: int
    year_max: int
    census_year: int | None = None  # default: last corpus year + 1
    include_doc_types: frozenset[DocType] = frozenset({DocType.ARTICLE, DocType.REVIEW})
    cohort_counting: str = "whole"  # or "fractional"

    def __post_init__(self) -> None:
        if self.year_min > self.year_max:
            raise ValueError(f"year_min {self.year_min} > year_max {self.year_max}")
        if self.cohort_counting not in ("whole", "fractional"):
            raise ValueError(f"cohort_counting must be 'whole' or 'fractional', got {self.cohort_counting!r}")


@dataclass(frozen=True)
class CorpusStore:
    """Immutable corpus with citation indexes and cohort averages."""

    publications: dict[str, Publication]
    census_year: int
    config: IngestConfig
    incoming: dict[str, tuple[str, ...]]
    citation_counts: dict[str, int]
    field_year_mean: dict[tuple[str, int], float]

    def __len__(self) -> int:
        return len(self.publications)

    def __contains__(self, pub_id: str) -> bool:
        return pub_id in self.publications

    def pub(self, pub_id: str) -> Publication:
        return self.publications[pub_id]

    def citations(self, pub_id: str) -> int:
        """In-corpus citations received up to and including the census year."""
        return self.citation_counts[pub_id]

    def in_citations(self, pub_id: str) -> tuple[str, ...]:
        """Ids of corpus publications citing this one (all years)."""
        return self.incoming.get(pub_id, ())

    def sorted_ids(self) -> list[str]:
        return sorted(self.publications)


_REQUIRED_KEYS = ("id", "year", "title", "abstract", "doc_type", "field_codes", "countries", "references")


def _parse_record(obj: Mapping, where: str) -> Publication:
    if not isinstance(obj, Mapping):
        raise IngestError(f"{where}: record is not an object")
    missing = [k for k in _REQUIRED_KEYS if k not in obj]
    if missing:
        raise IngestError(f"{where}: missing fields {missing}")
    try:
        doc_type = DocType(obj["doc_type"])
    except ValueError:
        raise IngestError(f"{where}: unknown doc_type {obj['doc_type']!r}") from None
    pid = obj["id"]
    if not isinstance(pid, str) or not pid:
        raise IngestError(f"{where}: id must be a nonempty string")
    year = obj["year"]
    if not isinstance(year, int) or isinstance(year, bool):
        raise IngestError(f"{where}: year must be an integer")
    codes = obj["field_codes"]
    if not isinstance(codes, (list, tuple)) or not codes or not all(isinstance(c, str) for c in codes):
        raise IngestError(f"{where}: field_codes must be a nonempty list of strings")
    for key in ("countries", "references"):
        val = obj[key]
        if not isinstance(val, (list, tuple)) or not all(isinstance(v, str) for v in val):
            raise IngestError(f"{where}: {key} must be a list of strings")
    return Publication(
        id=pid,
        year=year,
        title=str(obj["title"]),
        abstract=str(obj["abstract"]),
        doc_type=doc_type,
        field_codes=frozenset(codes),
        countries=frozenset(obj["countries"]),
        references=frozenset(obj["references"]),
    )


def ingest(records: Iterable[Mapping | tuple[int, Mapping]], config: IngestConfig) -> CorpusStore:
    """Build an immutable store from a record stream.

    Records outside the analysis window or with an excluded doc type are
    skipped. References that point outside the kept corpus (or at the
    publication itself) are dropped, so every citation edge has both
    endpoints present.
    """
    kept: dict[str, Publication] = {}
    for i, item in enumerate(records, start=1):
        if isinstance(item, tuple):
            lineno, obj = item
            where = f"line {lineno}"
        else:
            obj, where = item, f"record {i}"
        pub = _parse_record(obj, where)
        if pub.doc_type not in config.include_doc_types:
            continue
        if not (config.year_min <= pub.year <= config.year_max):
            continue
        if pub.id in kept:
            raise IngestError(f"duplicate publication id {pub.id!r}")
        kept[pub.id] = pub

    if not kept:
        raise IngestError("empty corpus: no records within the analysis window and doc-type filter")

    # Drop dangling and self references.
    for pid, pub in kept.items():
        clean = frozenset(r for r in pub.references if r != pid and r in kept)
        if clean != pub.references:
            kept[pid] = Publication(
                id=pub.id, year=pub.year, title=pub.title, abstract=pub.abstract,
                doc_type=pub.doc_type, field_codes=pub.field_codes,
                countries=pub.countries, references=clean,
            )

    census = config.census_year if config.census_year is not None else max(p.year for p in kept.values()) + 1

    incoming_lists: dict[str, list[str]] = {}
    for pid, pub in kept.items():
        for ref in pub.references:
            incoming_lists.setdefault(ref, []).append(pid)
    incoming = {pid: tuple(sorted(citers)) for pid, citers in incoming_lists.items()}

    citation_counts = {
        pid: sum(1 for citer in incoming.get(pid, ()) if kept[citer].year <= census)
        for pid in kept
    }

    # Cohort averages per (field code, year). Whole counting puts a
    # publication fully into the cohort of each of its codes; fractional
    # weights it by 1/len(codes).
    sums: dict[tuple[str, int], float] = {}
    weights: dict[tuple[str, int], float] = {}
    fractional = config.cohort_counting == "fractional"
    for pid, pub in kept.items():
        w = 1.0 / len(pub.field_codes) if fractional else 1.0
        c = citation_counts[pid]
        for code in sorted(pub.field_codes):
            key = (code, pub.year)
            sums[key] = sums.get(key, 0.0) + w * c
            weights[key] = weights.get(key, 0.0) + w
    field_year_mean = {key: sums[key] / weights[key] for key in sums}

    return CorpusStore(
        publications=kept,
        census_year=census,
        config=config,
        incoming=incoming,
        citation_counts=citation_counts,
        field_year_mean=field_year_mean,
    )


def read_corpus_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    """Yield (line number, record) pairs from a JSONL corpus file.

    Transparently decompresses ``.gz`` files. Malformed JSON raises an
    IngestError carrying the offending line number.
    """
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rt", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"line {lineno}: malformed JSON ({exc.msg})") from None


def ingest_path(path: str | Path, config: IngestConfig) -> CorpusStore:
    return ingest(read_corpus_jsonl(path), config)


def normalized_citation_score(pub: Publication | str, store: CorpusStore) -> float:
    """Citations divided by the cohort average of the same field and year.

    A publication in several fields gets the arithmetic mean of its
    per-field normalized values. A cohort with average 0 contributes 0
    (the publication necessarily has 0 citations there).
    """
    pub_id = pub if isinstance(pub, str) else pub.id
    if pub_id not in store.publications:
        raise KeyError(f"publication {pub_id!r} not in store")
    record = store.publications[pub_id]
    cites = store.citation_counts[pub_id]
    values = []
    for code in sorted(record.field_codes):
        mean = store.field_year_mean[(code, record.year)]
        values.append(0.0 if mean == 0.0 else cites / mean)
    return sum(values) / len(values)

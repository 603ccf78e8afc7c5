"""Artifact file formats.

Every artifact starts with a single comment line carrying the artifact
kind, the config hash, and the seed; readers skip leading ``#`` lines.
Map and network files follow the tab-separated conventions used by common
map-viewer tools: map files carry the column header
``id<TAB>label<TAB>x<TAB>y<TAB>weight<occurrences><TAB>score<impact>``,
network files are headerless ``id1<TAB>id2<TAB>weight`` edge lists.
Floats are written in shortest round-trip form.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

from .termmap import CurationTag, MapTerm, TermMap

MAP_COLUMNS = ("id", "label", "x", "y", "weight<occurrences>", "score<impact>")


def artifact_header(kind: str, config_hash: str, seed: int) -> str:
    return f"# bibmap kind={kind} config={config_hash} seed={seed}"


def parse_header(line: str) -> dict[str, str]:
    if not line.startswith("# bibmap"):
        raise ValueError(f"not a bibmap artifact header: {line!r}")
    meta = {}
    for piece in line[len("# bibmap"):].split():
        if "=" in piece:
            key, value = piece.split("=", 1)
            meta[key] = value
    return meta


def _read_artifact_lines(path: str | Path) -> tuple[dict[str, str], list[str]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    meta: dict[str, str] = {}
    body_start = 0
    for i, line in enumerate(lines):
        if line.startswith("#"):
            if line.startswith("# bibmap"):
                meta = parse_header(line)
            body_start = i + 1
        else:
            break
    return meta, lines[body_start:]


def write_map_file(path: str | Path, term_map: TermMap, *, kind: str = "termmap",
                   config_hash: str = "-", seed: int = 0) -> None:
    out = [artifact_header(kind, config_hash, seed), "\t".join(MAP_COLUMNS)]
    for t in term_map.terms:
        out.append(f"{t.id}\t{t.label}\t{t.x!r}\t{t.y!r}\t{t.weight}\t{t.impact!r}")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def read_map_file(path: str | Path) -> tuple[TermMap, dict[str, str]]:
    meta, body = _read_artifact_lines(path)
    if not body:
        raise ValueError(f"{path}: missing map column header")
    header = tuple(body[0].split("\t"))
    if header != MAP_COLUMNS:
        raise ValueError(f"{path}: unexpected map columns {header!r}")
    terms = []
    for lineno, line in enumerate(body[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != len(MAP_COLUMNS):
            raise ValueError(f"{path}:{lineno}: expected {len(MAP_COLUMNS)} columns")
        terms.append(MapTerm(
            id=int(parts[0]), label=parts[1], x=float(parts[2]), y=float(parts[3]),
            weight=int(parts[4]), impact=float(parts[5])))
    return TermMap(terms=tuple(terms)), meta


def write_network_file(path: str | Path, edges: Iterable[tuple[int, int, float]], *,
                       kind: str = "network", config_hash: str = "-", seed: int = 0) -> None:
    out = [artifact_header(kind, config_hash, seed)]
    for a, b, w in edges:
        out.append(f"{a}\t{b}\t{w!r}")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def read_network_file(path: str | Path) -> tuple[list[tuple[int, int, float]], dict[str, str]]:
    meta, body = _read_artifact_lines(path)
    edges = []
    for lineno, line in enumerate(body, start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 3 columns")
        edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
    return edges, meta


def write_csv_artifact(path: str | Path, columns: Sequence[str], rows: Iterable[Sequence], *,
                       kind: str, config_hash: str = "-", seed: int = 0) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    Path(path).write_text(
        artifact_header(kind, config_hash, seed) + "\n" + buf.getvalue(), encoding="utf-8")


def read_csv_artifact(path: str | Path) -> tuple[list[str], list[list[str]], dict[str, str]]:
    meta, body = _read_artifact_lines(path)
    reader = csv.reader(body)
    rows = [row for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: empty CSV artifact")
    return rows[0], rows[1:], meta


def write_json_artifact(path: str | Path, payload, *, kind: str,
                        config_hash: str = "-", seed: int = 0) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2)
    Path(path).write_text(
        artifact_header(kind, config_hash, seed) + "\n" + text + "\n", encoding="utf-8")


def read_json_artifact(path: str | Path):
    meta, body = _read_artifact_lines(path)
    return json.loads("\n".join(body)), meta


def write_clustering_csv(path: str | Path, assignment: dict[str, int], **meta) -> None:
    rows = [(pid, assignment[pid]) for pid in sorted(assignment)]
    write_csv_artifact(path, ("pub_id", "topic_id"), rows, kind="clustering", **meta)


def read_clustering_csv(path: str | Path) -> tuple[dict[str, int], dict[str, str]]:
    header, rows, meta = read_csv_artifact(path)
    if header != ["pub_id", "topic_id"]:
        raise ValueError(f"{path}: unexpected columns {header!r}")
    return {pid: int(topic) for pid, topic in rows}, meta


def write_interface_csv(path: str | Path, rows, **meta) -> None:
    write_csv_artifact(
        path, ("topic_id", "size", "eps_pub_share", "hls_citation_share", "selected"),
        [(r.topic_id, r.size, r.eps_pub_share, r.hls_citation_share, int(r.selected)) for r in rows],
        kind="interface", **meta)


def write_labels_csv(path: str | Path, labels: dict[int, Sequence[str]], **meta) -> None:
    columns = ("topic_id", "term1", "term2", "term3", "term4", "term5")
    rows = []
    for topic in sorted(labels):
        terms = list(labels[topic])[:5]
        terms += [""] * (5 - len(terms))
        rows.append((topic, *terms))
    write_csv_artifact(path, columns, rows, kind="labels", **meta)


def write_catalog_csv(path: str | Path, catalog, **meta) -> None:
    rows = [(e.term, e.doc_frequency, e.relevance) for e in catalog.entries]
    write_csv_artifact(path, ("term", "doc_frequency", "relevance"), rows,
                       kind="catalog", **meta)


def map_payload(field: str, term_map: TermMap, meta: dict[str, str] | None = None) -> dict:
    """JSON-ready view of a term map for the HTTP API and the UI."""
    from .termmap import color_hex

    return {
        "field": field,
        "config": (meta or {}).get("config", "-"),
        "seed": (meta or {}).get("seed", "0"),
        "terms": [
            {
                "id": t.id,
                "label": t.label,
                "x": t.x,
                "y": t.y,
                "weight": t.weight,
                "impact": t.impact,
                "tag": t.tag.value,
                "color_impact": color_hex(t.impact),
            }
            for t in term_map.terms
        ],
    }


def term_map_with_tag_log(term_map: TermMap, decisions: Iterable[dict]) -> TermMap:
    """Current tag state = replay of the append-only decision log."""
    tags: dict[int, CurationTag] = {}
    for decision in decisions:
        tags[int(decision["term_id"])] = CurationTag(decision["tag"])
    return term_map.with_tags(tags)

"""Local HTTP API backing the curation UI.

Read endpoints serve term maps, field statistics, and the interface
report straight from the pipeline artifacts. Tag mutations append to a
single decision log guarded by one writer lock; the current tag state of
a map is always the replay of that log.
"""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse
from pydantic import BaseModel

from . import formats
from .interface import field_eps_term_percentage
from .termmap import CurationTag, TermMap

DECISION_LOG = "tag_decisions.jsonl"


class TagRequest(BaseModel):
    tag: str
    note: str = ""


def _map_path(output: Path, field: str) -> Path:
    return output / f"termmap_{field}.map.txt"


def read_decisions(output: Path, field: str | None = None) -> list[dict]:
    path = output / DECISION_LOG
    if not path.exists():
        return []
    decisions = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        decision = json.loads(line)
        if field is None or decision.get("field") == field:
            decisions.append(decision)
    return decisions


def current_map(output: Path, field: str) -> tuple[TermMap, dict[str, str]]:
    path = _map_path(output, field)
    if not path.exists():
        raise FileNotFoundError(field)
    term_map, meta = formats.read_map_file(path)
    return formats.term_map_with_tag_log(term_map, read_decisions(output, field)), meta


def field_stats(term_map: TermMap, field: str) -> dict:
    counts = {tag: 0 for tag in CurationTag}
    for term in term_map.terms:
        counts[term.tag] += 1
    pct = field_eps_term_percentage(term_map)
    return {
        "field": field,
        "total": len(term_map),
        "eps": counts[CurationTag.EPS],
        "not_eps": counts[CurationTag.NOT_EPS],
        "untagged": counts[CurationTag.UNTAGGED],
        "eps_fraction": pct.fraction,
        "eps_percent": pct.percent,
    }


def create_app(output_dir: str | Path, frontend_dir: str | Path | None = None) -> FastAPI:
    output = Path(output_dir)
    app = FastAPI(title="bibmap curation API")
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    write_lock = threading.Lock()

    @app.get("/api/fields")
    def list_fields() -> dict:
        fields = sorted(p.name[len("termmap_"):-len(".map.txt")]
                        for p in output.glob("termmap_*.map.txt"))
        return {"fields": fields}

    @app.get("/api/maps/{field}")
    def get_map(field: str) -> dict:
        try:
            term_map, meta = current_map(output, field)
        except FileNotFoundError:
            raise HTTPException(status_code=404, detail=f"no term map for field {field!r}")
        return formats.map_payload(field, term_map, meta)

    @app.get("/api/fields/{field}/stats")
    def get_stats(field: str) -> dict:
        try:
            term_map, _ = current_map(output, field)
        except FileNotFoundError:
            raise HTTPException(status_code=404, detail=f"no term map for field {field!r}")
        return field_stats(term_map, field)

    @app.put("/api/terms/{field}/{term_id}/tag")
    def put_tag(field: str, term_id: int, request: TagRequest) -> dict:
        try:
            tag = CurationTag(request.tag)
        except ValueError:
            raise HTTPException(status_code=422,
                                detail=f"tag must be one of {[t.value for t in CurationTag]}")
        with write_lock:
            try:
                term_map, _ = current_map(output, field)
            except FileNotFoundError:
                raise HTTPException(status_code=404, detail=f"no term map for field {field!r}")
            by_id = {t.id: t for t in term_map.terms}
            if term_id not in by_id:
                raise HTTPException(status_code=404,
                                    detail=f"no term {term_id} in field {field!r}")
            decision = {
                "field": field,
                "term_id": term_id,
                "term": by_id[term_id].label,
                "tag": tag.value,
                "note": request.note,
                "ts": time.time(),
            }
            with open(output / DECISION_LOG, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(decision, sort_keys=True) + "\n")
            term_map, _ = current_map(output, field)
        updated = next(t for t in term_map.terms if t.id == term_id)
        return {
            "ok": True,
            "term": {"id": updated.id, "label": updated.label, "tag": updated.tag.value},
            "stats": field_stats(term_map, field),
        }

    @app.get("/api/reports/interface")
    def get_interface_report() -> dict:
        summary_path = output / "interface_summary.json"
        csv_path = output / "interface.csv"
        if not summary_path.exists() or not csv_path.exists():
            raise HTTPException(status_code=404,
                                detail="no interface report; run 'bibmap interface' first")
        summary, _ = formats.read_json_artifact(summary_path)
        _, rows, _ = formats.read_csv_artifact(csv_path)
        return {
            "summary": summary,
            "topics": [
                {"topic_id": int(r[0]), "size": int(r[1]), "eps_pub_share": float(r[2]),
                 "hls_citation_share": float(r[3]), "selected": bool(int(r[4]))}
                for r in rows
            ],
        }

    if frontend_dir is not None:
        index = Path(frontend_dir) / "index.html"
        if index.exists():
            @app.get("/")
            def serve_index() -> FileResponse:
                return FileResponse(index)

            @app.get("/{asset_path:path}")
            def serve_asset(asset_path: str) -> FileResponse:
                target = (Path(frontend_dir) / asset_path).resolve()
                if not str(target).startswith(str(Path(frontend_dir).resolve())) or not target.is_file():
                    raise HTTPException(status_code=404)
                return FileResponse(target)

    return app

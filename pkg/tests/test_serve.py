import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from bibmap import formats
from bibmap.serve import DECISION_LOG, create_app
from bibmap.termmap import MapTerm, TermMap


@pytest.fixture
def served(tmp_path):
    rng = np.random.default_rng(2)
    terms = tuple(
        MapTerm(id=i + 1, label=f"term {i}", x=float(rng.standard_normal()),
                y=float(rng.standard_normal()), weight=int(rng.integers(1, 40)),
                impact=float(rng.uniform(0, 2)))
        for i in range(10))
    formats.write_map_file(tmp_path / "termmap_neuro.map.txt", TermMap(terms=terms),
                           config_hash="cafe", seed=5)
    app = create_app(tmp_path)
    return TestClient(app), tmp_path


class TestMapEndpoints:
    def test_fields_listing(self, served):
        client, _ = served
        assert client.get("/api/fields").json() == {"fields": ["neuro"]}

    def test_get_map_payload(self, served):
        client, _ = served
        payload = client.get("/api/maps/neuro").json()
        assert payload["field"] == "neuro"
        assert payload["config"] == "cafe"
        assert len(payload["terms"]) == 10
        term = payload["terms"][0]
        assert set(term) >= {"id", "label", "x", "y", "weight", "impact", "tag", "color_impact"}
        assert term["tag"] == "UNTAGGED"

    def test_unknown_field_404(self, served):
        client, _ = served
        assert client.get("/api/maps/nope").status_code == 404
        assert client.get("/api/fields/nope/stats").status_code == 404


class TestTagging:
    def test_put_tag_then_stats_reflects_change(self, served):
        client, _ = served
        before = client.get("/api/fields/neuro/stats").json()
        assert before["eps"] == 0 and before["total"] == 10

        response = client.put("/api/terms/neuro/3/tag", json={"tag": "EPS"})
        assert response.status_code == 200
        body = response.json()
        assert body["term"]["tag"] == "EPS"
        assert body["stats"]["eps"] == 1
        assert body["stats"]["eps_fraction"] == pytest.approx(0.1)
        assert body["stats"]["eps_percent"] == 10

        after = client.get("/api/fields/neuro/stats").json()
        assert after["eps"] == 1
        mapped = client.get("/api/maps/neuro").json()
        assert next(t for t in mapped["terms"] if t["id"] == 3)["tag"] == "EPS"

    def test_tag_then_untag_restores_prior_value(self, served):
        client, _ = served
        baseline = client.get("/api/fields/neuro/stats").json()
        client.put("/api/terms/neuro/2/tag", json={"tag": "EPS"})
        client.put("/api/terms/neuro/2/tag", json={"tag": "UNTAGGED"})
        assert client.get("/api/fields/neuro/stats").json() == baseline

    def test_invalid_tag_422(self, served):
        client, _ = served
        assert client.put("/api/terms/neuro/1/tag", json={"tag": "MAYBE"}).status_code == 422

    def test_unknown_term_404(self, served):
        client, _ = served
        assert client.put("/api/terms/neuro/999/tag", json={"tag": "EPS"}).status_code == 404

    def test_decision_log_is_append_only_jsonl(self, served):
        client, outdir = served
        client.put("/api/terms/neuro/1/tag", json={"tag": "EPS", "note": "obvious"})
        client.put("/api/terms/neuro/1/tag", json={"tag": "NOT_EPS"})
        lines = (outdir / DECISION_LOG).read_text().splitlines()
        assert len(lines) == 2
        first = json.loads(lines[0])
        assert first["tag"] == "EPS" and first["note"] == "obvious"
        assert {"field", "term_id", "term", "tag", "note", "ts"} <= set(first)

    def test_log_replay_reproduces_interactive_state(self, served):
        client, outdir = served
        rng = np.random.default_rng(7)
        tags = ["EPS", "NOT_EPS", "UNTAGGED"]
        script = [(int(rng.integers(1, 11)), tags[int(rng.integers(0, 3))])
                  for _ in range(20)]
        for term_id, tag in script:
            assert client.put(f"/api/terms/neuro/{term_id}/tag",
                              json={"tag": tag}).status_code == 200
        interactive = client.get("/api/maps/neuro").json()

        # replay the log offline against the same base map
        base, _ = formats.read_map_file(outdir / "termmap_neuro.map.txt")
        decisions = [json.loads(line)
                     for line in (outdir / DECISION_LOG).read_text().splitlines()]
        replayed = formats.term_map_with_tag_log(base, decisions)
        assert [t.tag.value for t in replayed.terms] == \
            [t["tag"] for t in interactive["terms"]]


class TestInterfaceReport:
    def test_missing_report_404(self, served):
        client, _ = served
        assert client.get("/api/reports/interface").status_code == 404

    def test_report_payload(self, served, tmp_path):
        client, outdir = served
        from bibmap.interface import TopicInterfaceRow
        rows = [TopicInterfaceRow(0, 120, 0.5, 0.6, True),
                TopicInterfaceRow(1, 80, 0.1, 0.9, False)]
        formats.write_interface_csv(outdir / "interface.csv", rows)
        formats.write_json_artifact(outdir / "interface_summary.json", {
            "selected_topics": [0], "interface_share": 0.25,
            "eps_threshold": 0.34, "hls_threshold": 0.34, "counting": "whole",
        }, kind="interface-summary")
        payload = client.get("/api/reports/interface").json()
        assert payload["summary"]["selected_topics"] == [0]
        assert payload["topics"][0] == {"topic_id": 0, "size": 120, "eps_pub_share": 0.5,
                                        "hls_citation_share": 0.6, "selected": True}

import numpy as np
import pytest

from bibmap import formats
from bibmap.citnet import CitationGraph
from bibmap.pipeline import load_graph_dump
from bibmap.termmap import CurationTag, MapTerm, TermMap


def sample_map(n=5, seed=3):
    rng = np.random.default_rng(seed)
    terms = tuple(
        MapTerm(id=i + 1, label=f"term {i}", x=float(rng.standard_normal()),
                y=float(rng.standard_normal()), weight=int(rng.integers(1, 50)),
                impact=float(rng.uniform(0, 2.5)))
        for i in range(n))
    return TermMap(terms=terms)


class TestHeaders:
    def test_header_roundtrip(self):
        line = formats.artifact_header("termmap", "abc123def456", 42)
        meta = formats.parse_header(line)
        assert meta == {"kind": "termmap", "config": "abc123def456", "seed": "42"}

    def test_non_header_rejected(self):
        with pytest.raises(ValueError):
            formats.parse_header("id\tlabel")

    def test_every_artifact_starts_with_header(self, tmp_path):
        formats.write_map_file(tmp_path / "m.map.txt", sample_map(), config_hash="h", seed=1)
        formats.write_network_file(tmp_path / "n.net.txt", [(1, 2, 0.5)], config_hash="h", seed=1)
        formats.write_csv_artifact(tmp_path / "t.csv", ("a", "b"), [(1, 2)],
                                   kind="x", config_hash="h", seed=1)
        formats.write_json_artifact(tmp_path / "j.json", {"k": 1}, kind="x",
                                    config_hash="h", seed=1)
        for name in ("m.map.txt", "n.net.txt", "t.csv", "j.json"):
            first = (tmp_path / name).read_text().splitlines()[0]
            assert first.startswith("# bibmap")
            assert "config=h" in first and "seed=1" in first


class TestMapFile:
    def test_roundtrip_identical(self, tmp_path):
        original = sample_map(n=20, seed=9)
        path = tmp_path / "field.map.txt"
        formats.write_map_file(path, original, config_hash="deadbeef", seed=7)
        loaded, meta = formats.read_map_file(path)
        assert loaded == original
        assert meta["config"] == "deadbeef" and meta["seed"] == "7"

    def test_column_header_grammar(self, tmp_path):
        path = tmp_path / "field.map.txt"
        formats.write_map_file(path, sample_map())
        lines = path.read_text().splitlines()
        assert lines[1] == "id\tlabel\tx\ty\tweight<occurrences>\tscore<impact>"

    def test_unexpected_columns_rejected(self, tmp_path):
        path = tmp_path / "bad.map.txt"
        path.write_text("# bibmap kind=x config=- seed=0\nid\tlabel\n1\ta\n")
        with pytest.raises(ValueError, match="columns"):
            formats.read_map_file(path)

    def test_float_precision_survives(self, tmp_path):
        terms = (MapTerm(id=1, label="x", x=0.1 + 0.2, y=-1.2345678901234567e-8,
                         weight=3, impact=1.9999999999999998),)
        path = tmp_path / "p.map.txt"
        formats.write_map_file(path, TermMap(terms=terms))
        loaded, _ = formats.read_map_file(path)
        assert loaded.terms[0].x == terms[0].x
        assert loaded.terms[0].y == terms[0].y
        assert loaded.terms[0].impact == terms[0].impact


class TestNetworkFile:
    def test_roundtrip(self, tmp_path):
        edges = [(1, 2, 0.3333333333333333), (2, 5, 2.0), (3, 4, 1e-9)]
        path = tmp_path / "x.net.txt"
        formats.write_network_file(path, edges)
        loaded, _ = formats.read_network_file(path)
        assert loaded == edges

    def test_graph_dump_roundtrip(self, tmp_path):
        graph = CitationGraph.from_edges(
            [("a", "b", 0.25), ("b", "c", 1.5), ("a", "c", 0.1)], nodes=["a", "b", "c", "zzz"])
        index = {pid: i + 1 for i, pid in enumerate(graph.ids)}
        formats.write_csv_artifact(tmp_path / "nodes.csv", ("id", "pub_id"),
                                   [(index[p], p) for p in graph.ids], kind="graph-nodes")
        formats.write_network_file(
            tmp_path / "g.net.txt",
            [(index[a], index[b], w) for a, b, w in graph.edge_list()], kind="graph")
        loaded = load_graph_dump(tmp_path / "g.net.txt", tmp_path / "nodes.csv")
        assert loaded.ids == graph.ids
        assert loaded.edge_list() == graph.edge_list()


class TestCsvAndJson:
    def test_csv_roundtrip(self, tmp_path):
        path = tmp_path / "t.csv"
        formats.write_csv_artifact(path, ("pub_id", "topic_id"), [("a", 1), ("b", 2)],
                                   kind="clustering")
        header, rows, _ = formats.read_csv_artifact(path)
        assert header == ["pub_id", "topic_id"]
        assert rows == [["a", "1"], ["b", "2"]]

    def test_clustering_csv_roundtrip(self, tmp_path):
        path = tmp_path / "c.csv"
        assignment = {"b": 2, "a": 0, "c": -1}
        formats.write_clustering_csv(path, assignment)
        loaded, _ = formats.read_clustering_csv(path)
        assert loaded == assignment

    def test_json_roundtrip(self, tmp_path):
        path = tmp_path / "x.json"
        payload = {"b": [1, 2, 3], "a": {"nested": True}}
        formats.write_json_artifact(path, payload, kind="x")
        loaded, meta = formats.read_json_artifact(path)
        assert loaded == payload
        assert meta["kind"] == "x"

    def test_csv_float_repr_roundtrip(self, tmp_path):
        path = tmp_path / "f.csv"
        value = 0.1 + 0.2
        formats.write_csv_artifact(path, ("v",), [(value,)], kind="x")
        _, rows, _ = formats.read_csv_artifact(path)
        assert float(rows[0][0]) == value


class TestTagReplay:
    def test_replay_applies_last_decision_per_term(self):
        tmap = sample_map(3)
        decisions = [
            {"term_id": 1, "tag": "EPS"},
            {"term_id": 2, "tag": "NOT_EPS"},
            {"term_id": 1, "tag": "UNTAGGED"},
        ]
        replayed = formats.term_map_with_tag_log(tmap, decisions)
        assert replayed.terms[0].tag == CurationTag.UNTAGGED
        assert replayed.terms[1].tag == CurationTag.NOT_EPS
        assert replayed.terms[2].tag == CurationTag.UNTAGGED

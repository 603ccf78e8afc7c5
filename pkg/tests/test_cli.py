import json
import subprocess
import sys
from pathlib import Path

import pytest

from bibmap.cli import main

DESK_PARAMS = {
    "year_min": 2001,
    "year_max": 2010,
    "resolution": 0.02,
    "min_cluster_size": 30,
    "max_passes": 8,
    "seed": 11,
    "selection_size": 300,
    "min_doc_frequency": 5,
    "layout_iters": 250,
    "layout_starts": 4,
    "target_themes": 4,
    "emerging_first_year_max": 12,
    "emerging_last_year_min": 25,
    "country": "GB",
}


def write_config(tmp_path, corpus, output, **extra):
    merge_path = tmp_path / "merges.json"
    if not merge_path.exists():
        merge_path.write_text(json.dumps({"merges": [], "labels": {}}))
    cfg = dict(DESK_PARAMS)
    cfg["corpus"] = str(corpus)
    cfg["output"] = str(output)
    cfg["merge_config"] = str(merge_path)
    cfg.update(extra)
    path = tmp_path / f"config_{Path(output).name}.json"
    path.write_text(json.dumps(cfg))
    return path


def run_full_pipeline(config_path):
    for args in (["ingest"], ["cluster"], ["termmap", "neuroimaging"],
                 ["interface"], ["themes"], ["label"], ["stats"], ["export"]):
        code = main(args + ["--config", str(config_path)])
        assert code == 0, f"{args} failed"


class TestPipelineCommands:
    def test_full_pipeline_produces_all_artifacts(self, tmp_path, synthetic_corpus_path):
        out = tmp_path / "out"
        config = write_config(tmp_path, synthetic_corpus_path, out)
        run_full_pipeline(config)
        expected = {
            "ingest.json", "clustering.csv", "interface.csv", "interface_summary.json",
            "themes.json", "labels.csv", "stats_emerging_topics.csv",
            "stats_theme_shares.csv", "stats_country.csv", "stats_yearly_series.csv",
            "termmap_neuroimaging.map.txt", "termmap_neuroimaging.net.txt",
            "termmap_neuroimaging.catalog.csv", "citation_graph.net.txt",
            "citation_nodes.csv", "run_manifest.json",
        }
        assert expected <= {p.name for p in out.iterdir()}

        from bibmap import formats
        manifest, meta = formats.read_json_artifact(out / "run_manifest.json")
        assert manifest["seed"] == DESK_PARAMS["seed"]
        assert manifest["kernel_backend"] in ("native", "pure")
        assert meta["kind"] == "manifest"

    def test_stage_before_ingest_fails_with_dependency_error(self, tmp_path, synthetic_corpus_path, capsys):
        out = tmp_path / "fresh"
        config = write_config(tmp_path, synthetic_corpus_path, out)
        out.mkdir()
        code = main(["termmap", "neuroimaging", "--config", str(config)])
        assert code != 0
        assert "ingest" in capsys.readouterr().err

    def test_themes_before_interface_fails(self, tmp_path, synthetic_corpus_path, capsys):
        out = tmp_path / "fresh2"
        config = write_config(tmp_path, synthetic_corpus_path, out)
        assert main(["ingest", "--config", str(config)]) == 0
        assert main(["cluster", "--config", str(config)]) == 0
        code = main(["themes", "--config", str(config)])
        assert code != 0
        assert "interface" in capsys.readouterr().err

    def test_missing_required_flags(self, capsys):
        assert main(["ingest"]) == 1
        assert "--corpus" in capsys.readouterr().err

    def test_unknown_command_exits_nonzero(self):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == 2

    def test_flag_overrides_config(self, tmp_path, synthetic_corpus_path):
        out = tmp_path / "o1"
        config = write_config(tmp_path, synthetic_corpus_path, out)
        assert main(["ingest", "--config", str(config), "--seed", "99"]) == 0
        from bibmap import formats
        manifest, _ = formats.read_json_artifact(out / "run_manifest.json")
        assert manifest["seed"] == 99

    def test_console_entry_point(self, synthetic_corpus_path, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "bibmap.cli", "ingest",
             "--corpus", str(synthetic_corpus_path), "--output", str(tmp_path / "o")],
            capture_output=True, text=True)
        assert result.returncode == 0
        assert "ingested" in result.stdout


class TestDeterminism:
    def test_identical_config_runs_are_byte_identical(self, tmp_path, synthetic_corpus_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        c1 = write_config(tmp_path, synthetic_corpus_path, out1)
        c2 = write_config(tmp_path, synthetic_corpus_path, out2)
        run_full_pipeline(c1)
        run_full_pipeline(c2)
        names1 = sorted(p.name for p in out1.iterdir())
        names2 = sorted(p.name for p in out2.iterdir())
        assert names1 == names2
        for name in names1:
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

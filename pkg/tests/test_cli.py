import hashlib
import json
import os

import numpy as np
import pytest

from doppel.cli import DEFAULT_CONFIG, load_config, main

TINY_CONFIG = {
    "synth": {"n_genuine": 5, "n_fan": 30, "n_bot": 30, "separability": "easy", "seed": 11},
    "features": {"seq_len": 40, "lda_topics": 0},
    "model": {"embed_dim": 8, "conv_filters": 6, "conv_kernel": 3, "lstm_units": 6,
              "text_dense": 6, "meta_dense": 6, "head_dense": 6},
    "train": {"epochs": 2, "seed": 5},
    "eval": {"rf_trees": 10},
}


@pytest.fixture()
def config_path(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(TINY_CONFIG))
    return str(path)


def run_stage(command, config_path, out_dir, *extra):
    return main([command, "--config", config_path, "--out-dir", str(out_dir), *extra])


@pytest.fixture()
def full_run(tmp_path, config_path):
    out = tmp_path / "run"
    for stage in ("synth", "identify", "cluster", "train"):
        assert run_stage(stage, config_path, out) == 0
    return out


class TestConfig:
    def test_defaults_when_missing(self):
        config = load_config(None)
        assert config["similarity"]["threshold"] == 0.30

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"nonsense": 1}')
        from doppel.errors import ConfigError
        with pytest.raises(ConfigError):
            load_config(str(path))

    def test_seed_override_propagates(self, config_path):
        config = load_config(config_path, seed_override=99)
        assert config["synth"]["seed"] == 99
        assert config["train"]["seed"] == 99
        assert config["features"]["lda_seed"] == 99

    def test_bad_threshold(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"similarity": {"threshold": 1.5}}')
        assert main(["identify", "--config", str(path), "--out-dir", str(tmp_path)]) == 2


class TestStages:
    def test_synth_outputs(self, tmp_path, config_path):
        out = tmp_path / "s"
        assert run_stage("synth", config_path, out) == 0
        for name in ("profiles.jsonl", "posts.jsonl", "genuine.jsonl",
                     "photo_oracle.tsv", "labels.csv", "synth.manifest.json"):
            assert (out / name).exists()

    def test_identify_before_synth_fails(self, tmp_path, config_path):
        assert run_stage("identify", config_path, tmp_path / "empty") == 2

    def test_full_chain(self, full_run):
        assert (full_run / "similarity_reports.csv").exists()
        assert (full_run / "cluster_features.jsonl").exists()
        assert (full_run / "assignments.csv").exists()
        assert (full_run / "elbow_curve.csv").exists()
        assert (full_run / "model.bin").exists()
        assert (full_run / "vocabulary.tsv").exists()
        assert (full_run / "history.csv").exists()

    def test_manifests_written(self, full_run):
        for stage in ("synth", "identify", "cluster", "train"):
            manifest = json.loads((full_run / f"{stage}.manifest.json").read_text())
            assert manifest["stage"] == stage
            assert "config_sha256" in manifest
            assert "seeds" in manifest
            assert "input_sha256" in manifest

    def test_eval_report(self, tmp_path, config_path, full_run):
        assert run_stage("eval", config_path, full_run) == 0
        report = (full_run / "holdout_report.csv").read_text().splitlines()
        assert report[0] == "model,accuracy,precision,recall,f1"
        assert len(report) == 4  # header + 3 model rows

    def test_predict_verdicts(self, tmp_path, config_path, full_run):
        posts_file = tmp_path / "new_posts.jsonl"
        lines = (full_run / "posts.jsonl").read_text().splitlines()[:3]
        posts_file.write_text("\n".join(lines) + "\n")
        assert run_stage("predict", config_path, full_run, "--posts", str(posts_file)) == 0
        verdicts = [json.loads(l) for l in (full_run / "verdicts.jsonl").read_text().splitlines()]
        assert len(verdicts) == 3
        for v in verdicts:
            assert v["label"] in ("bot", "fan", "genuine")
            assert abs(sum(v["probs"]) - 1.0) < 1e-9

    def test_predict_empty_input(self, tmp_path, config_path, full_run):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        assert run_stage("predict", config_path, full_run, "--posts", str(empty)) == 0
        assert (full_run / "verdicts.jsonl").read_text() == ""

    def test_malformed_posts_line_number(self, tmp_path, config_path, full_run, capsys):
        bad = tmp_path / "bad.jsonl"
        good_line = (full_run / "posts.jsonl").read_text().splitlines()[0]
        bad.write_text(good_line + "\n{not json}\n")
        assert run_stage("predict", config_path, full_run, "--posts", str(bad)) == 3
        err = capsys.readouterr().err
        assert ":2:" in err

    def test_unknown_publisher_is_data_error(self, tmp_path, config_path, full_run):
        orphan = tmp_path / "orphan.jsonl"
        orphan.write_text(json.dumps({"publisher_id": "ghost", "post_id": "x"}) + "\n")
        assert run_stage("predict", config_path, full_run, "--posts", str(orphan)) == 3


class TestDeterminism:
    def hash_outputs(self, out_dir):
        digests = {}
        for name in sorted(os.listdir(out_dir)):
            if name.endswith(".manifest.json"):
                continue  # manifests carry timestamps by design
            with open(out_dir / name, "rb") as fh:
                digests[name] = hashlib.sha256(fh.read()).hexdigest()
        return digests

    def test_byte_identical_runs(self, tmp_path, config_path):
        runs = []
        for sub in ("r1", "r2"):
            out = tmp_path / sub
            for stage in ("synth", "identify", "cluster", "train"):
                assert run_stage(stage, config_path, out) == 0
            runs.append(self.hash_outputs(out))
        assert runs[0] == runs[1]

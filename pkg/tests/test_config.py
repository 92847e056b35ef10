"""Run configuration loading, validation, and the manifest hash."""

import dataclasses
import json

import pytest

from vuldat.config import (
    RunConfig,
    build_run_manifest,
    config_hash,
    load_config,
    write_run_manifest,
)
from vuldat.errors import ConfigurationError


def test_defaults():
    cfg = RunConfig()
    assert cfg.model_name == "test-hash"
    assert cfg.backend == "test-hash"
    assert cfg.preprocess_mode == "full"
    assert cfg.threshold == 0.60
    assert cfg.top_n == 150
    assert cfg.disjoint_policy == "fp"
    cfg.validate()


def test_load_none_gives_defaults():
    assert load_config(None) == RunConfig()


def test_toml_round_trip(tmp_path):
    cfg = RunConfig(model_name="all-MiniLM-L6-v2", backend="remote", threshold=0.45, top_n=25)
    path = tmp_path / "run.toml"
    path.write_text(cfg.to_toml())
    assert load_config(path) == cfg


def test_partial_file_overlays_defaults(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('threshold = 0.5\npreprocess_mode = "partial"\n')
    cfg = load_config(path)
    assert cfg.threshold == 0.5
    assert cfg.preprocess_mode == "partial"
    assert cfg.top_n == 150  # untouched default


def test_unknown_keys_rejected(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('thresold = 0.5\nmodle = "x"\n')
    with pytest.raises(ConfigurationError, match="unknown config keys: modle, thresold"):
        load_config(path)


@pytest.mark.parametrize(
    "body, message",
    [
        ('threshold = "high"', "threshold must be a number"),
        ("threshold = true", "threshold must be a number"),
        ("top_n = 1.5", "top_n must be an integer"),
        ("top_n = false", "top_n must be an integer"),
        ("model_name = 3", "model_name must be a string"),
        ("threshold = ", "cannot parse config"),
    ],
)
def test_bad_value_types(tmp_path, body, message):
    path = tmp_path / "run.toml"
    path.write_text(body + "\n")
    with pytest.raises(ConfigurationError, match=message):
        load_config(path)


def test_integer_threshold_coerced(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text("threshold = 1\n")
    cfg = load_config(path)
    assert cfg.threshold == 1.0 and isinstance(cfg.threshold, float)


@pytest.mark.parametrize(
    "changes, message",
    [
        ({"backend": "local"}, "unknown backend"),
        ({"model_name": "bert-base"}, "unknown model"),
        ({"preprocess_mode": "medium"}, "unknown preprocess mode"),
        ({"disjoint_policy": "drop"}, "unknown disjoint policy"),
        ({"threshold": 1.5}, "outside"),
        ({"top_n": 0}, "top_n"),
    ],
)
def test_validate_rejects_bad_values(changes, message):
    cfg = dataclasses.replace(RunConfig(), **changes)
    with pytest.raises(ConfigurationError, match=message):
        cfg.validate()


def test_semantic_dict_fields():
    semantic = RunConfig().semantic_dict()
    assert sorted(semantic) == [
        "backend", "disjoint_policy", "model_name", "preprocess_mode", "threshold", "top_n",
    ]


def test_config_hash_ignores_paths():
    a = RunConfig(snapshot_dir="/tmp/run-a/snapshot", reports_dir="/tmp/run-a/reports")
    b = RunConfig(snapshot_dir="/data/elsewhere", reports_dir="reports")
    assert config_hash(a) == config_hash(b)


def test_config_hash_tracks_semantic_fields():
    base = RunConfig()
    assert config_hash(base) != config_hash(dataclasses.replace(base, threshold=0.61))
    assert config_hash(base) != config_hash(dataclasses.replace(base, top_n=151))
    assert config_hash(base) != config_hash(dataclasses.replace(base, preprocess_mode="partial"))


def test_config_hash_tracks_snapshot_manifest():
    cfg = RunConfig()
    manifest_a = {"snapshot_date": "2024-01-15", "counts": {"cves": 10}}
    manifest_b = {"snapshot_date": "2024-02-15", "counts": {"cves": 10}}
    assert config_hash(cfg, manifest_a) != config_hash(cfg, manifest_b)
    assert config_hash(cfg, manifest_a) == config_hash(cfg, dict(manifest_a))


def test_run_manifest_contents_and_stability(tmp_path):
    cfg = RunConfig()
    snapshot_manifest = {"snapshot_date": "2024-01-15"}
    manifest = build_run_manifest("evaluate", cfg, snapshot_manifest)
    assert manifest["schema_version"] == 1
    assert manifest["command"] == "evaluate"
    assert manifest["manifest_id"] == manifest["config_hash"][:16]
    assert len(manifest["config_hash"]) == 64
    assert "timestamp" not in json.dumps(manifest)
    again = build_run_manifest("evaluate", cfg, snapshot_manifest)
    assert again == manifest

    path = write_run_manifest(manifest, tmp_path / "out")
    assert path.name == "run_manifest.json"
    assert json.loads(path.read_text()) == manifest
    rewritten = write_run_manifest(manifest, tmp_path / "out")
    assert rewritten.read_bytes() == path.read_bytes()


def test_manifest_id_differs_per_command_config_only():
    cfg = RunConfig()
    embed_manifest = build_run_manifest("embed", cfg, None)
    eval_manifest = build_run_manifest("evaluate", cfg, None)
    # command is recorded but does not enter the hash
    assert embed_manifest["manifest_id"] == eval_manifest["manifest_id"]
    assert embed_manifest["command"] != eval_manifest["command"]

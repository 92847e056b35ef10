"""Sidecar release criteria, one test per line.

The deterministic hash encoder stands in for real weights when the model hub
is unreachable; the wire format, registry and fixture files are identical
either way.
"""

import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from vuldat.embedding import FixtureBackend, get_model, load_store
from vuldat.embedding import embed as vuldat_embed
from vuldat.preprocess import CleanText, PreprocessMode
from vuldat.retrieval import cosine

from embed_service import create_app, export_fixtures, hash_encoder_factory
from conftest import write_texts_jsonl

EXPECTED_DIMENSIONS = {
    "multi-qa-MiniLM-L6-cos-v1": 384,
    "multi-qa-distilbert-cos-v1": 768,
    "all-MiniLM-L12-v2": 384,
    "all-distilroberta-v1": 768,
    "multi-qa-mpnet-base-dot-v1": 768,
    "all-MiniLM-L6-v2": 384,
    "paraphrase-multilingual-MiniLM-L12-v2": 384,
    "all-mpnet-base-v2": 768,
    "paraphrase-MiniLM-L6-v2": 384,
}


@pytest.fixture()
def client():
    with TestClient(create_app(hash_encoder_factory)) as client:
        yield client


def test_criterion_models_returns_nine_entries_with_registry_dimensions(client):
    rows = client.get("/models").json()["models"]
    assert len(rows) == 9
    assert {row["model_name"]: row["dimension"] for row in rows} == EXPECTED_DIMENSIONS


def test_criterion_embed_self_similarity(client):
    for model_name in ("all-MiniLM-L6-v2", "multi-qa-mpnet-base-dot-v1"):
        for text in ("steal web session cooki", "café ☃", "a"):
            response = client.post(
                "/embed", json={"model_name": model_name, "texts": [text]}
            )
            assert response.status_code == 200
            vec = np.asarray(response.json()["vectors"][0], dtype=np.float64)
            self_cos = float(np.dot(vec, vec)) / (
                math.sqrt(float(np.dot(vec, vec))) ** 2
            )
            assert self_cos == pytest.approx(1.0, abs=1e-6)


def test_criterion_exported_fixtures_pass_primary_round_trip(tmp_path):
    rows = [
        ("T1539", "steal web session cooki"),
        ("CVE-2020-0001", "overflow in the parser"),
        ("CVE-2020-0002", "cross site script in login form"),
    ]
    texts_file = write_texts_jsonl(tmp_path / "texts.jsonl", rows)
    export_fixtures(
        "all-MiniLM-L6-v2", texts_file, tmp_path / "fixture",
        encoder_factory=hash_encoder_factory,
    )

    fixture = load_store(tmp_path / "fixture")
    assert fixture.ids() == [source_id for source_id, _ in rows]
    for source_id, _ in rows:
        vector = fixture.get(source_id)
        assert cosine(vector, vector) == pytest.approx(1.0, abs=1e-6)

    texts = [CleanText(text, PreprocessMode.FULL, source_id) for source_id, text in rows]
    replayed = vuldat_embed(texts, FixtureBackend(fixture), get_model("all-MiniLM-L6-v2"))
    for source_id, _ in rows:
        assert np.array_equal(
            replayed.get(source_id).values, fixture.get(source_id).values
        )

"""Shared fixtures: an app wired to the deterministic hash encoder."""

import json

import pytest
from fastapi.testclient import TestClient

from embed_service import create_app, hash_encoder_factory


@pytest.fixture()
def client():
    with TestClient(create_app(hash_encoder_factory)) as client:
        yield client


class CountingFactory:
    """Wraps a factory and counts loads per model name."""

    def __init__(self, inner=hash_encoder_factory):
        self.inner = inner
        self.loads = []

    def __call__(self, spec):
        self.loads.append(spec.model_name)
        return self.inner(spec)


def write_texts_jsonl(path, rows):
    lines = [json.dumps({"id": source_id, "text": text}) for source_id, text in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path

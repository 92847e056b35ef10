"""Embedding backends and vector stores.

Three interchangeable backends produce vectors for normalized texts: a
deterministic hashing embedder for tests, a fixture loader that replays
precomputed vectors by source id, and an HTTP client for the remote
embedding service. Stores persist as a JSON header (`<base>.embjson`)
plus raw little-endian float32 rows (`<base>.embbin`) and round-trip
bit-exactly.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
import requests

from .errors import (
    ConfigurationError,
    CorruptStoreError,
    DataError,
    ProtocolError,
    SchemaVersionError,
    TransportError,
    ValidationError,
)
from .preprocess import CleanText, PreprocessMode

STORE_SCHEMA_VERSION = 1
TEST_HASH_MODEL = "test-hash"

_REMOTE_BATCH_LIMIT = 256


@dataclass(frozen=True)
class ModelSpec:
    """One row of the pretrained-model registry."""

    model_name: str
    dimension: int
    size_hint_mb: int

    def __post_init__(self) -> None:
        if self.dimension <= 0:
            raise ValidationError(f"model {self.model_name}: dimension must be positive")


# the nine sentence-transformer rows, registry order, plus the test embedder
MODEL_REGISTRY: tuple[ModelSpec, ...] = (
    ModelSpec("multi-qa-MiniLM-L6-cos-v1", 384, 80),
    ModelSpec("multi-qa-distilbert-cos-v1", 768, 250),
    ModelSpec("all-MiniLM-L12-v2", 384, 120),
    ModelSpec("all-distilroberta-v1", 768, 290),
    ModelSpec("multi-qa-mpnet-base-dot-v1", 768, 420),
    ModelSpec("all-MiniLM-L6-v2", 384, 80),
    ModelSpec("paraphrase-multilingual-MiniLM-L12-v2", 384, 420),
    ModelSpec("all-mpnet-base-v2", 768, 420),
    ModelSpec("paraphrase-MiniLM-L6-v2", 384, 61),
    ModelSpec(TEST_HASH_MODEL, 64, 0),
)

_REGISTRY_BY_NAME = {spec.model_name: spec for spec in MODEL_REGISTRY}


def get_model(model_name: str) -> ModelSpec:
    try:
        return _REGISTRY_BY_NAME[model_name]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY_BY_NAME))
        raise ConfigurationError(f"unknown model {model_name!r}; known: {known}") from None


@dataclass
class EmbeddingVector:
    """A finite vector tied to its model and originating record."""

    values: np.ndarray
    model: ModelSpec
    source_id: str = ""

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float32)
        if arr.ndim != 1:
            raise ValidationError(f"vector for {self.source_id!r} must be one-dimensional")
        if arr.shape[0] != self.model.dimension:
            raise ValidationError(
                f"vector for {self.source_id!r} has length {arr.shape[0]}, "
                f"model {self.model.model_name} expects {self.model.dimension}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"vector for {self.source_id!r} contains non-finite entries")
        self.values = arr


@dataclass
class EmbeddingStore:
    """Vectors for one model and one preprocess mode, keyed by source id."""

    model: ModelSpec
    mode: PreprocessMode
    vectors: dict[str, EmbeddingVector] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for source_id, vec in self.vectors.items():
            if vec.model != self.model:
                raise ValidationError(
                    f"store model {self.model.model_name} but vector {source_id!r} "
                    f"was embedded with {vec.model.model_name}"
                )

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, source_id: str) -> bool:
        return source_id in self.vectors

    def get(self, source_id: str) -> EmbeddingVector:
        try:
            return self.vectors[source_id]
        except KeyError:
            raise DataError(f"no vector stored for {source_id!r}") from None

    def ids(self) -> list[str]:
        return list(self.vectors)

    def items(self) -> Iterator[tuple[str, EmbeddingVector]]:
        return iter(self.vectors.items())


class EmbeddingBackend:
    """Turns a batch of normalized texts into vectors for one model."""

    name = "abstract"

    def embed_batch(self, items: Sequence[CleanText], model: ModelSpec) -> list[np.ndarray]:
        raise NotImplementedError


def _hash_features(text: str) -> Iterator[str]:
    tokens = text.split()
    if not tokens:
        yield "__empty__"
        return
    for token in tokens:
        yield "t:" + token
        padded = f"^{token}$"
        for i in range(len(padded) - 2):
            yield "g:" + padded[i : i + 3]


def _feature_slot(feature: str, dimension: int) -> tuple[int, float]:
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8).digest()
    value = int.from_bytes(digest, "little")
    sign = 1.0 if value & (1 << 63) else -1.0
    return value % dimension, sign


def test_hash_vector(text: str, dimension: int) -> np.ndarray:
    """Deterministic signed feature-hashing embedding, L2-normalized."""
    acc = np.zeros(dimension, dtype=np.float64)
    for feature in _hash_features(text):
        slot, sign = _feature_slot(feature, dimension)
        acc[slot] += sign
    norm = math.sqrt(float(np.dot(acc, acc)))
    if norm == 0.0:
        # signed counts can cancel; fall back to a fixed unit vector
        acc[0] = 1.0
        norm = 1.0
    return (acc / norm).astype(np.float32)


class TestHashBackend(EmbeddingBackend):
    """Dependency-free deterministic embedder for tests and fixtures."""

    name = "test-hash"

    def embed_batch(self, items: Sequence[CleanText], model: ModelSpec) -> list[np.ndarray]:
        return [test_hash_vector(item.text, model.dimension) for item in items]


class FixtureBackend(EmbeddingBackend):
    """Replays precomputed vectors, looked up by source id."""

    name = "fixture"

    def __init__(self, store: EmbeddingStore) -> None:
        self.store = store

    def embed_batch(self, items: Sequence[CleanText], model: ModelSpec) -> list[np.ndarray]:
        if model != self.store.model:
            raise ConfigurationError(
                f"fixture store holds {self.store.model.model_name}, requested {model.model_name}"
            )
        return [self.store.get(item.source_id).values for item in items]


class RemoteBackend(EmbeddingBackend):
    """HTTP client for the embedding sidecar's POST /embed."""

    name = "remote"

    def __init__(
        self,
        url: str,
        session: requests.Session | None = None,
        max_attempts: int = 3,
        timeout: float = 60.0,
        sleep=time.sleep,
    ) -> None:
        if not url:
            raise ConfigurationError("remote backend needs a service URL (VULDAT_EMBED_URL)")
        self.url = url.rstrip("/")
        self.session = session if session is not None else requests.Session()
        self.max_attempts = max(1, max_attempts)
        self.timeout = timeout
        self._sleep = sleep

    def embed_batch(self, items: Sequence[CleanText], model: ModelSpec) -> list[np.ndarray]:
        vectors: list[np.ndarray] = []
        for start in range(0, len(items), _REMOTE_BATCH_LIMIT):
            chunk = items[start : start + _REMOTE_BATCH_LIMIT]
            payload = {"model_name": model.model_name, "texts": [item.text for item in chunk]}
            body = self._post(payload)
            vectors.extend(self._parse_vectors(body, len(chunk), model))
        return vectors

    def _post(self, payload: dict) -> dict:
        last_error: Exception | None = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                response = self.session.post(
                    f"{self.url}/embed", json=payload, timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_error = exc
                if attempt < self.max_attempts:
                    self._sleep(0.1 * attempt)
                continue
            if response.status_code >= 500:
                last_error = TransportError(
                    f"embedding service returned {response.status_code}", attempts=attempt
                )
                if attempt < self.max_attempts:
                    self._sleep(0.1 * attempt)
                continue
            if response.status_code != 200:
                raise ProtocolError(
                    f"embedding service rejected request ({response.status_code}): "
                    f"{response.text[:200]}",
                    attempts=attempt,
                )
            try:
                return response.json()
            except ValueError as exc:
                raise ProtocolError(
                    f"embedding service returned invalid JSON: {exc}", attempts=attempt
                ) from exc
        raise TransportError(
            f"embedding service unreachable after {self.max_attempts} attempts: {last_error}",
            attempts=self.max_attempts,
        )

    @staticmethod
    def _parse_vectors(body: dict, expected: int, model: ModelSpec) -> list[np.ndarray]:
        vectors = body.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != expected:
            raise ProtocolError(
                f"expected {expected} vectors, got "
                f"{len(vectors) if isinstance(vectors, list) else type(vectors).__name__}"
            )
        out = []
        for row in vectors:
            arr = np.asarray(row, dtype=np.float32)
            if arr.ndim != 1 or arr.shape[0] != model.dimension:
                raise ProtocolError(
                    f"service returned a {arr.shape}-shaped vector, "
                    f"model {model.model_name} expects dimension {model.dimension}"
                )
            out.append(arr)
        return out


def embed(
    texts: Sequence[CleanText],
    backend: EmbeddingBackend,
    model: ModelSpec,
    mode: object | None = None,
) -> EmbeddingStore:
    """Embed texts in order into a fresh store keyed by source id."""
    if texts:
        modes = {t.mode for t in texts}
        if len(modes) > 1:
            raise ValidationError(f"texts mix preprocess modes: {sorted(m.value for m in modes)}")
        store_mode = next(iter(modes))
        if mode is not None and PreprocessMode.parse(mode) is not store_mode:
            raise ValidationError("requested mode disagrees with the texts' mode")
    else:
        store_mode = PreprocessMode.parse(mode if mode is not None else PreprocessMode.FULL)
    rows = backend.embed_batch(texts, model)
    if len(rows) != len(texts):
        raise ProtocolError(f"backend returned {len(rows)} vectors for {len(texts)} texts")
    vectors: dict[str, EmbeddingVector] = {}
    for item, row in zip(texts, rows):
        if item.source_id in vectors:
            raise ValidationError(f"duplicate source id {item.source_id!r} in embed batch")
        vectors[item.source_id] = EmbeddingVector(row, model, item.source_id)
    return EmbeddingStore(model, store_mode, vectors)


def _store_paths(path: str | Path) -> tuple[Path, Path]:
    base = Path(path)
    if base.suffix in (".embjson", ".embbin"):
        base = base.with_suffix("")
    return base.with_suffix(".embjson"), base.with_suffix(".embbin")


def save_store(
    store: EmbeddingStore, path: str | Path, run_manifest_id: str | None = None
) -> tuple[Path, Path]:
    """Write `<base>.embjson` + `<base>.embbin`; returns both paths."""
    json_path, bin_path = _store_paths(path)
    header = {
        "schema_version": STORE_SCHEMA_VERSION,
        "model_name": store.model.model_name,
        "dimension": store.model.dimension,
        "mode": store.mode.value,
        "count": len(store),
        "ids": store.ids(),
    }
    if run_manifest_id is not None:
        header["run_manifest_id"] = run_manifest_id
    json_path.parent.mkdir(parents=True, exist_ok=True)
    payload = b"".join(
        vec.values.astype("<f4", copy=False).tobytes() for vec in store.vectors.values()
    )
    json_path.write_text(json.dumps(header, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    bin_path.write_bytes(payload)
    return json_path, bin_path


def load_store(path: str | Path) -> EmbeddingStore:
    """Load a store pair written by save_store; bit-exact round-trip."""
    json_path, bin_path = _store_paths(path)
    try:
        header = json.loads(json_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise CorruptStoreError(f"cannot read store header {json_path}: {exc}") from exc
    except ValueError as exc:
        raise CorruptStoreError(f"store header {json_path} is not valid JSON: {exc}") from exc
    if not isinstance(header, dict):
        raise CorruptStoreError(f"store header {json_path} must be a JSON object")
    version = header.get("schema_version")
    if version != STORE_SCHEMA_VERSION:
        raise SchemaVersionError(
            f"store schema version {version!r} unsupported (expected {STORE_SCHEMA_VERSION})"
        )
    missing = [k for k in ("model_name", "dimension", "mode", "count", "ids") if k not in header]
    if missing:
        raise CorruptStoreError(f"store header missing fields: {', '.join(missing)}")
    model = get_model(header["model_name"])
    if header["dimension"] != model.dimension:
        raise CorruptStoreError(
            f"header dimension {header['dimension']} does not match "
            f"model {model.model_name} ({model.dimension})"
        )
    ids = header["ids"]
    count = header["count"]
    if not isinstance(ids, list) or count != len(ids):
        raise CorruptStoreError(f"header count {count} does not match {len(ids)} ids")
    if len(set(ids)) != len(ids):
        raise CorruptStoreError("store header contains duplicate ids")
    try:
        mode = PreprocessMode.parse(header["mode"])
    except ConfigurationError as exc:
        raise CorruptStoreError(str(exc)) from exc
    try:
        raw = bin_path.read_bytes()
    except OSError as exc:
        raise CorruptStoreError(f"cannot read store payload {bin_path}: {exc}") from exc
    expected = count * model.dimension * 4
    if len(raw) != expected:
        raise CorruptStoreError(
            f"store payload {bin_path} has {len(raw)} bytes, expected {expected}"
        )
    matrix = np.frombuffer(raw, dtype="<f4").reshape(count, model.dimension)
    vectors = {
        source_id: EmbeddingVector(matrix[i], model, source_id)
        for i, source_id in enumerate(ids)
    }
    return EmbeddingStore(model, mode, vectors)

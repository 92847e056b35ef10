"""Record embedding vectors into the primary package's fixture store format."""

import json
from pathlib import Path

import numpy as np

from vuldat.embedding import EmbeddingStore, EmbeddingVector, save_store
from vuldat.preprocess import PreprocessMode

from embed_service.app import BATCH_LIMIT
from embed_service.encoders import EncoderFactory, real_encoder_factory, service_model


def read_texts_jsonl(path: str | Path) -> list[tuple[str, str]]:
    """One {"id": ..., "text": ...} object per line; blank lines skipped."""
    rows: list[tuple[str, str]] = []
    seen: set[str] = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            source_id = record["id"]
            text = record["text"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ValueError(f"{path}:{lineno}: bad texts record: {exc!r}") from exc
        if not isinstance(source_id, str) or not isinstance(text, str):
            raise ValueError(f"{path}:{lineno}: id and text must be strings")
        if source_id in seen:
            raise ValueError(f"{path}:{lineno}: duplicate id {source_id!r}")
        seen.add(source_id)
        rows.append((source_id, text))
    return rows


def export_fixtures(
    model_name: str,
    texts_path: str | Path,
    out_path: str | Path,
    mode: str = "full",
    encoder_factory: EncoderFactory = real_encoder_factory,
) -> tuple[Path, Path]:
    """Embed a texts file and write `<out>.embjson` + `<out>.embbin`.

    Raises before touching disk when the input is empty or malformed.
    """
    spec = service_model(model_name)
    store_mode = PreprocessMode.parse(mode)
    rows = read_texts_jsonl(texts_path)
    if not rows:
        raise ValueError(f"{texts_path}: no texts to export")
    encoder = encoder_factory(spec)
    vectors: dict[str, EmbeddingVector] = {}
    for start in range(0, len(rows), BATCH_LIMIT):
        chunk = rows[start : start + BATCH_LIMIT]
        matrix = np.asarray(encoder.encode([text for _, text in chunk]), dtype=np.float32)
        for (source_id, _), values in zip(chunk, matrix):
            vectors[source_id] = EmbeddingVector(values, spec, source_id)
    store = EmbeddingStore(spec, store_mode, vectors)
    return save_store(store, out_path)

"""The HTTP application: GET /models and POST /embed."""

import threading
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.concurrency import run_in_threadpool

from embed_service.encoders import (
    SERVICE_MODELS,
    Encoder,
    EncoderFactory,
    ModelLoadError,
    UnknownModelError,
    real_encoder_factory,
    service_model,
)

BATCH_LIMIT = 256


@dataclass
class _ModelSlot:
    encoder: Encoder
    # inference per model is serialized to bound memory
    lock: threading.Lock = field(default_factory=threading.Lock)


class EncoderPool:
    """Lazy per-model encoder cache."""

    def __init__(self, factory: EncoderFactory) -> None:
        self._factory = factory
        self._slots: dict[str, _ModelSlot] = {}
        self._load_lock = threading.Lock()

    def _slot(self, spec) -> _ModelSlot:
        with self._load_lock:
            slot = self._slots.get(spec.model_name)
            if slot is None:
                slot = _ModelSlot(self._factory(spec))
                self._slots[spec.model_name] = slot
            return slot

    def encode(self, spec, texts: list[str]) -> np.ndarray:
        slot = self._slot(spec)
        with slot.lock:
            return slot.encoder.encode(texts)

    def loaded_models(self) -> list[str]:
        with self._load_lock:
            return sorted(self._slots)


def _parse_embed_request(body: object) -> tuple[str, list[str]]:
    if not isinstance(body, dict):
        raise HTTPException(400, "request body must be a JSON object")
    model_name = body.get("model_name")
    if not isinstance(model_name, str):
        raise HTTPException(400, "model_name must be a string")
    texts = body.get("texts")
    if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
        raise HTTPException(400, "texts must be a list of strings")
    if not texts:
        raise HTTPException(400, "texts must be nonempty")
    if len(texts) > BATCH_LIMIT:
        raise HTTPException(413, f"batch of {len(texts)} texts exceeds the limit of {BATCH_LIMIT}")
    return model_name, texts


def create_app(encoder_factory: EncoderFactory = real_encoder_factory) -> FastAPI:
    app = FastAPI(title="embed-service", version="0.1.0")
    pool = EncoderPool(encoder_factory)
    app.state.pool = pool

    @app.get("/models")
    def models() -> dict:
        return {
            "models": [
                {
                    "model_name": spec.model_name,
                    "dimension": spec.dimension,
                    "size_hint_mb": spec.size_hint_mb,
                }
                for spec in SERVICE_MODELS
            ]
        }

    @app.post("/embed")
    async def embed(request: Request) -> dict:
        try:
            body = await request.json()
        except ValueError:
            raise HTTPException(400, "request body is not valid JSON") from None
        model_name, texts = _parse_embed_request(body)
        try:
            spec = service_model(model_name)
        except UnknownModelError as exc:
            raise HTTPException(400, str(exc)) from None
        try:
            matrix = await run_in_threadpool(pool.encode, spec, texts)
        except ModelLoadError as exc:
            raise HTTPException(503, str(exc)) from None
        return {
            "model_name": spec.model_name,
            "dimension": spec.dimension,
            "vectors": [row.tolist() for row in matrix],
        }

    return app

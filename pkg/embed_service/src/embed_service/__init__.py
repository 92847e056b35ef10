"""HTTP sidecar and fixture exporter for vuldat's sentence-embedding models."""

from embed_service.app import BATCH_LIMIT, create_app
from embed_service.encoders import (
    SERVICE_MODELS,
    Encoder,
    ModelLoadError,
    UnknownModelError,
    hash_encoder_factory,
    real_encoder_factory,
    service_model,
)
from embed_service.export import export_fixtures, read_texts_jsonl

__all__ = [
    "BATCH_LIMIT",
    "SERVICE_MODELS",
    "Encoder",
    "ModelLoadError",
    "UnknownModelError",
    "create_app",
    "export_fixtures",
    "hash_encoder_factory",
    "read_texts_jsonl",
    "real_encoder_factory",
    "service_model",
]

"""Encoder loading: real sentence-transformers models and a deterministic stand-in.

The service registry is the primary package's model registry minus its test
embedder row; dimensions and size hints come from there so the two packages
cannot drift apart.
"""

from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np

from vuldat.embedding import MODEL_REGISTRY, TEST_HASH_MODEL, ModelSpec, test_hash_vector

SERVICE_MODELS: tuple[ModelSpec, ...] = tuple(
    spec for spec in MODEL_REGISTRY if spec.model_name != TEST_HASH_MODEL
)
_BY_NAME = {spec.model_name: spec for spec in SERVICE_MODELS}


class UnknownModelError(LookupError):
    """The requested model is not one of the served registry rows."""


class ModelLoadError(RuntimeError):
    """The model's weights could not be loaded or produced bad output."""


def service_model(model_name: str) -> ModelSpec:
    try:
        return _BY_NAME[model_name]
    except KeyError:
        known = ", ".join(sorted(_BY_NAME))
        raise UnknownModelError(f"unknown model {model_name!r}; known: {known}") from None


class Encoder(Protocol):
    def encode(self, texts: Sequence[str]) -> np.ndarray: ...


EncoderFactory = Callable[[ModelSpec], Encoder]


def _check_shape(matrix: np.ndarray, count: int, spec: ModelSpec) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=np.float32)
    if matrix.shape != (count, spec.dimension):
        raise ModelLoadError(
            f"{spec.model_name} returned shape {matrix.shape}, "
            f"expected ({count}, {spec.dimension})"
        )
    return matrix


@dataclass
class _RealEncoder:
    model: object
    spec: ModelSpec

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        out = self.model.encode(
            list(texts), convert_to_numpy=True, show_progress_bar=False
        )
        return _check_shape(out, len(texts), self.spec)


def real_encoder_factory(spec: ModelSpec) -> Encoder:
    """Load sentence-transformers weights, pinned to deterministic eval mode."""
    try:
        from sentence_transformers import SentenceTransformer
    except ImportError as exc:
        raise ModelLoadError(f"sentence-transformers is not installed: {exc}") from exc
    try:
        model = SentenceTransformer(spec.model_name)
        model.eval()
    except Exception as exc:
        raise ModelLoadError(f"cannot load {spec.model_name}: {exc}") from exc
    return _RealEncoder(model, spec)


@dataclass
class _HashEncoder:
    spec: ModelSpec

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        rows = [test_hash_vector(text, self.spec.dimension) for text in texts]
        return _check_shape(np.stack(rows) if rows else np.empty((0, 0)), len(texts), self.spec)


def hash_encoder_factory(spec: ModelSpec) -> Encoder:
    """Deterministic feature-hash vectors at the registry dimension.

    Not a language model: serves the wire and fixture formats for offline
    smoke tests without downloading weights.
    """
    return _HashEncoder(spec)

"""Cosine-similarity retrieval over embedding stores.

Scores every CVE vector against one attack-text vector with a single
float64 kernel, keeps scores strictly above the threshold, orders by
descending score with cve_id as the tie-break, and truncates to top_n.
Batch retrieval reuses the exact same kernel per pair, so it is
element-wise identical to independent single queries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .embedding import EmbeddingStore, EmbeddingVector, ModelSpec
from .errors import ConfigurationError, DegenerateInputError, ValidationError
from .preprocess import PreprocessMode

DEFAULT_THRESHOLD = 0.60
DEFAULT_TOP_N = 150


@dataclass(frozen=True)
class SimilarityHit:
    """One retrieved CVE with its cosine score."""

    cve_id: str
    score: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.score):
            raise ValidationError(f"hit {self.cve_id}: score must be finite")


@dataclass(frozen=True)
class RetrievalConfig:
    """Threshold and list-size bounds for building detection lists."""

    threshold: float = DEFAULT_THRESHOLD
    top_n: int = DEFAULT_TOP_N
    model: ModelSpec | None = None
    mode: PreprocessMode | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigurationError(f"threshold {self.threshold} outside [0, 1]")
        if self.top_n < 1:
            raise ConfigurationError(f"top_n {self.top_n} must be >= 1")


@dataclass(frozen=True)
class DetectionList:
    """Ranked, thresholded CVE hits for one attack query."""

    technique_id: str
    hits: tuple[SimilarityHit, ...]
    threshold: float
    top_n: int
    model: ModelSpec
    mode: PreprocessMode

    def __post_init__(self) -> None:
        if len(self.hits) > self.top_n:
            raise ValidationError(
                f"{self.technique_id}: {len(self.hits)} hits exceed top_n {self.top_n}"
            )
        previous = None
        for hit in self.hits:
            if hit.score <= self.threshold:
                raise ValidationError(
                    f"{self.technique_id}: hit {hit.cve_id} at {hit.score} "
                    f"not above threshold {self.threshold}"
                )
            if previous is not None and hit.score > previous:
                raise ValidationError(f"{self.technique_id}: hit scores must be non-increasing")
            previous = hit.score

    def __len__(self) -> int:
        return len(self.hits)

    def cve_ids(self) -> list[str]:
        return [hit.cve_id for hit in self.hits]

    def cve_set(self) -> set[str]:
        return {hit.cve_id for hit in self.hits}

    def as_json_dict(self) -> dict:
        return {
            "technique_id": self.technique_id,
            "threshold": self.threshold,
            "top_n": self.top_n,
            "model_name": self.model.model_name,
            "mode": self.mode.value,
            "hits": [{"cve_id": h.cve_id, "score": h.score} for h in self.hits],
        }


def detection_from_json(data: dict) -> DetectionList:
    """Rebuild a DetectionList from its as_json_dict form."""
    from .embedding import get_model

    try:
        return DetectionList(
            technique_id=data["technique_id"],
            hits=tuple(SimilarityHit(h["cve_id"], h["score"]) for h in data["hits"]),
            threshold=data["threshold"],
            top_n=data["top_n"],
            model=get_model(data["model_name"]),
            mode=PreprocessMode.parse(data["mode"]),
        )
    except (KeyError, TypeError, ConfigurationError) as exc:
        raise ValidationError(f"malformed detection list record: {exc}") from exc


def _vector_values(v) -> np.ndarray:
    return v.values if isinstance(v, EmbeddingVector) else np.asarray(v)


def _self_dot(values: np.ndarray) -> float:
    a = values.astype(np.float64)
    return float(np.dot(a, a))


def _cosine_kernel(a: np.ndarray, b: np.ndarray, aa: float, bb: float) -> float:
    # one shared kernel so batch scoring is bit-identical to single queries
    return float(np.dot(a, b) / math.sqrt(aa * bb))


def cosine(u, v) -> float:
    """Cosine similarity of two same-dimension non-zero vectors."""
    a = _vector_values(u)
    b = _vector_values(v)
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    a64 = a.astype(np.float64)
    b64 = b.astype(np.float64)
    aa = float(np.dot(a64, a64))
    bb = float(np.dot(b64, b64))
    if aa == 0.0 or bb == 0.0:
        raise DegenerateInputError("cosine undefined for a zero vector")
    return _cosine_kernel(a64, b64, aa, bb)


def _check_store_compat(query_model: ModelSpec, store: EmbeddingStore, cfg: RetrievalConfig):
    if query_model != store.model:
        raise ConfigurationError(
            f"query model {query_model.model_name} does not match "
            f"store model {store.model.model_name}"
        )
    if cfg.model is not None and cfg.model != store.model:
        raise ConfigurationError(
            f"config model {cfg.model.model_name} does not match "
            f"store model {store.model.model_name}"
        )
    if cfg.mode is not None and cfg.mode is not store.mode:
        raise ConfigurationError(
            f"config mode {cfg.mode.value} does not match store mode {store.mode.value}"
        )


def _scored_hits(
    query: EmbeddingVector,
    store: EmbeddingStore,
    cfg: RetrievalConfig,
    self_dots: dict[str, float],
) -> list[SimilarityHit]:
    q64 = query.values.astype(np.float64)
    qq = float(np.dot(q64, q64))
    if qq == 0.0:
        raise DegenerateInputError(f"query vector {query.source_id!r} is zero")
    hits = []
    for cve_id, vec in store.items():
        bb = self_dots[cve_id]
        if bb == 0.0:
            raise DegenerateInputError(f"stored vector {cve_id!r} is zero")
        score = _cosine_kernel(q64, vec.values.astype(np.float64), qq, bb)
        if score > cfg.threshold:
            hits.append(SimilarityHit(cve_id, score))
    hits.sort(key=lambda h: (-h.score, h.cve_id))
    return hits[: cfg.top_n]


def retrieve(
    query: EmbeddingVector,
    store: EmbeddingStore,
    cfg: RetrievalConfig | None = None,
    tag: str | None = None,
) -> DetectionList:
    """Build the detection list for one attack vector."""
    cfg = cfg if cfg is not None else RetrievalConfig()
    _check_store_compat(query.model, store, cfg)
    self_dots = {cve_id: _self_dot(vec.values) for cve_id, vec in store.items()}
    hits = _scored_hits(query, store, cfg, self_dots)
    return DetectionList(
        technique_id=tag if tag is not None else (query.source_id or "query"),
        hits=tuple(hits),
        threshold=cfg.threshold,
        top_n=cfg.top_n,
        model=store.model,
        mode=store.mode,
    )


def retrieve_all(
    technique_store: EmbeddingStore,
    cve_store: EmbeddingStore,
    cfg: RetrievalConfig | None = None,
) -> dict[str, DetectionList]:
    """Detection list per technique; equal to per-technique retrieve calls."""
    cfg = cfg if cfg is not None else RetrievalConfig()
    if technique_store.model != cve_store.model:
        raise ConfigurationError(
            f"technique store model {technique_store.model.model_name} does not "
            f"match CVE store model {cve_store.model.model_name}"
        )
    if technique_store.mode is not cve_store.mode:
        raise ConfigurationError(
            f"technique store mode {technique_store.mode.value} does not "
            f"match CVE store mode {cve_store.mode.value}"
        )
    # self-dots computed once; float64 dot of the same row is bit-stable
    self_dots = {cve_id: _self_dot(vec.values) for cve_id, vec in cve_store.items()}
    out: dict[str, DetectionList] = {}
    for technique_id, query in technique_store.items():
        _check_store_compat(query.model, cve_store, cfg)
        hits = _scored_hits(query, cve_store, cfg, self_dots)
        out[technique_id] = DetectionList(
            technique_id=technique_id,
            hits=tuple(hits),
            threshold=cfg.threshold,
            top_n=cfg.top_n,
            model=cve_store.model,
            mode=cve_store.mode,
        )
    return out

"""Run configuration: a flat TOML file mirrored by RunConfig.

Command-line flags override file values; the effective config is
recorded in each artifact directory's run_manifest.json. The manifest id
hashes only the semantic knobs (model, backend, mode, threshold, top_n,
disjoint policy) plus the snapshot manifest, never filesystem paths, so
identical runs in different directories produce identical ids.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigurationError

MANIFEST_SCHEMA_VERSION = 1

BACKENDS = ("test-hash", "fixture", "remote")

_SEMANTIC_FIELDS = (
    "model_name",
    "backend",
    "preprocess_mode",
    "threshold",
    "top_n",
    "disjoint_policy",
)


@dataclass
class RunConfig:
    """Everything a pipeline run needs, overridable per flag."""

    snapshot_dir: str = "snapshot"
    mapping_dir: str = "mapping"
    stores_dir: str = "stores"
    reports_dir: str = "reports"
    model_name: str = "test-hash"
    backend: str = "test-hash"
    preprocess_mode: str = "full"
    threshold: float = 0.60
    top_n: int = 150
    disjoint_policy: str = "fp"
    embed_url: str = ""
    fixture_path: str = ""

    def validate(self) -> "RunConfig":
        from .embedding import get_model
        from .evaluation import DisjointPolicy
        from .preprocess import PreprocessMode
        from .retrieval import RetrievalConfig

        if self.backend not in BACKENDS:
            raise ConfigurationError(
                f"unknown backend {self.backend!r}; expected one of: {', '.join(BACKENDS)}"
            )
        get_model(self.model_name)
        PreprocessMode.parse(self.preprocess_mode)
        DisjointPolicy.parse(self.disjoint_policy)
        RetrievalConfig(threshold=self.threshold, top_n=self.top_n)
        return self

    def as_dict(self) -> dict:
        return asdict(self)

    def semantic_dict(self) -> dict:
        data = self.as_dict()
        return {name: data[name] for name in _SEMANTIC_FIELDS}

    def to_toml(self) -> str:
        lines = []
        for field in fields(self):
            value = getattr(self, field.name)
            if isinstance(value, str):
                rendered = json.dumps(value)
            elif isinstance(value, float):
                rendered = repr(value)
            else:
                rendered = str(value)
            lines.append(f"{field.name} = {rendered}")
        return "\n".join(lines) + "\n"


def load_config(path: str | Path | None = None) -> RunConfig:
    """Defaults, overlaid with the TOML file when one is given."""
    if path is None:
        return RunConfig()
    raw = Path(path).read_bytes()
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigurationError(f"cannot parse config {path}: {exc}") from exc
    known = {field.name: field for field in fields(RunConfig)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
    kwargs = {}
    for name, value in data.items():
        if name == "threshold":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigurationError(f"config key {name} must be a number")
            kwargs[name] = float(value)
        elif name == "top_n":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigurationError(f"config key {name} must be an integer")
            kwargs[name] = value
        else:
            if not isinstance(value, str):
                raise ConfigurationError(f"config key {name} must be a string")
            kwargs[name] = value
    return RunConfig(**kwargs)


def config_hash(config: RunConfig, snapshot_manifest: dict | None = None) -> str:
    payload = {
        "config": config.semantic_dict(),
        "snapshot_manifest": snapshot_manifest,
    }
    digest = hashlib.sha256(
        json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    )
    return digest.hexdigest()


def build_run_manifest(
    command: str,
    config: RunConfig,
    snapshot_manifest: dict | None = None,
) -> dict:
    """Reproducibility record; deliberately timestamp-free."""
    manifest = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "command": command,
        "config": config.as_dict(),
        "config_hash": config_hash(config, snapshot_manifest),
        "snapshot_manifest": snapshot_manifest,
    }
    manifest["manifest_id"] = manifest["config_hash"][:16]
    return manifest


def write_run_manifest(manifest: dict, out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "run_manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path

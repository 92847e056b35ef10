"""Snapshot persistence: a directory of four JSONL files plus a manifest.

Layout::

    <dir>/manifest.json     {schema_version, snapshot_date, source_versions, counts}
    <dir>/technique.jsonl
    <dir>/capec.jsonl
    <dir>/cwe.jsonl
    <dir>/cve.jsonl

Records are written id-sorted with sorted JSON keys, so writing the same
snapshot twice produces byte-identical files.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

from .errors import ConsistencyError, DataError, SchemaVersionError, ValidationError
from .records import SNAPSHOT_SCHEMA_VERSION, CorpusSnapshot, RECORD_KINDS

_FILES = {
    "technique": ("technique.jsonl", "techniques"),
    "capec": ("capec.jsonl", "capecs"),
    "cwe": ("cwe.jsonl", "cwes"),
    "cve": ("cve.jsonl", "cves"),
}


def _dump_line(record) -> str:
    return json.dumps(dataclasses.asdict(record), ensure_ascii=False, sort_keys=True)


def write_snapshot(
    snapshot: CorpusSnapshot, path: str | Path, run_manifest_id: str | None = None
) -> None:
    """Write ``snapshot`` under directory ``path`` (created if missing)."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    for kind, (filename, attr) in _FILES.items():
        records = getattr(snapshot, attr)
        body = "".join(_dump_line(rec) + "\n" for rec in records)
        (root / filename).write_text(body, encoding="utf-8")
    manifest = snapshot.manifest()
    if run_manifest_id is not None:
        manifest["run_manifest_id"] = run_manifest_id
    body = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    (root / "manifest.json").write_text(body, encoding="utf-8")


def read_manifest(path: str | Path) -> dict:
    """Load and version-check a snapshot manifest without loading records."""
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise DataError(f"no snapshot manifest at {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise DataError(f"snapshot manifest {manifest_path} is not valid JSON: {exc}") from exc
    if not isinstance(manifest, dict):
        raise DataError(f"snapshot manifest {manifest_path} must be a JSON object")
    version = manifest.get("schema_version")
    if version != SNAPSHOT_SCHEMA_VERSION:
        raise SchemaVersionError(
            f"snapshot schema_version {version!r} unsupported (expected {SNAPSHOT_SCHEMA_VERSION})"
        )
    return manifest


def read_snapshot(path: str | Path) -> CorpusSnapshot:
    """Load a snapshot directory; fails without partial results.

    Raises :class:`SchemaVersionError` on version mismatch and
    :class:`ConsistencyError` when file contents disagree with the
    manifest counts.
    """
    root = Path(path)
    manifest = read_manifest(root)

    loaded: dict[str, list] = {}
    for kind, (filename, attr) in _FILES.items():
        _, cls = RECORD_KINDS[kind]
        records = []
        file_path = root / filename
        if not file_path.is_file():
            raise DataError(f"snapshot file missing: {file_path}")
        for lineno, line in enumerate(file_path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            try:
                records.append(cls(**json.loads(line)))
            except (ValueError, TypeError, ValidationError) as exc:
                raise DataError(f"{file_path}:{lineno}: bad record: {exc}") from exc
        loaded[attr] = records

    snapshot = CorpusSnapshot(
        techniques=loaded["techniques"],
        capecs=loaded["capecs"],
        cwes=loaded["cwes"],
        cves=loaded["cves"],
        snapshot_date=manifest["snapshot_date"],
        source_versions=dict(manifest.get("source_versions", {})),
    )
    if snapshot.counts() != manifest.get("counts"):
        raise ConsistencyError(
            f"snapshot counts {snapshot.counts()} disagree with manifest {manifest.get('counts')}"
        )
    return snapshot

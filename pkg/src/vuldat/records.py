"""Normalized corpus records for the four MITRE repositories.

One record type per repository, plus :class:`CorpusSnapshot`, a dated
capture of all four collections. Cross-reference lists only have to be
syntactically valid; whether a referenced entry actually exists in the
snapshot is resolved later by the link graph, where dangling references
are counted rather than rejected.
"""

from __future__ import annotations

import datetime as _dt
import re
from dataclasses import dataclass, field

from .errors import ValidationError

TECHNIQUE_ID_RE = re.compile(r"^T\d{4}(\.\d{3})?$")
CAPEC_ID_RE = re.compile(r"^CAPEC-\d+$")
CWE_ID_RE = re.compile(r"^CWE-\d+$")
CVE_ID_RE = re.compile(r"^CVE-\d{4}-\d{4,}$")

SNAPSHOT_SCHEMA_VERSION = 1


def _check_id(pattern: re.Pattern[str], value: str, kind: str) -> None:
    if not pattern.match(value):
        raise ValidationError(f"invalid {kind} identifier: {value!r}")


def _check_refs(pattern: re.Pattern[str], refs: list[str], owner: str, kind: str) -> None:
    for ref in refs:
        if not pattern.match(ref):
            raise ValidationError(f"{owner}: invalid {kind} reference {ref!r}")


@dataclass
class AttackTechnique:
    """One ATT&CK technique or sub-technique (the query unit)."""

    technique_id: str
    name: str
    description: str
    capec_refs: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        _check_id(TECHNIQUE_ID_RE, self.technique_id, "technique")
        if not self.description:
            raise ValidationError(f"{self.technique_id}: empty description")
        _check_refs(CAPEC_ID_RE, self.capec_refs, self.technique_id, "CAPEC")


@dataclass
class CapecPattern:
    """One CAPEC attack pattern; bridges techniques to weaknesses."""

    capec_id: str
    name: str
    description: str
    cwe_refs: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        _check_id(CAPEC_ID_RE, self.capec_id, "CAPEC")
        _check_refs(CWE_ID_RE, self.cwe_refs, self.capec_id, "CWE")


@dataclass
class CweEntry:
    """One CWE weakness; ``cve_refs`` are its observed-example CVEs."""

    cwe_id: str
    name: str
    description: str
    cve_refs: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        _check_id(CWE_ID_RE, self.cwe_id, "CWE")
        _check_refs(CVE_ID_RE, self.cve_refs, self.cwe_id, "CVE")


@dataclass
class CveRecord:
    """One CVE entry with its (English) description text."""

    cve_id: str
    description: str
    published_year: int

    def __post_init__(self) -> None:
        _check_id(CVE_ID_RE, self.cve_id, "CVE")
        if not self.description:
            raise ValidationError(f"{self.cve_id}: empty description")


# record-kind tag -> (id field, record class); shared by snapshot IO
RECORD_KINDS = {
    "technique": ("technique_id", AttackTechnique),
    "capec": ("capec_id", CapecPattern),
    "cwe": ("cwe_id", CweEntry),
    "cve": ("cve_id", CveRecord),
}


def _unique_sorted(records: list, id_field: str, kind: str) -> list:
    seen: set[str] = set()
    for rec in records:
        rid = getattr(rec, id_field)
        if rid in seen:
            raise ValidationError(f"duplicate {kind} identifier: {rid}")
        seen.add(rid)
    return sorted(records, key=lambda r: getattr(r, id_field))


@dataclass
class CorpusSnapshot:
    """A dated, versioned capture of all four repositories.

    Collections are normalized to unique, id-sorted order at construction
    so that persistence round-trips are byte-stable. MITRE data drifts
    over time, which is why ``snapshot_date`` and ``source_versions``
    are mandatory.
    """

    techniques: list[AttackTechnique]
    capecs: list[CapecPattern]
    cwes: list[CweEntry]
    cves: list[CveRecord]
    snapshot_date: str
    source_versions: dict[str, str]

    def __post_init__(self) -> None:
        try:
            _dt.date.fromisoformat(self.snapshot_date)
        except ValueError as exc:
            raise ValidationError(f"snapshot_date is not an ISO-8601 date: {self.snapshot_date!r}") from exc
        self.techniques = _unique_sorted(self.techniques, "technique_id", "technique")
        self.capecs = _unique_sorted(self.capecs, "capec_id", "CAPEC")
        self.cwes = _unique_sorted(self.cwes, "cwe_id", "CWE")
        self.cves = _unique_sorted(self.cves, "cve_id", "CVE")

    def counts(self) -> dict[str, int]:
        return {
            "techniques": len(self.techniques),
            "capecs": len(self.capecs),
            "cwes": len(self.cwes),
            "cves": len(self.cves),
        }

    def manifest(self) -> dict:
        """Manifest block persisted next to the snapshot files."""
        return {
            "schema_version": SNAPSHOT_SCHEMA_VERSION,
            "snapshot_date": self.snapshot_date,
            "source_versions": dict(sorted(self.source_versions.items())),
            "counts": self.counts(),
        }

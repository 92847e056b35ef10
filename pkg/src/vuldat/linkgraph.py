"""Join the four repositories into the attack->CVE ground-truth mapping.

The only join path is the explicit reference chain

    technique --capec_refs--> CAPEC --cwe_refs--> CWE --cve_refs--> CVE

A CVE belongs to a technique's actual set exactly when at least one
complete chain connects them. References pointing at ids absent from the
snapshot (retired entries, upstream drift) contribute no chain; they are
collected in a dangling-reference report instead of being an error.

The mapping keeps an entry for every technique, including empty sets:
downstream metric definitions need to enumerate attacks with no linked
CVE at all.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConsistencyError, DataError
from .records import CorpusSnapshot


@dataclass(frozen=True, order=True)
class LinkChain:
    """One complete technique->CAPEC->CWE->CVE reference path."""

    technique_id: str
    capec_id: str
    cwe_id: str
    cve_id: str


@dataclass
class RepoRow:
    """Linked / not-linked / total counts for one repository."""

    linked: int
    not_linked: int
    total: int

    def __post_init__(self) -> None:
        assert self.linked + self.not_linked == self.total


@dataclass
class LinkStats:
    """Per-repository participation in complete chains.

    ``cwe_linked_upward`` / ``cwe_linked_downward`` count single-edge
    connectivity of CWE entries (referenced by an in-snapshot CAPEC,
    resp. referencing an in-snapshot CVE) regardless of whether a full
    chain passes through them; the two readings of "linked CWE" differ
    in upstream reports, so both are exposed.
    """

    techniques: RepoRow
    capecs: RepoRow
    cwes: RepoRow
    cves: RepoRow
    cwe_linked_upward: int
    cwe_linked_downward: int

    def as_dict(self) -> dict:
        return {
            "techniques": vars(self.techniques),
            "capecs": vars(self.capecs),
            "cwes": vars(self.cwes),
            "cves": vars(self.cves),
            "cwe_linked_upward": self.cwe_linked_upward,
            "cwe_linked_downward": self.cwe_linked_downward,
        }


@dataclass
class DanglingReport:
    """Cross-references whose target id is absent from the snapshot."""

    technique_to_capec: list[tuple[str, str]] = field(default_factory=list)
    capec_to_cwe: list[tuple[str, str]] = field(default_factory=list)
    cwe_to_cve: list[tuple[str, str]] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        return {
            "technique_to_capec": len(self.technique_to_capec),
            "capec_to_cwe": len(self.capec_to_cwe),
            "cwe_to_cve": len(self.cwe_to_cve),
        }

    def as_dict(self) -> dict:
        return {
            "counts": self.counts(),
            "technique_to_capec": [list(pair) for pair in self.technique_to_capec],
            "capec_to_cwe": [list(pair) for pair in self.capec_to_cwe],
            "cwe_to_cve": [list(pair) for pair in self.cwe_to_cve],
        }


@dataclass
class MappingDataset:
    """The ground-truth attack->CVE sets with chain provenance."""

    mapping: dict[str, set[str]]
    chains: list[LinkChain]
    stats: LinkStats
    dangling: DanglingReport

    def actual_set(self, technique_id: str) -> set[str]:
        return self.mapping[technique_id]

    def as_json_dict(self) -> dict[str, list[str]]:
        return {tid: sorted(cves) for tid, cves in sorted(self.mapping.items())}


def build_mapping(snapshot: CorpusSnapshot) -> MappingDataset:
    """Enumerate all complete chains and aggregate them per technique."""
    capecs = {c.capec_id: c for c in snapshot.capecs}
    cwes = {w.cwe_id: w for w in snapshot.cwes}
    cve_ids = {v.cve_id for v in snapshot.cves}

    dangling = DanglingReport()
    for capec in snapshot.capecs:
        for cwe_ref in capec.cwe_refs:
            if cwe_ref not in cwes:
                dangling.capec_to_cwe.append((capec.capec_id, cwe_ref))
    for cwe in snapshot.cwes:
        for cve_ref in cwe.cve_refs:
            if cve_ref not in cve_ids:
                dangling.cwe_to_cve.append((cwe.cwe_id, cve_ref))

    chains: list[LinkChain] = []
    mapping: dict[str, set[str]] = {}
    for technique in snapshot.techniques:
        actual: set[str] = set()
        for capec_ref in technique.capec_refs:
            capec = capecs.get(capec_ref)
            if capec is None:
                dangling.technique_to_capec.append((technique.technique_id, capec_ref))
                continue
            for cwe_ref in capec.cwe_refs:
                cwe = cwes.get(cwe_ref)
                if cwe is None:
                    continue  # already reported above
                for cve_ref in cwe.cve_refs:
                    if cve_ref in cve_ids:
                        chains.append(LinkChain(technique.technique_id, capec.capec_id, cwe.cwe_id, cve_ref))
                        actual.add(cve_ref)
        mapping[technique.technique_id] = actual

    chains.sort()
    dangling.technique_to_capec.sort()
    dangling.capec_to_cwe.sort()
    dangling.cwe_to_cve.sort()

    dataset = MappingDataset(
        mapping=mapping,
        chains=chains,
        stats=_stats_from_chains(chains, snapshot),
        dangling=dangling,
    )
    return dataset


def _stats_from_chains(chains: list[LinkChain], snapshot: CorpusSnapshot) -> LinkStats:
    linked_t = {c.technique_id for c in chains}
    linked_cap = {c.capec_id for c in chains}
    linked_cwe = {c.cwe_id for c in chains}
    linked_cve = {c.cve_id for c in chains}

    def row(linked: set[str], total: int) -> RepoRow:
        return RepoRow(linked=len(linked), not_linked=total - len(linked), total=total)

    cwe_ids = {w.cwe_id for w in snapshot.cwes}
    cve_ids = {v.cve_id for v in snapshot.cves}
    upward = {ref for capec in snapshot.capecs for ref in capec.cwe_refs if ref in cwe_ids}
    downward = {w.cwe_id for w in snapshot.cwes if any(ref in cve_ids for ref in w.cve_refs)}

    return LinkStats(
        techniques=row(linked_t, len(snapshot.techniques)),
        capecs=row(linked_cap, len(snapshot.capecs)),
        cwes=row(linked_cwe, len(snapshot.cwes)),
        cves=row(linked_cve, len(snapshot.cves)),
        cwe_linked_upward=len(upward),
        cwe_linked_downward=len(downward),
    )


def compute_stats(mapping: MappingDataset, snapshot: CorpusSnapshot) -> LinkStats:
    """Recompute link statistics, checking mapping/snapshot consistency."""
    technique_ids = {t.technique_id for t in snapshot.techniques}
    if set(mapping.mapping) != technique_ids:
        raise ConsistencyError("mapping does not cover the snapshot's technique set")
    return _stats_from_chains(mapping.chains, snapshot)


def export_mapping(
    mapping: MappingDataset, path: str | Path, run_manifest_id: str | None = None
) -> None:
    """Write mapping_chains.csv, mapping.json and link_diagnostics.json.

    mapping.json is a bare {technique_id: [cve_id, ...]} object, so run
    provenance rides in the other two files only.
    """
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)

    with (root / "mapping_chains.csv").open("w", encoding="utf-8", newline="") as fh:
        if run_manifest_id is not None:
            fh.write(f"# run_manifest_id={run_manifest_id}\n")
        writer = csv.writer(fh)
        writer.writerow(["technique_id", "capec_id", "cwe_id", "cve_id"])
        for chain in mapping.chains:
            writer.writerow([chain.technique_id, chain.capec_id, chain.cwe_id, chain.cve_id])

    (root / "mapping.json").write_text(
        json.dumps(mapping.as_json_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    diagnostics = mapping.dangling.as_dict()
    diagnostics["stats"] = mapping.stats.as_dict()
    if run_manifest_id is not None:
        diagnostics["run_manifest_id"] = run_manifest_id
    (root / "link_diagnostics.json").write_text(
        json.dumps(diagnostics, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_mapping_json(path: str | Path) -> dict[str, set[str]]:
    """Load the aggregated mapping.json form back into per-attack sets."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read mapping file {path}: {exc}") from exc
    except ValueError as exc:
        raise DataError(f"mapping file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or not all(
        isinstance(tid, str) and isinstance(cves, list) for tid, cves in data.items()
    ):
        raise DataError(f"mapping file {path} must map technique ids to CVE lists")
    return {tid: set(cves) for tid, cves in data.items()}

"""Shared fixtures: the diamond corpus and a pre-built pipeline run.

The diamond fixture is small enough to reason about by hand: three
techniques (one with a diamond-shaped CAPEC fan-in, one with a dangling
CAPEC reference, one isolated), four CAPECs, five CWEs and ten CVEs.
Expected mapping, chain count and link statistics are derived in
tests/oracles.py and asserted all over the suite.
"""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from vuldat.cli import main as cli_main
from vuldat.records import (
    AttackTechnique,
    CapecPattern,
    CorpusSnapshot,
    CveRecord,
    CweEntry,
)

DATA_DIR = Path(__file__).parent / "data"

TECHNIQUES = [
    {
        "technique_id": "T0001",
        "name": "Steal Web Session Cookie",
        "description": "Adversaries may steal web session cookies. (Citation: Pass The Cookie)",
        "capec_refs": ["CAPEC-1", "CAPEC-2"],
    },
    {
        "technique_id": "T0002",
        "name": "Brute Force",
        "description": (
            "Adversaries may use brute force techniques to gain access to accounts. "
            "See https://example.com  now"
        ),
        "capec_refs": ["CAPEC-3", "CAPEC-99"],
    },
    {
        "technique_id": "T1003.001",
        "name": "LSASS Memory",
        "description": "Adversaries may attempt to access credential material stored in LSASS.",
        "capec_refs": [],
    },
]

CAPECS = [
    {"capec_id": "CAPEC-1", "name": "Session Hijack", "description": "Hijacking a web session.", "cwe_refs": ["CWE-10"]},
    {"capec_id": "CAPEC-2", "name": "Cookie Theft", "description": "Stealing session cookies.", "cwe_refs": ["CWE-10", "CWE-20"]},
    {"capec_id": "CAPEC-3", "name": "Password Guess", "description": "Guessing passwords by brute force.", "cwe_refs": ["CWE-30"]},
    {"capec_id": "CAPEC-4", "name": "Orphan Pattern", "description": "Not referenced by any technique.", "cwe_refs": ["CWE-40"]},
]

CWES = [
    {"cwe_id": "CWE-10", "name": "Session Fixation", "description": "Weak session handling.", "cve_refs": ["CVE-2020-0001", "CVE-2020-0002"]},
    {"cwe_id": "CWE-20", "name": "Improper Input Validation", "description": "Input is not validated.", "cve_refs": ["CVE-2020-0002"]},
    {"cwe_id": "CWE-30", "name": "Weak Password Requirements", "description": "Passwords may be guessed.", "cve_refs": ["CVE-2021-0003"]},
    {"cwe_id": "CWE-40", "name": "Orphan Weakness", "description": "Reached only via CAPEC-4.", "cve_refs": ["CVE-2021-0004"]},
    {"cwe_id": "CWE-50", "name": "Isolated Weakness", "description": "References nothing.", "cve_refs": []},
]

CVES = [
    {"cve_id": "CVE-2020-0001", "description": "A session cookie can be stolen by a remote attacker via the web interface.", "published_year": 2020},
    {"cve_id": "CVE-2020-0002", "description": "Session cookies are exposed to attackers who steal web session data.", "published_year": 2020},
    {"cve_id": "CVE-2021-0003", "description": "Brute force of user passwords is possible due to missing rate limits.", "published_year": 2021},
    {"cve_id": "CVE-2021-0004", "description": "An orphan weakness example unrelated to any technique chain.", "published_year": 2021},
    {"cve_id": "CVE-2021-0005", "description": "Stack buffer overflow in the packet parser allows code execution.", "published_year": 2021},
    {"cve_id": "CVE-2021-0006", "description": "Cross site scripting lets attackers inject script into pages.", "published_year": 2021},
    {"cve_id": "CVE-2022-0007", "description": "SQL injection in the login form allows database access.", "published_year": 2022},
    {"cve_id": "CVE-2022-0008", "description": "Path traversal in the file manager exposes arbitrary files.", "published_year": 2022},
    {"cve_id": "CVE-2022-0009", "description": "Use after free in the renderer process leads to a crash.", "published_year": 2022},
    {"cve_id": "CVE-2022-0010", "description": "Credential material in LSASS memory may be accessed by attackers.", "published_year": 2022},
]

SNAPSHOT_DATE = "2024-01-15"
SOURCE_VERSIONS = {"attack": "14.1", "capec": "3.9", "cwe": "4.13", "cve": "2024-01-15"}


def make_diamond_snapshot() -> CorpusSnapshot:
    return CorpusSnapshot(
        techniques=[AttackTechnique(**row) for row in TECHNIQUES],
        capecs=[CapecPattern(**row) for row in CAPECS],
        cwes=[CweEntry(**row) for row in CWES],
        cves=[CveRecord(**row) for row in CVES],
        snapshot_date=SNAPSHOT_DATE,
        source_versions=dict(SOURCE_VERSIONS),
    )


def write_feed_files(directory: Path) -> dict[str, Path]:
    """Write the diamond corpus as the four JSONL feed files."""
    directory.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, rows in (
        ("attack", TECHNIQUES),
        ("capec", CAPECS),
        ("cwe", CWES),
        ("cve", CVES),
    ):
        path = directory / f"{name}.jsonl"
        path.write_text("".join(json.dumps(row) + "\n" for row in rows), encoding="utf-8")
        paths[name] = path
    return paths


def make_random_snapshot(rng) -> CorpusSnapshot:
    """Random small corpus; reference pools extend past the generated ids
    so some references dangle on purpose."""
    n_technique = rng.randint(1, 6)
    n_capec = rng.randint(0, 8)
    n_cwe = rng.randint(0, 10)
    n_cve = rng.randint(0, 20)

    capec_pool = [f"CAPEC-{i}" for i in range(1, n_capec + 4)]
    cwe_pool = [f"CWE-{i}" for i in range(1, n_cwe + 4)]
    cve_pool = [f"CVE-2020-{i:04d}" for i in range(1, n_cve + 4)]

    techniques = [
        AttackTechnique(
            technique_id=f"T{9000 + i}",
            name=f"technique {i}",
            description=f"technique number {i} does things",
            capec_refs=rng.sample(capec_pool, k=rng.randint(0, 3)),
        )
        for i in range(n_technique)
    ]
    capecs = [
        CapecPattern(
            capec_id=f"CAPEC-{i}",
            name=f"capec {i}",
            description="a pattern",
            cwe_refs=rng.sample(cwe_pool, k=rng.randint(0, 3)),
        )
        for i in range(1, n_capec + 1)
    ]
    cwes = [
        CweEntry(
            cwe_id=f"CWE-{i}",
            name=f"cwe {i}",
            description="a weakness",
            cve_refs=rng.sample(cve_pool, k=rng.randint(0, min(4, len(cve_pool)))),
        )
        for i in range(1, n_cwe + 1)
    ]
    cves = [
        CveRecord(cve_id=f"CVE-2020-{i:04d}", description=f"vulnerability {i}", published_year=2020)
        for i in range(1, n_cve + 1)
    ]
    return CorpusSnapshot(
        techniques=techniques,
        capecs=capecs,
        cwes=cwes,
        cves=cves,
        snapshot_date=SNAPSHOT_DATE,
        source_versions={"attack": "test"},
    )


def run_cli(*argv: str) -> int:
    return cli_main(list(argv))


@pytest.fixture
def diamond_snapshot() -> CorpusSnapshot:
    return make_diamond_snapshot()


@pytest.fixture(scope="session")
def feed_dir(tmp_path_factory) -> Path:
    directory = tmp_path_factory.mktemp("feeds")
    write_feed_files(directory)
    return directory


def ingest_args(feed_dir: Path, out_dir: Path) -> list[str]:
    return [
        "ingest",
        "--attack", str(feed_dir / "attack.jsonl"), "--attack-format", "jsonl",
        "--capec", str(feed_dir / "capec.jsonl"), "--capec-format", "jsonl",
        "--cwe", str(feed_dir / "cwe.jsonl"), "--cwe-format", "jsonl",
        "--cve", str(feed_dir / "cve.jsonl"), "--cve-format", "jsonl",
        "--snapshot-date", SNAPSHOT_DATE,
        "--source-version", "attack=14.1",
        "--source-version", "capec=3.9",
        "--source-version", "cwe=4.13",
        "--source-version", "cve=2024-01-15",
        "--out", str(out_dir),
    ]


def run_pipeline(feed_dir: Path, root: Path, threshold: str = "0.3") -> dict[str, Path]:
    """Drive ingest -> build-map -> preprocess -> embed -> evaluate."""
    paths = {
        "snapshot": root / "snapshot",
        "mapping": root / "mapping",
        "texts": root / "texts.json",
        "stores": root / "stores",
        "reports": root / "reports",
    }
    assert run_cli(*ingest_args(feed_dir, paths["snapshot"])) == 0
    assert run_cli(
        "build-map", "--snapshot", str(paths["snapshot"]), "--out", str(paths["mapping"])
    ) == 0
    assert run_cli(
        "preprocess", "--snapshot", str(paths["snapshot"]),
        "--preprocess", "full", "--out", str(paths["texts"]),
    ) == 0
    assert run_cli(
        "embed", "--texts", str(paths["texts"]), "--out-dir", str(paths["stores"]),
        "--backend", "test-hash", "--snapshot", str(paths["snapshot"]),
    ) == 0
    assert run_cli(
        "evaluate",
        "--mapping", str(paths["mapping"] / "mapping.json"),
        "--technique-store", str(paths["stores"] / "techniques"),
        "--cve-store", str(paths["stores"] / "cves"),
        "--threshold", threshold,
        "--snapshot", str(paths["snapshot"]),
        "--out-dir", str(paths["reports"]),
        "--detections-out", str(root / "detections"),
    ) == 0
    paths["detections"] = root / "detections"
    return paths


@pytest.fixture(scope="session")
def pipeline(feed_dir, tmp_path_factory) -> dict[str, Path]:
    """One full pipeline run shared by read-only CLI tests."""
    root = tmp_path_factory.mktemp("pipeline")
    return run_pipeline(feed_dir, root)

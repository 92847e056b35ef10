"""Command line front end: ``vuldat <subcommand>``.

Orchestrates the pipeline ingest -> build-map -> preprocess -> embed ->
query/evaluate, plus the stats and compare reporting commands. Every
artifact-producing subcommand drops a ``run_manifest.json`` beside its
outputs and stamps the manifest id into each file it writes, so any
artifact can be traced back to the exact configuration that produced it.

Exit codes: 0 success, 1 usage or configuration problem, 2 data problem,
3 embedding-backend transport problem. Logs go to standard error;
machine-readable output (query JSON, stats table) goes to standard out.
"""

from __future__ import annotations

import json
import logging
import os
import sys
from pathlib import Path

import click

from .config import BACKENDS, RunConfig, build_run_manifest, load_config, write_run_manifest
from .embedding import (
    TEST_HASH_MODEL,
    EmbeddingBackend,
    FixtureBackend,
    RemoteBackend,
    TestHashBackend,
    embed,
    get_model,
    load_store,
    save_store,
)
from .errors import (
    ConfigurationError,
    ConsistencyError,
    DataError,
    SchemaVersionError,
    TransportError,
    VuldatError,
)
from .evaluation import aggregate, compare_models, report_from_json
from .feeds import parse_attack_feed, parse_capec_feed, parse_cve_feed, parse_cwe_feed
from .linkgraph import build_mapping, export_mapping, load_mapping_json
from .preprocess import CleanText, PreprocessMode, preprocess_corpus
from .records import CVE_ID_RE, TECHNIQUE_ID_RE, CorpusSnapshot
from .retrieval import DetectionList, RetrievalConfig, detection_from_json, retrieve, retrieve_all
from .snapshot import read_manifest, read_snapshot, write_snapshot

log = logging.getLogger(__name__)

TEXTS_SCHEMA_VERSION = 1

_MODES = ("partial", "full")
_POLICIES = ("fp", "fp-and-fn", "exclude")


def _config_option(fn):
    return click.option(
        "--config",
        "config_path",
        default=None,
        type=click.Path(exists=True, dir_okay=False),
        help="TOML run configuration file; flags override its values.",
    )(fn)


def _effective_config(config_path: str | None, **overrides) -> RunConfig:
    """File config (or defaults) with non-None flag overrides applied."""
    cfg = load_config(config_path)
    for name, value in overrides.items():
        if value is not None:
            setattr(cfg, name, value)
    cfg.validate()
    return cfg


def _make_backend(cfg: RunConfig, mode: PreprocessMode | None = None) -> EmbeddingBackend:
    """Build the embedding backend the effective config asks for."""
    if cfg.backend == "test-hash":
        if cfg.model_name != TEST_HASH_MODEL:
            raise ConfigurationError(
                f"the test-hash backend only serves the {TEST_HASH_MODEL!r} model, "
                f"not {cfg.model_name!r}"
            )
        return TestHashBackend()
    if cfg.backend == "fixture":
        if not cfg.fixture_path:
            raise ConfigurationError("fixture backend needs --fixture or config key fixture_path")
        store = load_store(cfg.fixture_path)
        if store.model.model_name != cfg.model_name:
            raise ConfigurationError(
                f"fixture {cfg.fixture_path} holds {store.model.model_name} vectors, "
                f"run wants {cfg.model_name}"
            )
        if mode is not None and store.mode is not mode:
            raise ConfigurationError(
                f"fixture {cfg.fixture_path} was embedded in {store.mode.value} mode, "
                f"run uses {mode.value}"
            )
        return FixtureBackend(store)
    if cfg.model_name == TEST_HASH_MODEL:
        raise ConfigurationError("the remote backend does not serve the test-hash model")
    url = cfg.embed_url or os.environ.get("VULDAT_EMBED_URL", "")
    if not url:
        raise ConfigurationError("remote backend needs --url or VULDAT_EMBED_URL")
    return RemoteBackend(url)


def _read_json(path: str | Path):
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from exc


def _write_json(payload: dict, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _read_texts_file(path: str | Path) -> tuple[PreprocessMode, dict[str, str], str]:
    """Load a preprocess-step output file: (mode, id -> text, producing manifest id)."""
    data = _read_json(path)
    if not isinstance(data, dict):
        raise DataError(f"texts file {path} must be a JSON object")
    version = data.get("schema_version")
    if version != TEXTS_SCHEMA_VERSION:
        raise SchemaVersionError(
            f"texts schema_version {version!r} unsupported (expected {TEXTS_SCHEMA_VERSION})"
        )
    try:
        mode = PreprocessMode.parse(data.get("mode"))
    except ConfigurationError as exc:
        raise DataError(f"texts file {path}: {exc}") from exc
    texts = data.get("texts")
    if not isinstance(texts, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in texts.items()
    ):
        raise DataError(f"texts file {path}: 'texts' must map record ids to strings")
    return mode, texts, str(data.get("run_manifest_id", ""))


def _parse_source_versions(pairs: tuple[str, ...]) -> dict[str, str]:
    out: dict[str, str] = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigurationError(f"--source-version expects KEY=VALUE, got {item!r}")
        out[key] = value
    return out


def _load_detection_dir(path: str | Path) -> dict[str, DetectionList]:
    root = Path(path)
    if not root.is_dir():
        raise DataError(f"no detections directory at {root}")
    out: dict[str, DetectionList] = {}
    for file in sorted(root.glob("*.json")):
        if file.name == "run_manifest.json":
            continue
        detection = detection_from_json(_read_json(file))
        if detection.technique_id in out:
            raise ConsistencyError(f"duplicate detection list for {detection.technique_id}")
        out[detection.technique_id] = detection
    return out


@click.group(name="vuldat")
def cli() -> None:
    """Map ATT&CK techniques to CVE reports and evaluate the retrieval."""


@cli.command("ingest")
@click.option("--attack", required=True, type=click.Path(exists=True, dir_okay=False),
              help="ATT&CK feed file.")
@click.option("--attack-format", default="stix", type=click.Choice(["stix", "jsonl"]),
              show_default=True)
@click.option("--capec", required=True, type=click.Path(exists=True, dir_okay=False),
              help="CAPEC catalog file.")
@click.option("--capec-format", default="xml", type=click.Choice(["xml", "jsonl"]),
              show_default=True)
@click.option("--cwe", required=True, type=click.Path(exists=True, dir_okay=False),
              help="CWE catalog file.")
@click.option("--cwe-format", default="xml", type=click.Choice(["xml", "jsonl"]),
              show_default=True)
@click.option("--cve", required=True, type=click.Path(exists=True, dir_okay=False),
              help="CVE feed file.")
@click.option("--cve-format", default="nvd", type=click.Choice(["nvd", "jsonl"]),
              show_default=True)
@click.option("--snapshot-date", required=True, help="ISO date the feeds were captured.")
@click.option("--source-version", multiple=True, metavar="KEY=VALUE",
              help="Feed version tag, repeatable (e.g. attack=14.1).")
@click.option("--out", default=None, type=click.Path(file_okay=False),
              help="Snapshot directory to write.")
@_config_option
def ingest_command(attack, attack_format, capec, capec_format, cwe, cwe_format,
                   cve, cve_format, snapshot_date, source_version, out, config_path):
    """Parse the four feeds into a validated snapshot directory."""
    cfg = _effective_config(config_path, snapshot_dir=out)
    feeds = (
        ("attack", attack, attack_format, parse_attack_feed),
        ("capec", capec, capec_format, parse_capec_feed),
        ("cwe", cwe, cwe_format, parse_cwe_feed),
        ("cve", cve, cve_format, parse_cve_feed),
    )
    parsed = {}
    for name, path, fmt, parser in feeds:
        result = parser(Path(path).read_bytes(), format=fmt)
        reasons = ", ".join(f"{k}={v}" for k, v in sorted(result.drop_reasons.items()))
        log.info("%s feed: %d objects, %d kept, %d dropped%s",
                 name, result.total, len(result), result.dropped,
                 f" ({reasons})" if reasons else "")
        parsed[name] = result.records
    snapshot = CorpusSnapshot(
        techniques=parsed["attack"],
        capecs=parsed["capec"],
        cwes=parsed["cwe"],
        cves=parsed["cve"],
        snapshot_date=snapshot_date,
        source_versions=_parse_source_versions(source_version),
    )
    run_manifest = build_run_manifest("ingest", cfg, snapshot.manifest())
    out_dir = Path(cfg.snapshot_dir)
    write_snapshot(snapshot, out_dir, run_manifest_id=run_manifest["manifest_id"])
    write_run_manifest(run_manifest, out_dir)
    counts = ", ".join(f"{k}={v}" for k, v in snapshot.counts().items())
    log.info("snapshot written to %s (%s)", out_dir, counts)


@cli.command("build-map")
@click.option("--snapshot", default=None, type=click.Path(file_okay=False),
              help="Snapshot directory to read.")
@click.option("--out", default=None, type=click.Path(file_okay=False),
              help="Directory for mapping_chains.csv, mapping.json, link_diagnostics.json.")
@_config_option
def build_map_command(snapshot, out, config_path):
    """Join technique->CAPEC->CWE->CVE chains into the mapping dataset."""
    cfg = _effective_config(config_path, snapshot_dir=snapshot, mapping_dir=out)
    snap = read_snapshot(cfg.snapshot_dir)
    snapshot_manifest = read_manifest(cfg.snapshot_dir)
    dataset = build_mapping(snap)
    run_manifest = build_run_manifest("build-map", cfg, snapshot_manifest)
    export_mapping(dataset, cfg.mapping_dir, run_manifest_id=run_manifest["manifest_id"])
    write_run_manifest(run_manifest, cfg.mapping_dir)
    stats = dataset.stats
    log.info("chains: %d; linked techniques: %d/%d; dangling refs: %d",
             len(dataset.chains), stats.techniques.linked, stats.techniques.total,
             sum(dataset.dangling.counts().values()))
    log.info("mapping written to %s", cfg.mapping_dir)


@cli.command("preprocess")
@click.option("--snapshot", default=None, type=click.Path(file_okay=False),
              help="Snapshot directory to read.")
@click.option("--preprocess", "preprocess_mode", default=None, type=click.Choice(_MODES),
              help="Normalization mode.")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="JSON file of normalized texts to write.")
@_config_option
def preprocess_command(snapshot, preprocess_mode, out, config_path):
    """Normalize every technique and CVE description in the snapshot."""
    cfg = _effective_config(config_path, snapshot_dir=snapshot, preprocess_mode=preprocess_mode)
    snap = read_snapshot(cfg.snapshot_dir)
    snapshot_manifest = read_manifest(cfg.snapshot_dir)
    mode = PreprocessMode.parse(cfg.preprocess_mode)
    texts = preprocess_corpus(snap, mode)
    run_manifest = build_run_manifest("preprocess", cfg, snapshot_manifest)
    payload = {
        "schema_version": TEXTS_SCHEMA_VERSION,
        "mode": mode.value,
        "run_manifest_id": run_manifest["manifest_id"],
        "texts": {source_id: clean.text for source_id, clean in sorted(texts.items())},
    }
    out_path = _write_json(payload, Path(out))
    write_run_manifest(run_manifest, out_path.parent)
    log.info("%d texts (%s mode) written to %s", len(texts), mode.value, out_path)


@cli.command("embed")
@click.option("--texts", "texts_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Normalized-texts file from the preprocess step.")
@click.option("--out-dir", default=None, type=click.Path(file_okay=False),
              help="Directory for the techniques/cves embedding stores.")
@click.option("--model", default=None, help="Embedding model name.")
@click.option("--backend", default=None, type=click.Choice(list(BACKENDS)))
@click.option("--fixture", default=None, type=click.Path(),
              help="Embedding store base path for the fixture backend.")
@click.option("--url", default=None, help="Remote embedding service URL.")
@click.option("--snapshot", default=None, type=click.Path(exists=True, file_okay=False),
              help="Snapshot directory, recorded in the run manifest when given.")
@_config_option
def embed_command(texts_path, out_dir, model, backend, fixture, url, snapshot, config_path):
    """Embed normalized texts into technique and CVE vector stores."""
    cfg = _effective_config(config_path, stores_dir=out_dir, model_name=model,
                            backend=backend, fixture_path=fixture, embed_url=url)
    mode, texts, texts_manifest_id = _read_texts_file(texts_path)
    clean = [CleanText(body, mode, source_id) for source_id, body in sorted(texts.items())]
    technique_texts = [c for c in clean if TECHNIQUE_ID_RE.match(c.source_id)]
    cve_texts = [c for c in clean if CVE_ID_RE.match(c.source_id)]
    leftover = [c.source_id for c in clean
                if not (TECHNIQUE_ID_RE.match(c.source_id) or CVE_ID_RE.match(c.source_id))]
    if leftover:
        preview = ", ".join(leftover[:5]) + ("..." if len(leftover) > 5 else "")
        raise DataError(f"texts file holds ids that are neither technique nor CVE: {preview}")
    model_spec = get_model(cfg.model_name)
    backend_obj = _make_backend(cfg, mode=mode)
    snapshot_manifest = read_manifest(snapshot) if snapshot else None
    run_manifest = build_run_manifest("embed", cfg, snapshot_manifest)
    run_manifest["inputs"] = {
        "texts_file": {"run_manifest_id": texts_manifest_id, "mode": mode.value,
                       "count": len(clean)},
    }
    manifest_id = run_manifest["manifest_id"]
    technique_store = embed(technique_texts, backend_obj, model_spec, mode=mode)
    cve_store = embed(cve_texts, backend_obj, model_spec, mode=mode)
    out_root = Path(cfg.stores_dir)
    save_store(technique_store, out_root / "techniques", run_manifest_id=manifest_id)
    save_store(cve_store, out_root / "cves", run_manifest_id=manifest_id)
    write_run_manifest(run_manifest, out_root)
    log.info("embedded %d techniques + %d cves with %s via %s backend into %s",
             len(technique_store), len(cve_store), model_spec.model_name,
             backend_obj.name, out_root)


@cli.command("query")
@click.option("--text", default=None, help="Free attack-description text to search with.")
@click.option("--technique", default=None, help="Technique id to look up in the store.")
@click.option("--cve-store", "cve_store_path", default=None, type=click.Path(),
              help="CVE embedding store base path.")
@click.option("--technique-store", "technique_store_path", default=None, type=click.Path(),
              help="Technique embedding store base path (for --technique).")
@click.option("--threshold", default=None, type=float)
@click.option("--top-n", default=None, type=int)
@click.option("--model", default=None, help="Must match the CVE store's model when given.")
@click.option("--backend", default=None, type=click.Choice(list(BACKENDS)))
@click.option("--preprocess", "preprocess_mode", default=None, type=click.Choice(_MODES),
              help="Must match the CVE store's mode when given.")
@click.option("--fixture", default=None, type=click.Path())
@click.option("--url", default=None, help="Remote embedding service URL.")
@_config_option
def query_command(text, technique, cve_store_path, technique_store_path, threshold, top_n,
                  model, backend, preprocess_mode, fixture, url, config_path):
    """Print the detection list for one attack text as JSON."""
    if (text is None) == (technique is None):
        raise click.UsageError("give exactly one of --text or --technique")
    cfg = _effective_config(config_path, threshold=threshold, top_n=top_n, backend=backend,
                            fixture_path=fixture, embed_url=url)
    cve_store = load_store(cve_store_path or Path(cfg.stores_dir) / "cves")
    if model is not None and model != cve_store.model.model_name:
        raise ConfigurationError(
            f"--model {model} does not match CVE store model {cve_store.model.model_name}"
        )
    if preprocess_mode is not None and PreprocessMode.parse(preprocess_mode) is not cve_store.mode:
        raise ConfigurationError(
            f"--preprocess {preprocess_mode} does not match CVE store mode {cve_store.mode.value}"
        )
    # the store determines how the query must be embedded
    cfg.model_name = cve_store.model.model_name
    cfg.preprocess_mode = cve_store.mode.value
    if technique is not None:
        if not TECHNIQUE_ID_RE.match(technique):
            raise ConfigurationError(f"{technique!r} is not a technique id")
        technique_store = load_store(technique_store_path or Path(cfg.stores_dir) / "techniques")
        query_vector = technique_store.get(technique)
        tag = technique
    else:
        from .preprocess import preprocess as normalize

        backend_obj = _make_backend(cfg, mode=cve_store.mode)
        clean = normalize(text, cve_store.mode, source_id="query")
        query_vector = embed([clean], backend_obj, cve_store.model, mode=cve_store.mode).get("query")
        tag = "query"
    rcfg = RetrievalConfig(threshold=cfg.threshold, top_n=cfg.top_n)
    result = retrieve(query_vector, cve_store, rcfg, tag=tag)
    run_manifest = build_run_manifest("query", cfg, None)
    payload = dict(result.as_json_dict(), run_manifest_id=run_manifest["manifest_id"])
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


@cli.command("evaluate")
@click.option("--mapping", "mapping_path", default=None, type=click.Path(),
              help="mapping.json from the build-map step.")
@click.option("--detections", "detections_dir", default=None, type=click.Path(),
              help="Directory of per-technique detection JSON files to replay.")
@click.option("--technique-store", "technique_store_path", default=None, type=click.Path())
@click.option("--cve-store", "cve_store_path", default=None, type=click.Path())
@click.option("--threshold", default=None, type=float)
@click.option("--top-n", default=None, type=int)
@click.option("--disjoint-policy", default=None, type=click.Choice(_POLICIES))
@click.option("--snapshot", default=None, type=click.Path(exists=True, file_okay=False),
              help="Snapshot directory, recorded in the report metadata when given.")
@click.option("--out-dir", default=None, type=click.Path(file_okay=False),
              help="Directory for evaluation_report.json/.csv.")
@click.option("--detections-out", default=None, type=click.Path(file_okay=False),
              help="Also write one detection JSON per technique here.")
@_config_option
def evaluate_command(mapping_path, detections_dir, technique_store_path, cve_store_path,
                     threshold, top_n, disjoint_policy, snapshot, out_dir, detections_out,
                     config_path):
    """Score detection lists against the mapping dataset."""
    cfg = _effective_config(config_path, threshold=threshold, top_n=top_n,
                            disjoint_policy=disjoint_policy, reports_dir=out_dir)
    if detections_dir is not None and (technique_store_path or cve_store_path):
        raise ConfigurationError("give either --detections or embedding stores, not both")
    if detections_dir is not None:
        detections = _load_detection_dir(detections_dir)
        if detections:
            sample = next(iter(detections.values()))
            for detection in detections.values():
                key = (detection.threshold, detection.top_n, detection.model, detection.mode)
                if key != (sample.threshold, sample.top_n, sample.model, sample.mode):
                    raise ConsistencyError(
                        "detection lists disagree on threshold/top_n/model/mode"
                    )
            if threshold is not None and threshold != sample.threshold:
                raise ConfigurationError(
                    f"--threshold {threshold} does not match detections built at "
                    f"{sample.threshold}"
                )
            if top_n is not None and top_n != sample.top_n:
                raise ConfigurationError(
                    f"--top-n {top_n} does not match detections built with {sample.top_n}"
                )
            cfg.threshold = sample.threshold
            cfg.top_n = sample.top_n
            cfg.model_name = sample.model.model_name
            cfg.preprocess_mode = sample.mode.value
    else:
        technique_store = load_store(technique_store_path or Path(cfg.stores_dir) / "techniques")
        cve_store = load_store(cve_store_path or Path(cfg.stores_dir) / "cves")
        rcfg = RetrievalConfig(threshold=cfg.threshold, top_n=cfg.top_n)
        detections = retrieve_all(technique_store, cve_store, rcfg)
        cfg.model_name = cve_store.model.model_name
        cfg.preprocess_mode = cve_store.mode.value
    mapping = load_mapping_json(mapping_path or Path(cfg.mapping_dir) / "mapping.json")
    snapshot_manifest = read_manifest(snapshot) if snapshot else None
    run_manifest = build_run_manifest("evaluate", cfg, snapshot_manifest)
    manifest_id = run_manifest["manifest_id"]
    metadata = {
        "model_name": cfg.model_name,
        "mode": cfg.preprocess_mode,
        "threshold": cfg.threshold,
        "top_n": cfg.top_n,
        "disjoint_policy": cfg.disjoint_policy,
        "run_manifest_id": manifest_id,
    }
    if snapshot_manifest is not None:
        metadata["snapshot_manifest"] = snapshot_manifest
    report = aggregate(detections, mapping, cfg.disjoint_policy, metadata=metadata)
    out_root = Path(cfg.reports_dir)
    json_path = report.write_json(out_root / "evaluation_report.json")
    csv_path = report.write_csv(out_root / "evaluation_report.csv")
    write_run_manifest(run_manifest, out_root)
    if detections_out:
        for tid in sorted(detections):
            payload = dict(detections[tid].as_json_dict(), run_manifest_id=manifest_id)
            _write_json(payload, Path(detections_out) / f"{tid}.json")
    log.info("outcomes: %s", " ".join(f"{k}={v}" for k, v in sorted(report.counts.items())))
    log.info("precision=%.6f recall=%.6f f1=%.6f (disjoint policy: %s)",
             report.precision, report.recall, report.f1, report.disjoint_policy.value)
    if report.degenerate:
        log.info("degenerate metrics (no denominator): %s", ", ".join(report.degenerate))
    log.info("report written to %s and %s", json_path, csv_path)


@cli.command("stats")
@click.option("--snapshot", default=None, type=click.Path(file_okay=False),
              help="Snapshot directory to read.")
@_config_option
def stats_command(snapshot, config_path):
    """Print linked/not-linked counts per repository for a snapshot."""
    cfg = _effective_config(config_path, snapshot_dir=snapshot)
    snap = read_snapshot(cfg.snapshot_dir)
    snapshot_manifest = read_manifest(cfg.snapshot_dir)
    dataset = build_mapping(snap)
    run_manifest = build_run_manifest("stats", cfg, snapshot_manifest)
    stats = dataset.stats
    rows = (
        ("techniques", stats.techniques),
        ("capec", stats.capecs),
        ("cwe", stats.cwes),
        ("cve", stats.cves),
    )
    click.echo(f"{'repository':<12} {'linked':>8} {'not_linked':>11} {'total':>8}")
    for name, row in rows:
        click.echo(f"{name:<12} {row.linked:>8} {row.not_linked:>11} {row.total:>8}")
    click.echo("")
    click.echo(f"cwe linked upward (to capec):  {stats.cwe_linked_upward}")
    click.echo(f"cwe linked downward (to cve):  {stats.cwe_linked_downward}")
    click.echo(f"complete chains:               {len(dataset.chains)}")
    click.echo(f"dangling references:           {sum(dataset.dangling.counts().values())}")
    click.echo(f"run_manifest_id:               {run_manifest['manifest_id']}")


@cli.command("compare")
@click.option("--report", "report_paths", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="evaluation_report.json file, repeatable.")
@click.option("--out", default=None, type=click.Path(dir_okay=False),
              help="model_comparison.csv path to write.")
@_config_option
def compare_command(report_paths, out, config_path):
    """Tabulate evaluation reports per model and preprocessing mode."""
    cfg = _effective_config(config_path)
    reports = [report_from_json(_read_json(path)) for path in report_paths]
    table = compare_models(reports)
    run_manifest = build_run_manifest("compare", cfg, None)
    if out is not None:
        table.to_csv(out, run_manifest_id=run_manifest["manifest_id"])
        write_run_manifest(run_manifest, Path(out).parent)
        log.info("comparison written to %s", out)
    click.echo(f"{'model_name':<40} {'mode':<8} {'precision':>9} {'recall':>9} {'f1':>9} best")
    for row in table.rows:
        click.echo(
            f"{row.model_name:<40} {row.mode:<8} {row.precision:>9.3f} "
            f"{row.recall:>9.3f} {row.f1:>9.3f} {'*' if row.best else ''}"
        )
    if table.tie:
        click.echo("note: best f1 is a tie")
    if table.absent:
        log.info("cells without a report: %d", len(table.absent))


def main(argv=None) -> int:
    """Run the CLI with the documented exit-code contract."""
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", force=True)
    try:
        cli.main(args=argv, prog_name="vuldat", standalone_mode=False)
    except click.ClickException as exc:
        # click defaults UsageError to exit code 2; 2 is reserved for data errors here
        exc.show()
        return 1
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except ConfigurationError as exc:
        log.error("%s", exc)
        return 1
    except TransportError as exc:
        log.error("%s", exc)
        return 3
    except VuldatError as exc:
        log.error("%s", exc)
        return 2
    except OSError as exc:
        log.error("%s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

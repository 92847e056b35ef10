"""Attack-level evaluation of detection lists against the mapping dataset.

Classifies every attack into TP/FP/FN/TN/Disjoint from the sizes of its
detected and actual CVE sets, computes precision/recall/F1 under a
configurable policy for the Disjoint case, and reports per-attack
Jaccard, mapping-accuracy and detection-accuracy ratios with box-plot
style distribution summaries.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import ConfigurationError, ConsistencyError, ValidationError
from .retrieval import DetectionList


class OutcomeClass(str, Enum):
    TP = "TP"
    FP = "FP"
    FN = "FN"
    TN = "TN"
    DISJOINT = "Disjoint"


class DisjointPolicy(str, Enum):
    """How Disjoint attacks enter precision/recall denominators."""

    FP = "fp"
    FP_AND_FN = "fp-and-fn"
    EXCLUDE = "exclude"

    @classmethod
    def parse(cls, value: object) -> "DisjointPolicy":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            choices = ", ".join(p.value for p in cls)
            raise ConfigurationError(
                f"unknown disjoint policy {value!r}; expected one of: {choices}"
            ) from None


def classify_counts(detected: int, actual: int, overlap: int) -> OutcomeClass:
    """Outcome class from set sizes; overlap wins, then emptiness pattern."""
    if overlap > 0:
        return OutcomeClass.TP
    if detected > 0 and actual == 0:
        return OutcomeClass.FP
    if detected == 0 and actual > 0:
        return OutcomeClass.FN
    if detected == 0 and actual == 0:
        return OutcomeClass.TN
    return OutcomeClass.DISJOINT


@dataclass(frozen=True)
class AttackOutcome:
    """Classification of one attack from its detected/actual set sizes."""

    technique_id: str
    detected: int
    actual: int
    overlap: int
    outcome: OutcomeClass

    def __post_init__(self) -> None:
        if min(self.detected, self.actual, self.overlap) < 0:
            raise ValidationError(f"{self.technique_id}: negative set size")
        if self.overlap > min(self.detected, self.actual):
            raise ValidationError(
                f"{self.technique_id}: overlap {self.overlap} exceeds "
                f"min(detected={self.detected}, actual={self.actual})"
            )
        expected = classify_counts(self.detected, self.actual, self.overlap)
        if self.outcome is not expected:
            raise ValidationError(
                f"{self.technique_id}: outcome {self.outcome.value} "
                f"inconsistent with counts (expected {expected.value})"
            )


@dataclass(frozen=True)
class AttackAccuracy:
    """Per-attack ratios; None marks an undefined denominator."""

    technique_id: str
    jaccard: float | None
    mapping_accuracy: float | None
    detection_accuracy: float | None

    def __post_init__(self) -> None:
        for name in ("jaccard", "mapping_accuracy", "detection_accuracy"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValidationError(f"{self.technique_id}: {name} {value} outside [0, 1]")


@dataclass(frozen=True)
class PrfResult:
    precision: float
    recall: float
    f1: float
    degenerate: tuple[str, ...] = ()


@dataclass(frozen=True)
class DistributionSummary:
    """Five-number summary plus mean and Tukey whiskers over defined values."""

    count: int
    undefined: int
    mean: float | None = None
    minimum: float | None = None
    q1: float | None = None
    median: float | None = None
    q3: float | None = None
    maximum: float | None = None
    whisker_low: float | None = None
    whisker_high: float | None = None

    def as_json_dict(self) -> dict:
        return {
            "count": self.count,
            "undefined": self.undefined,
            "mean": self.mean,
            "min": self.minimum,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.maximum,
            "whisker_low": self.whisker_low,
            "whisker_high": self.whisker_high,
        }


def _detected_set(value) -> set[str]:
    if isinstance(value, DetectionList):
        return value.cve_set()
    return set(value)


def _check_same_attacks(detections: Mapping, mapping: Mapping) -> list[str]:
    detected_keys = set(detections)
    actual_keys = set(mapping)
    if detected_keys != actual_keys:
        missing = sorted(actual_keys - detected_keys)[:5]
        extra = sorted(detected_keys - actual_keys)[:5]
        raise ConsistencyError(
            f"attack sets differ: missing from detections {missing}, unexpected {extra}"
        )
    return sorted(detected_keys)


def classify(detections: Mapping, mapping: Mapping[str, set]) -> tuple[AttackOutcome, ...]:
    """One outcome per attack; both maps must cover the same attack set."""
    outcomes = []
    for technique_id in _check_same_attacks(detections, mapping):
        detected = _detected_set(detections[technique_id])
        actual = set(mapping[technique_id])
        overlap = len(detected & actual)
        outcomes.append(
            AttackOutcome(
                technique_id=technique_id,
                detected=len(detected),
                actual=len(actual),
                overlap=overlap,
                outcome=classify_counts(len(detected), len(actual), overlap),
            )
        )
    return tuple(outcomes)


def outcome_counts(outcomes: Iterable[AttackOutcome]) -> dict[str, int]:
    counts = {cls.value: 0 for cls in OutcomeClass}
    for outcome in outcomes:
        counts[outcome.outcome.value] += 1
    return counts


def prf(outcomes: Iterable[AttackOutcome], disjoint_policy: object = DisjointPolicy.FP) -> PrfResult:
    """Precision/recall/F1 over attack outcomes under the disjoint policy."""
    outcomes = tuple(outcomes)
    if not outcomes:
        raise ValidationError("prf needs at least one outcome")
    policy = DisjointPolicy.parse(disjoint_policy)
    counts = outcome_counts(outcomes)
    tp = counts[OutcomeClass.TP.value]
    fp = counts[OutcomeClass.FP.value]
    fn = counts[OutcomeClass.FN.value]
    disjoint = counts[OutcomeClass.DISJOINT.value]
    if policy in (DisjointPolicy.FP, DisjointPolicy.FP_AND_FN):
        fp += disjoint
    if policy is DisjointPolicy.FP_AND_FN:
        fn += disjoint
    degenerate = []
    if tp + fp > 0:
        precision = tp / (tp + fp)
    else:
        precision = 0.0
        degenerate.append("precision")
    if tp + fn > 0:
        recall = tp / (tp + fn)
    else:
        recall = 0.0
        degenerate.append("recall")
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
        degenerate.append("f1")
    return PrfResult(precision, recall, f1, tuple(degenerate))


def accuracies(detections: Mapping, mapping: Mapping[str, set]) -> tuple[AttackAccuracy, ...]:
    """Jaccard, mapping accuracy and detection accuracy per attack."""
    rows = []
    for technique_id in _check_same_attacks(detections, mapping):
        detected = _detected_set(detections[technique_id])
        actual = set(mapping[technique_id])
        overlap = len(detected & actual)
        union = len(detected | actual)
        rows.append(
            AttackAccuracy(
                technique_id=technique_id,
                jaccard=overlap / union if union else None,
                mapping_accuracy=overlap / len(actual) if actual else None,
                detection_accuracy=overlap / len(detected) if detected else None,
            )
        )
    return tuple(rows)


def summarize(values: Iterable[float | None]) -> DistributionSummary:
    """Distribution summary over defined values; undefined ones are counted."""
    values = list(values)
    defined = [v for v in values if v is not None]
    undefined = len(values) - len(defined)
    if not defined:
        return DistributionSummary(count=0, undefined=undefined)
    arr = np.asarray(defined, dtype=np.float64)
    q1, median, q3 = (float(q) for q in np.percentile(arr, [25.0, 50.0, 75.0]))
    iqr = q3 - q1
    low_cut = q1 - 1.5 * iqr
    high_cut = q3 + 1.5 * iqr
    inside = [v for v in defined if low_cut <= v <= high_cut]
    return DistributionSummary(
        count=len(defined),
        undefined=undefined,
        mean=float(np.mean(arr)),
        minimum=float(np.min(arr)),
        q1=q1,
        median=median,
        q3=q3,
        maximum=float(np.max(arr)),
        whisker_low=min(inside),
        whisker_high=max(inside),
    )


@dataclass
class EvaluationReport:
    """Everything the evaluate step knows about one run."""

    outcomes: tuple[AttackOutcome, ...]
    accuracies: tuple[AttackAccuracy, ...]
    counts: dict[str, int]
    disjoint_policy: DisjointPolicy
    precision: float
    recall: float
    f1: float
    degenerate: tuple[str, ...]
    jaccard_summary: DistributionSummary
    mapping_accuracy_summary: DistributionSummary
    detection_accuracy_summary: DistributionSummary
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if sum(self.counts.values()) != len(self.outcomes):
            raise ValidationError("outcome counts do not partition the attack set")
        for name in ("precision", "recall", "f1"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} {value} outside [0, 1]")

    def as_json_dict(self) -> dict:
        return {
            "counts": dict(self.counts),
            "disjoint_policy": self.disjoint_policy.value,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "degenerate": list(self.degenerate),
            "jaccard": self.jaccard_summary.as_json_dict(),
            "mapping_accuracy": self.mapping_accuracy_summary.as_json_dict(),
            "detection_accuracy": self.detection_accuracy_summary.as_json_dict(),
            "attacks": [
                {
                    "technique_id": outcome.technique_id,
                    "class": outcome.outcome.value,
                    "detected": outcome.detected,
                    "actual": outcome.actual,
                    "overlap": outcome.overlap,
                    "jaccard": accuracy.jaccard,
                    "mapping_accuracy": accuracy.mapping_accuracy,
                    "detection_accuracy": accuracy.detection_accuracy,
                }
                for outcome, accuracy in zip(self.outcomes, self.accuracies)
            ],
            "metadata": dict(self.metadata),
        }

    def write_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(self.as_json_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        return path

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as handle:
            manifest_id = self.metadata.get("run_manifest_id")
            if manifest_id:
                handle.write(f"# run_manifest_id={manifest_id}\n")
            writer = csv.writer(handle)
            writer.writerow(
                [
                    "technique_id", "class", "detected", "actual", "overlap",
                    "jaccard", "mapping_accuracy", "detection_accuracy",
                ]
            )
            for outcome, accuracy in zip(self.outcomes, self.accuracies):
                writer.writerow(
                    [
                        outcome.technique_id,
                        outcome.outcome.value,
                        outcome.detected,
                        outcome.actual,
                        outcome.overlap,
                        _csv_cell(accuracy.jaccard),
                        _csv_cell(accuracy.mapping_accuracy),
                        _csv_cell(accuracy.detection_accuracy),
                    ]
                )
        return path


def _csv_cell(value: float | None) -> str:
    return "" if value is None else repr(value)


def aggregate(
    detections: Mapping,
    mapping: Mapping[str, set],
    disjoint_policy: object = DisjointPolicy.FP,
    metadata: dict | None = None,
) -> EvaluationReport:
    """Classify, score and summarize one run into an EvaluationReport."""
    policy = DisjointPolicy.parse(disjoint_policy)
    outcomes = classify(detections, mapping)
    accuracy_rows = accuracies(detections, mapping)
    if outcomes:
        scores = prf(outcomes, policy)
    else:
        scores = PrfResult(0.0, 0.0, 0.0, ("precision", "recall", "f1"))
    return EvaluationReport(
        outcomes=outcomes,
        accuracies=accuracy_rows,
        counts=outcome_counts(outcomes),
        disjoint_policy=policy,
        precision=scores.precision,
        recall=scores.recall,
        f1=scores.f1,
        degenerate=scores.degenerate,
        jaccard_summary=summarize(row.jaccard for row in accuracy_rows),
        mapping_accuracy_summary=summarize(row.mapping_accuracy for row in accuracy_rows),
        detection_accuracy_summary=summarize(row.detection_accuracy for row in accuracy_rows),
        metadata=dict(metadata or {}),
    )


def _summary_from_json(data: dict) -> DistributionSummary:
    return DistributionSummary(
        count=data["count"],
        undefined=data["undefined"],
        mean=data["mean"],
        minimum=data["min"],
        q1=data["q1"],
        median=data["median"],
        q3=data["q3"],
        maximum=data["max"],
        whisker_low=data["whisker_low"],
        whisker_high=data["whisker_high"],
    )


def report_from_json(data: dict) -> EvaluationReport:
    """Rebuild an EvaluationReport from its as_json_dict form."""
    try:
        outcomes = tuple(
            AttackOutcome(
                technique_id=row["technique_id"],
                detected=row["detected"],
                actual=row["actual"],
                overlap=row["overlap"],
                outcome=OutcomeClass(row["class"]),
            )
            for row in data["attacks"]
        )
        accuracy_rows = tuple(
            AttackAccuracy(
                technique_id=row["technique_id"],
                jaccard=row["jaccard"],
                mapping_accuracy=row["mapping_accuracy"],
                detection_accuracy=row["detection_accuracy"],
            )
            for row in data["attacks"]
        )
        return EvaluationReport(
            outcomes=outcomes,
            accuracies=accuracy_rows,
            counts=dict(data["counts"]),
            disjoint_policy=DisjointPolicy.parse(data["disjoint_policy"]),
            precision=data["precision"],
            recall=data["recall"],
            f1=data["f1"],
            degenerate=tuple(data["degenerate"]),
            jaccard_summary=_summary_from_json(data["jaccard"]),
            mapping_accuracy_summary=_summary_from_json(data["mapping_accuracy"]),
            detection_accuracy_summary=_summary_from_json(data["detection_accuracy"]),
            metadata=dict(data["metadata"]),
        )
    except (KeyError, TypeError, ValueError, ConfigurationError) as exc:
        raise ValidationError(f"malformed evaluation report: {exc}") from exc


@dataclass(frozen=True)
class ComparisonRow:
    model_name: str
    mode: str
    precision: float
    recall: float
    f1: float
    best: bool


@dataclass(frozen=True)
class ComparisonTable:
    """Model × mode grid of headline metrics, registry-ordered."""

    rows: tuple[ComparisonRow, ...]
    absent: tuple[tuple[str, str], ...]
    best_f1: float | None
    tie: bool

    def to_csv(self, path: str | Path, run_manifest_id: str | None = None) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as handle:
            if run_manifest_id is not None:
                handle.write(f"# run_manifest_id={run_manifest_id}\n")
            writer = csv.writer(handle)
            writer.writerow(["model_name", "mode", "precision", "recall", "f1", "best"])
            for row in self.rows:
                writer.writerow(
                    [
                        row.model_name, row.mode,
                        repr(row.precision), repr(row.recall), repr(row.f1),
                        "yes" if row.best else "",
                    ]
                )
        return path


def compare_models(reports: Iterable[EvaluationReport]) -> ComparisonTable:
    """Order reports by registry position and flag the best-F1 cell(s)."""
    from .embedding import MODEL_REGISTRY

    registry_order = {spec.model_name: i for i, spec in enumerate(MODEL_REGISTRY)}
    mode_order = {"partial": 0, "full": 1}
    cells: dict[tuple[str, str], EvaluationReport] = {}
    for report in reports:
        model_name = str(report.metadata.get("model_name", ""))
        mode = str(report.metadata.get("mode", ""))
        key = (model_name, mode)
        if key in cells:
            raise ValidationError(f"duplicate comparison cell {key}")
        cells[key] = report
    ordered = sorted(
        cells.items(),
        key=lambda kv: (
            registry_order.get(kv[0][0], len(registry_order)),
            mode_order.get(kv[0][1], len(mode_order)),
            kv[0],
        ),
    )
    best_f1 = max((report.f1 for _, report in ordered), default=None)
    best_cells = [key for key, report in ordered if report.f1 == best_f1]
    rows = tuple(
        ComparisonRow(
            model_name=key[0],
            mode=key[1],
            precision=report.precision,
            recall=report.recall,
            f1=report.f1,
            best=key in best_cells,
        )
        for key, report in ordered
    )
    table_models = [spec.model_name for spec in MODEL_REGISTRY if spec.model_name != "test-hash"]
    absent = tuple(
        (model_name, mode)
        for model_name in table_models
        for mode in ("partial", "full")
        if (model_name, mode) not in cells
    )
    return ComparisonTable(rows=rows, absent=absent, best_f1=best_f1, tie=len(best_cells) > 1)

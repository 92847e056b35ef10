"""Independent brute-force oracles the suite checks the package against.

Everything here is written from the metric definitions, not from the
package code: plain loops, no shared helpers, quartiles by the explicit
linear-interpolation formula instead of numpy.percentile. Slow is fine.
"""

from __future__ import annotations

import math

import numpy as np


# --- outcome classification -------------------------------------------------

def classify_sets(detected: set[str], actual: set[str]) -> str:
    inter = detected & actual
    if inter:
        return "TP"
    if detected and actual:
        return "Disjoint"
    if detected:
        return "FP"
    if actual:
        return "FN"
    return "TN"


def prf_from_classes(classes: list[str], policy: str) -> tuple[float, float, float]:
    tp = classes.count("TP")
    fp = classes.count("FP")
    fn = classes.count("FN")
    disjoint = classes.count("Disjoint")
    if policy == "fp":
        fp += disjoint
    elif policy == "fp-and-fn":
        fp += disjoint
        fn += disjoint
    elif policy != "exclude":
        raise ValueError(policy)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def accuracy_triple(
    detected: set[str], actual: set[str]
) -> tuple[float | None, float | None, float | None]:
    inter = len(detected & actual)
    union = len(detected | actual)
    jaccard = inter / union if union else None
    mapping_acc = inter / len(actual) if actual else None
    detection_acc = inter / len(detected) if detected else None
    return jaccard, mapping_acc, detection_acc


# --- distribution summary ---------------------------------------------------

def percentile_linear(values: list[float], p: float) -> float:
    """p in [0, 100], linear interpolation between closest ranks."""
    ordered = sorted(values)
    if len(ordered) == 1:
        return ordered[0]
    rank = (len(ordered) - 1) * p / 100.0
    lo = int(math.floor(rank))
    hi = int(math.ceil(rank))
    if lo == hi:
        return ordered[lo]
    weight = rank - lo
    return ordered[lo] * (1 - weight) + ordered[hi] * weight


def summary_dict(values: list[float | None]) -> dict:
    defined = [v for v in values if v is not None]
    undefined = len(values) - len(defined)
    if not defined:
        return {
            "count": 0, "undefined": undefined, "mean": None, "min": None,
            "q1": None, "median": None, "q3": None, "max": None,
            "whisker_low": None, "whisker_high": None,
        }
    q1 = percentile_linear(defined, 25)
    q3 = percentile_linear(defined, 75)
    iqr = q3 - q1
    fenced = [v for v in defined if q1 - 1.5 * iqr <= v <= q3 + 1.5 * iqr]
    return {
        "count": len(defined),
        "undefined": undefined,
        "mean": sum(defined) / len(defined),
        "min": min(defined),
        "q1": q1,
        "median": percentile_linear(defined, 50),
        "q3": q3,
        "max": max(defined),
        "whisker_low": min(fenced),
        "whisker_high": max(fenced),
    }


# --- link-graph join --------------------------------------------------------

def join_mapping(
    techniques: list, capecs: list, cwes: list, cves: list
) -> tuple[dict[str, set[str]], set[tuple[str, str, str, str]]]:
    """Triple-nested join over raw record lists."""
    cve_ids = {c.cve_id for c in cves}
    mapping: dict[str, set[str]] = {}
    chains: set[tuple[str, str, str, str]] = set()
    for technique in techniques:
        mapping[technique.technique_id] = set()
        for capec in capecs:
            if capec.capec_id not in technique.capec_refs:
                continue
            for cwe in cwes:
                if cwe.cwe_id not in capec.cwe_refs:
                    continue
                for cve_ref in cwe.cve_refs:
                    if cve_ref in cve_ids:
                        mapping[technique.technique_id].add(cve_ref)
                        chains.add(
                            (technique.technique_id, capec.capec_id, cwe.cwe_id, cve_ref)
                        )
    return mapping, chains


def linked_counts(chains: set[tuple[str, str, str, str]]) -> dict[str, int]:
    return {
        "techniques": len({c[0] for c in chains}),
        "capecs": len({c[1] for c in chains}),
        "cwes": len({c[2] for c in chains}),
        "cves": len({c[3] for c in chains}),
    }


# --- retrieval --------------------------------------------------------------

def cosine_f64(u: np.ndarray, v: np.ndarray) -> float:
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(v, dtype=np.float64)
    return float(np.dot(a, b) / math.sqrt(float(np.dot(a, a)) * float(np.dot(b, b))))


def cosine_fsum(u, v) -> float:
    """Pure-python compensated-sum cosine, for tolerance cross-checks."""
    dot = math.fsum(float(x) * float(y) for x, y in zip(u, v))
    nu = math.fsum(float(x) * float(x) for x in u)
    nv = math.fsum(float(y) * float(y) for y in v)
    return dot / math.sqrt(nu * nv)


def retrieve_bruteforce(
    query: np.ndarray,
    corpus: dict[str, np.ndarray],
    threshold: float,
    top_n: int,
) -> list[tuple[str, float]]:
    """All-pairs scoring, strict threshold, (-score, id) order, truncation."""
    scored = [(cve_id, cosine_f64(query, vec)) for cve_id, vec in corpus.items()]
    kept = [(cve_id, s) for cve_id, s in scored if s > threshold]
    kept.sort(key=lambda pair: (-pair[1], pair[0]))
    return kept[:top_n]


# --- diamond fixture ground truth (derived by hand) --------------------------
# T0001 -> CAPEC-1 -> CWE-10 -> {CVE-2020-0001, CVE-2020-0002}   (2 chains)
# T0001 -> CAPEC-2 -> CWE-10 -> {CVE-2020-0001, CVE-2020-0002}   (2 chains)
# T0001 -> CAPEC-2 -> CWE-20 -> {CVE-2020-0002}                  (1 chain)
# T0002 -> CAPEC-3 -> CWE-30 -> {CVE-2021-0003}                  (1 chain)
# T0002 -> CAPEC-99 dangles; T1003.001 has no CAPEC references.
DIAMOND_MAPPING = {
    "T0001": {"CVE-2020-0001", "CVE-2020-0002"},
    "T0002": {"CVE-2021-0003"},
    "T1003.001": set(),
}
DIAMOND_CHAIN_COUNT = 6
DIAMOND_STATS = {
    "techniques": {"linked": 2, "not_linked": 1, "total": 3},
    "capecs": {"linked": 3, "not_linked": 1, "total": 4},
    "cwes": {"linked": 3, "not_linked": 2, "total": 5},
    "cves": {"linked": 3, "not_linked": 7, "total": 10},
    "cwe_linked_upward": 4,
    "cwe_linked_downward": 4,
}
DIAMOND_DANGLING = {"technique_to_capec": 1, "capec_to_cwe": 0, "cwe_to_cve": 0}

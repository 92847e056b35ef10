"""Parsers turning raw MITRE feed documents into normalized records.

Accepted inputs per repository:

* ATT&CK   -- STIX 2.1 bundle JSON (``stix``) or normalized JSONL (``jsonl``)
* CAPEC    -- XML catalog (``xml``) or JSONL
* CWE      -- XML catalog (``xml``) or JSONL
* CVE      -- NVD JSON feed, 1.1 or 2.0 layout (``nvd``), or JSONL

The JSONL form is this project's canonical interchange format: UTF-8, one
object per line, field names exactly matching the record dataclasses.

Every parser is a pure function of the input bytes: same bytes, same
records, in id-sorted order. Records that cannot be kept (revoked or
deprecated entries, empty or rejected descriptions, duplicate ids) are
dropped and counted, so ``len(records) + dropped == total`` always holds.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Callable, Generic, TypeVar

from .errors import ConfigurationError, ParseError
from .records import (
    CAPEC_ID_RE,
    CVE_ID_RE,
    CWE_ID_RE,
    TECHNIQUE_ID_RE,
    AttackTechnique,
    CapecPattern,
    CveRecord,
    CweEntry,
)

R = TypeVar("R")

# NVD marks withdrawn entries by prefixing the description text.
CVE_REJECT_MARKER = "** REJECT **"

_CVE_IN_TEXT_RE = re.compile(r"CVE-\d{4}-\d{4,}")


@dataclass
class FeedParseResult(Generic[R]):
    """Outcome of one feed parse: kept records plus drop accounting."""

    records: list[R]
    dropped: int = 0
    total: int = 0
    drop_reasons: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        assert len(self.records) + self.dropped == self.total

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


class _DropCounter:
    """Collects dropped-record counts keyed by reason."""

    def __init__(self) -> None:
        self.reasons: dict[str, int] = {}

    def drop(self, reason: str) -> None:
        self.reasons[reason] = self.reasons.get(reason, 0) + 1

    @property
    def count(self) -> int:
        return sum(self.reasons.values())


def _decode(raw: bytes) -> str:
    if isinstance(raw, str):
        return raw
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"feed is not valid UTF-8: {exc.reason}", offset=exc.start) from exc


def _load_json(raw: bytes):
    text = _decode(raw)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", offset=exc.pos) from exc


def _load_xml(raw: bytes) -> ET.Element:
    text = _decode(raw)
    try:
        return ET.fromstring(text)
    except ET.ParseError as exc:
        line, column = exc.position
        offset = sum(len(ln) + 1 for ln in text.split("\n")[: line - 1]) + column
        raise ParseError(f"malformed XML: {exc.msg.split(':')[0]}", offset=offset) from exc


def _iter_jsonl(raw: bytes):
    text = _decode(raw)
    offset = 0
    for line in text.split("\n"):
        stripped = line.strip()
        if stripped:
            try:
                yield json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise ParseError(f"malformed JSONL line: {exc.msg}", offset=offset + exc.pos) from exc
        offset += len(line) + 1


def _dedup(refs: list[str]) -> list[str]:
    """Order-preserving de-duplication of reference id lists."""
    return list(dict.fromkeys(refs))


def _localname(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _find_local(elem: ET.Element, name: str) -> ET.Element | None:
    for child in elem:
        if _localname(child.tag) == name:
            return child
    return None


def _iter_local(elem: ET.Element, name: str):
    for node in elem.iter():
        if _localname(node.tag) == name:
            yield node


def _text_of(elem: ET.Element | None) -> str:
    if elem is None:
        return ""
    return " ".join("".join(elem.itertext()).split())


def _finalize(
    rows: list[tuple[str, R]],
    counter: _DropCounter,
    total: int,
) -> FeedParseResult[R]:
    """Keep the first record per id, drop later duplicates, sort by id."""
    by_id: dict[str, R] = {}
    for rid, rec in rows:
        if rid in by_id:
            counter.drop("duplicate_id")
        else:
            by_id[rid] = rec
    records = [by_id[rid] for rid in sorted(by_id)]
    return FeedParseResult(records=records, dropped=counter.count, total=total, drop_reasons=counter.reasons)


# ---------------------------------------------------------------------------
# ATT&CK
# ---------------------------------------------------------------------------


def _external_references(obj: dict) -> list:
    refs = obj.get("external_references", [])
    return refs if isinstance(refs, list) else []


def _stix_external_id(obj: dict, source_name: str) -> str | None:
    for ref in _external_references(obj):
        if isinstance(ref, dict) and ref.get("source_name") == source_name:
            ext = ref.get("external_id")
            if ext:
                return str(ext)
    return None


def _stix_capec_refs(obj: dict) -> list[str]:
    refs = []
    for ref in _external_references(obj):
        if isinstance(ref, dict) and ref.get("source_name") == "capec":
            ext = str(ref.get("external_id", ""))
            if CAPEC_ID_RE.match(ext):
                refs.append(ext)
    return _dedup(refs)


def parse_attack_feed(raw: bytes, format: str = "stix") -> FeedParseResult[AttackTechnique]:
    """Parse an ATT&CK feed into techniques/sub-techniques.

    Revoked or deprecated STIX objects are excluded; sub-techniques are
    kept as independent entries.
    """
    if format == "jsonl":
        return _parse_attack_jsonl(raw)
    if format != "stix":
        raise ConfigurationError(f"unknown ATT&CK feed format: {format!r}")

    doc = _load_json(raw)
    if not isinstance(doc, dict) or not isinstance(doc.get("objects"), list):
        raise ParseError("not a STIX bundle: missing 'objects' array")

    counter = _DropCounter()
    rows: list[tuple[str, AttackTechnique]] = []
    total = 0
    for obj in doc["objects"]:
        if not isinstance(obj, dict) or obj.get("type") != "attack-pattern":
            continue
        total += 1
        if obj.get("revoked") is True or obj.get("x_mitre_deprecated") is True:
            counter.drop("revoked_or_deprecated")
            continue
        technique_id = _stix_external_id(obj, "mitre-attack")
        if not technique_id or not TECHNIQUE_ID_RE.match(technique_id):
            counter.drop("missing_or_invalid_id")
            continue
        description = (obj.get("description") or "").strip()
        if not description:
            counter.drop("empty_description")
            continue
        rows.append(
            (
                technique_id,
                AttackTechnique(
                    technique_id=technique_id,
                    name=obj.get("name", ""),
                    description=description,
                    capec_refs=_stix_capec_refs(obj),
                ),
            )
        )
    return _finalize(rows, counter, total)


def _parse_attack_jsonl(raw: bytes) -> FeedParseResult[AttackTechnique]:
    counter = _DropCounter()
    rows = []
    total = 0
    for obj in _iter_jsonl(raw):
        total += 1
        description = (obj.get("description") or "").strip()
        if not description:
            counter.drop("empty_description")
            continue
        try:
            rec = AttackTechnique(
                technique_id=obj["technique_id"],
                name=obj.get("name", ""),
                description=description,
                capec_refs=_dedup(list(obj.get("capec_refs", []))),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"technique record {total} is malformed: {exc!r}") from exc
        rows.append((rec.technique_id, rec))
    return _finalize(rows, counter, total)


# ---------------------------------------------------------------------------
# CAPEC / CWE XML catalogs
# ---------------------------------------------------------------------------


def parse_capec_feed(raw: bytes, format: str = "xml") -> FeedParseResult[CapecPattern]:
    """Parse a CAPEC catalog; Related_Weakness elements become cwe_refs."""
    if format == "jsonl":
        return _parse_refs_jsonl(raw, "capec_id", "cwe_refs", CapecPattern)
    if format != "xml":
        raise ConfigurationError(f"unknown CAPEC feed format: {format!r}")

    root = _load_xml(raw)
    counter = _DropCounter()
    rows = []
    total = 0
    for pattern in _iter_local(root, "Attack_Pattern"):
        if "ID" not in pattern.attrib:
            continue
        total += 1
        if pattern.get("Status") == "Deprecated":
            counter.drop("deprecated")
            continue
        cwe_refs = []
        for rel in _iter_local(pattern, "Related_Weakness"):
            cwe_num = rel.get("CWE_ID")
            if cwe_num:
                cwe_refs.append(f"CWE-{cwe_num}")
        rec = CapecPattern(
            capec_id=f"CAPEC-{pattern.get('ID')}",
            name=pattern.get("Name", ""),
            description=_text_of(_find_local(pattern, "Description")),
            cwe_refs=_dedup(cwe_refs),
        )
        rows.append((rec.capec_id, rec))
    return _finalize(rows, counter, total)


def parse_cwe_feed(raw: bytes, format: str = "xml") -> FeedParseResult[CweEntry]:
    """Parse a CWE catalog; Observed_Example CVE references become cve_refs."""
    if format == "jsonl":
        return _parse_refs_jsonl(raw, "cwe_id", "cve_refs", CweEntry)
    if format != "xml":
        raise ConfigurationError(f"unknown CWE feed format: {format!r}")

    root = _load_xml(raw)
    counter = _DropCounter()
    rows = []
    total = 0
    for weakness in _iter_local(root, "Weakness"):
        if "ID" not in weakness.attrib:
            continue
        total += 1
        if weakness.get("Status") == "Deprecated":
            counter.drop("deprecated")
            continue
        cve_refs = []
        for example in _iter_local(weakness, "Observed_Example"):
            reference = _text_of(_find_local(example, "Reference"))
            cve_refs.extend(_CVE_IN_TEXT_RE.findall(reference))
        rec = CweEntry(
            cwe_id=f"CWE-{weakness.get('ID')}",
            name=weakness.get("Name", ""),
            description=_text_of(_find_local(weakness, "Description")),
            cve_refs=_dedup(cve_refs),
        )
        rows.append((rec.cwe_id, rec))
    return _finalize(rows, counter, total)


def _parse_refs_jsonl(raw: bytes, id_field: str, refs_field: str, cls: Callable) -> FeedParseResult:
    counter = _DropCounter()
    rows = []
    total = 0
    for obj in _iter_jsonl(raw):
        total += 1
        try:
            rec = cls(
                obj[id_field],
                obj.get("name", ""),
                obj.get("description", ""),
                _dedup(list(obj.get(refs_field, []))),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"{cls.__name__} record {total} is malformed: {exc!r}") from exc
        rows.append((getattr(rec, id_field), rec))
    return _finalize(rows, counter, total)


# ---------------------------------------------------------------------------
# CVE (NVD JSON feeds)
# ---------------------------------------------------------------------------


def _english_description(entries: list[dict]) -> str:
    for entry in entries:
        if isinstance(entry, dict) and entry.get("lang") == "en":
            return (entry.get("value") or "").strip()
    return ""


def _year_from(date_text: str | None, cve_id: str) -> int:
    if isinstance(date_text, str) and len(date_text) >= 4 and date_text[:4].isdigit():
        return int(date_text[:4])
    return int(cve_id.split("-")[1])


def parse_cve_feed(raw: bytes, format: str = "nvd") -> FeedParseResult[CveRecord]:
    """Parse an NVD JSON feed (1.1 or 2.0 layout auto-detected).

    Entries with no English description, an empty description, or a
    rejection marker are dropped and counted.
    """
    if format == "jsonl":
        return _parse_cve_jsonl(raw)
    if format != "nvd":
        raise ConfigurationError(f"unknown CVE feed format: {format!r}")

    doc = _load_json(raw)
    if not isinstance(doc, dict):
        raise ParseError("not an NVD feed document")
    if "CVE_Items" in doc:
        items, layout = doc["CVE_Items"], "1.1"
    elif "vulnerabilities" in doc:
        items, layout = doc["vulnerabilities"], "2.0"
    else:
        raise ParseError("not an NVD feed: expected 'CVE_Items' or 'vulnerabilities'")
    if not isinstance(items, list):
        raise ParseError("NVD item container is not a list")

    counter = _DropCounter()
    rows = []
    total = 0
    for item in items:
        if not isinstance(item, dict):
            continue
        total += 1
        try:
            if layout == "1.1":
                cve = item.get("cve", {})
                cve_id = cve.get("CVE_data_meta", {}).get("ID", "")
                description = _english_description(
                    cve.get("description", {}).get("description_data", [])
                )
                published = item.get("publishedDate")
                status = None
            else:
                cve = item.get("cve", {})
                cve_id = cve.get("id", "")
                description = _english_description(cve.get("descriptions", []))
                published = cve.get("published")
                status = cve.get("vulnStatus")
        except (AttributeError, TypeError) as exc:
            raise ParseError(f"NVD item {total} is malformed: {exc!r}") from exc
        if not isinstance(cve_id, str) or not CVE_ID_RE.match(cve_id):
            counter.drop("missing_or_invalid_id")
            continue
        if not description:
            counter.drop("empty_description")
            continue
        if description.startswith(CVE_REJECT_MARKER) or status == "Rejected":
            counter.drop("rejected")
            continue
        rows.append(
            (cve_id, CveRecord(cve_id=cve_id, description=description, published_year=_year_from(published, cve_id)))
        )
    return _finalize(rows, counter, total)


def _parse_cve_jsonl(raw: bytes) -> FeedParseResult[CveRecord]:
    counter = _DropCounter()
    rows = []
    total = 0
    for obj in _iter_jsonl(raw):
        total += 1
        description = (obj.get("description") or "").strip()
        if not description:
            counter.drop("empty_description")
            continue
        if description.startswith(CVE_REJECT_MARKER):
            counter.drop("rejected")
            continue
        try:
            cve_id = obj["cve_id"]
            rec = CveRecord(
                cve_id=cve_id,
                description=description,
                published_year=int(obj.get("published_year", _year_from(None, cve_id))),
            )
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ParseError(f"CVE record {total} is malformed: {exc!r}") from exc
        rows.append((cve_id, rec))
    return _finalize(rows, counter, total)

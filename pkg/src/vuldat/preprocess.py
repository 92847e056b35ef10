"""Text normalization pipeline for technique and CVE descriptions.

Partial mode lowercases, tokenizes on punctuation boundaries, drops stop
words and normalizes each surviving token (dictionary lemma where the
table has an entry, suffix-stripping stem otherwise). Full mode first
removes citation markers, URLs and every remaining non-alphanumeric
character, then applies the partial steps. Token normalization iterates
to a fixed point, which makes both modes idempotent.

The stop list and lemma table ship as package data (`data/stopwords.txt`,
`data/lemma_table.tsv`) and can be overridden per `Preprocessor`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib.resources import files
from pathlib import Path

from .errors import ConfigurationError, DataError, VuldatError
from .records import CorpusSnapshot
from .stemmer import stem

CITATION_RE = re.compile(r"\(Citation:[^)]*\)")
URL_RE = re.compile(r"(?<!\S)(?:https?://|www\.)\S+", re.IGNORECASE)

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_NON_ALNUM_RE = re.compile(r"[^a-zA-Z0-9]+")
_WORD_RE = re.compile(r"^[a-z]+$")

# lemma-then-stem rewriting converges in 2-3 rounds; 8 is a safety bound
_MAX_NORMALIZE_ROUNDS = 8


class PreprocessMode(str, Enum):
    """Which cleaning steps run before tokenization."""

    PARTIAL = "partial"
    FULL = "full"

    @classmethod
    def parse(cls, value: object) -> "PreprocessMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigurationError(
                f"unknown preprocess mode {value!r}; expected 'partial' or 'full'"
            ) from None


@dataclass(frozen=True)
class CleanText:
    """Normalized text plus the mode that produced it."""

    text: str
    mode: PreprocessMode
    source_id: str = ""

    def __str__(self) -> str:
        return self.text


def _read_packaged(name: str) -> str:
    return files("vuldat").joinpath("data", name).read_text(encoding="utf-8")


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load the stop list (one lowercase word per line)."""
    raw = _read_packaged("stopwords.txt") if path is None else Path(path).read_text(encoding="utf-8")
    words = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        word = line.strip()
        if not word:
            continue
        if not _WORD_RE.match(word):
            raise DataError(f"stopwords line {lineno}: bad entry {word!r}")
        words.append(word)
    return frozenset(words)


def load_lemma_table(path: str | Path | None = None) -> dict[str, str]:
    """Load the irregular-form lemma table (form<TAB>lemma per line)."""
    raw = _read_packaged("lemma_table.tsv") if path is None else Path(path).read_text(encoding="utf-8")
    table: dict[str, str] = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise DataError(f"lemma table line {lineno}: expected 2 tab-separated fields")
        form, lemma = fields[0].strip(), fields[1].strip()
        if not (_WORD_RE.match(form) and _WORD_RE.match(lemma)):
            raise DataError(f"lemma table line {lineno}: bad entry {line!r}")
        if table.get(form, lemma) != lemma:
            raise DataError(f"lemma table line {lineno}: conflicting lemma for {form!r}")
        table[form] = lemma
    return table


@lru_cache(maxsize=1)
def _default_stopwords() -> frozenset[str]:
    return load_stopwords()


@lru_cache(maxsize=1)
def _default_lemma_table() -> dict[str, str]:
    return load_lemma_table()


def strip_citations(text: str) -> str:
    """Delete the shortest `(Citation: ...)` spans."""
    return CITATION_RE.sub(" ", text)


def strip_urls(text: str) -> str:
    """Delete whitespace-delimited http(s):// and www. tokens."""
    return URL_RE.sub(" ", text)


class Preprocessor:
    """Reusable pipeline bundling a stop list, lemma table and token cache."""

    def __init__(
        self,
        stopwords: frozenset[str] | None = None,
        lemma_table: dict[str, str] | None = None,
    ) -> None:
        self.stopwords = _default_stopwords() if stopwords is None else frozenset(stopwords)
        self.lemma_table = dict(_default_lemma_table() if lemma_table is None else lemma_table)
        self._cache: dict[str, str | None] = {}

    def preprocess(self, text: str, mode: object, source_id: str = "") -> CleanText:
        mode = PreprocessMode.parse(mode)
        if mode is PreprocessMode.FULL:
            text = strip_citations(text)
            text = strip_urls(text)
            text = _NON_ALNUM_RE.sub(" ", text)
        tokens = _TOKEN_RE.findall(text.lower())
        kept = [t for t in (self._normalize(t) for t in tokens) if t]
        return CleanText(" ".join(kept), mode, source_id)

    def _normalize(self, token: str) -> str | None:
        """Rewrite one token to its fixed point; None drops it."""
        if token in self._cache:
            return self._cache[token]
        final: str | None = token
        for _ in range(_MAX_NORMALIZE_ROUNDS):
            if final in self.stopwords:
                final = None
                break
            new = self.lemma_table.get(final)
            if new is None:
                new = stem(final)
            if new == final:
                break
            final = new
        else:
            if final in self.stopwords:
                final = None
        self._cache[token] = final
        return final


@lru_cache(maxsize=1)
def default_preprocessor() -> Preprocessor:
    return Preprocessor()


def preprocess(text: str, mode: object, source_id: str = "") -> CleanText:
    """Normalize one text with the packaged stop list and lemma table."""
    return default_preprocessor().preprocess(text, mode, source_id)


def preprocess_corpus(
    snapshot: CorpusSnapshot,
    mode: object,
    preprocessor: Preprocessor | None = None,
) -> dict[str, CleanText]:
    """Normalize every technique and CVE description, keyed by record id."""
    pre = preprocessor if preprocessor is not None else default_preprocessor()
    mode = PreprocessMode.parse(mode)
    out: dict[str, CleanText] = {}
    for source_id, text in _corpus_texts(snapshot):
        try:
            out[source_id] = pre.preprocess(text, mode, source_id)
        except VuldatError as exc:
            raise DataError(f"preprocessing {source_id} failed: {exc}") from exc
    return out


def _corpus_texts(snapshot: CorpusSnapshot):
    for technique in snapshot.techniques:
        yield technique.technique_id, technique.description
    for cve in snapshot.cves:
        yield cve.cve_id, cve.description

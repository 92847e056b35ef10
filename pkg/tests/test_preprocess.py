"""Normalization pipeline: golden pairs, invariants, corpus handling.

tests/data/preprocess_golden.json holds input/partial/full triples.
Two of them are worked through by hand below; the rest were generated
with an independent re-implementation of the documented rules (manual
citation scanner, whitespace-split URL filter, character-loop alphabet
filter, true-fixpoint token normalization) and spot-checked.

Hand trace, full mode:
  "Adversaries may steal web session cookies. (Citation: Pass The Cookie)"
  -> citation span deleted -> "Adversaries may steal web session cookies. "
  -> non-alphanumerics to spaces, lowercase, tokenized
  -> drop stop word "may"; "adversaries"->"adversari", "cookies"->"cooki"
  -> "adversari steal web session cooki"

  "See https://example.com  now"
  -> URL token deleted, double space collapses at tokenization
  -> "see" and "now" both survive the stop list -> "see now"
"""

import json
import string
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DATA_DIR, make_diamond_snapshot
from vuldat.errors import ConfigurationError, DataError
from vuldat.preprocess import (
    CleanText,
    PreprocessMode,
    Preprocessor,
    load_lemma_table,
    load_stopwords,
    preprocess,
    preprocess_corpus,
    strip_citations,
    strip_urls,
)

GOLDEN = json.loads((DATA_DIR / "preprocess_golden.json").read_text(encoding="utf-8"))
FULL_ALPHABET = set(string.ascii_lowercase + string.digits + " ")


def test_golden_corpus_is_large_enough():
    assert len(GOLDEN) >= 20


@pytest.mark.parametrize("row", GOLDEN, ids=lambda r: r["input"][:40] or "<empty>")
def test_golden_partial(row):
    assert preprocess(row["input"], "partial").text == row["partial"]


@pytest.mark.parametrize("row", GOLDEN, ids=lambda r: r["input"][:40] or "<empty>")
def test_golden_full(row):
    assert preprocess(row["input"], "full").text == row["full"]


@pytest.mark.parametrize("mode", ["partial", "full"])
def test_golden_idempotence(mode):
    for row in GOLDEN:
        once = preprocess(row["input"], mode).text
        assert preprocess(once, mode).text == once


def test_full_alphabet_invariant_on_golden():
    for row in GOLDEN:
        assert set(preprocess(row["input"], "full").text) <= FULL_ALPHABET


def test_partial_alphabet_matches_full_alphabet():
    # tokenization only emits [a-z0-9]+ either way
    for row in GOLDEN:
        assert set(preprocess(row["input"], "partial").text) <= FULL_ALPHABET


def test_token_count_monotonicity():
    for row in GOLDEN:
        n_full = len(preprocess(row["input"], "full").text.split())
        n_partial = len(preprocess(row["input"], "partial").text.split())
        assert n_full <= n_partial


def test_stopword_absence():
    stops = load_stopwords()
    for row in GOLDEN:
        for mode in ("partial", "full"):
            for token in preprocess(row["input"], mode).text.split():
                assert token not in stops


def test_cleaning_order_invariance():
    # URLs before citations or after: identical on the golden corpus
    for row in GOLDEN:
        a = strip_urls(strip_citations(row["input"]))
        b = strip_citations(strip_urls(row["input"]))
        assert preprocess(a, "partial").text == preprocess(b, "partial").text


def test_empty_text_both_modes():
    assert preprocess("", "partial").text == ""
    assert preprocess("", "full").text == ""


def test_mode_parse():
    assert PreprocessMode.parse("FULL") is PreprocessMode.FULL
    assert PreprocessMode.parse(PreprocessMode.PARTIAL) is PreprocessMode.PARTIAL
    with pytest.raises(ConfigurationError):
        PreprocessMode.parse("both")


def test_clean_text_records_mode_and_source():
    clean = preprocess("steal cookies", "full", source_id="T0001")
    assert isinstance(clean, CleanText)
    assert clean.mode is PreprocessMode.FULL
    assert clean.source_id == "T0001"
    assert str(clean) == clean.text


def test_citation_rule_is_shortest_span():
    # nested parenthesis: the span closes at the first ')'
    assert strip_citations("a (Citation: x (y)) b").strip().split() == ["a", ")", "b"]


def test_url_rule_only_matches_token_start():
    assert strip_urls("see https://a.example now") == "see   now"
    assert strip_urls("wrapped xhttps://a.example stays") == "wrapped xhttps://a.example stays"
    assert strip_urls("WWW.EXAMPLE.ORG leads") == "  leads"


def test_preprocess_corpus_covers_techniques_and_cves():
    snap = make_diamond_snapshot()
    out = preprocess_corpus(snap, "full")
    assert len(out) == len(snap.techniques) + len(snap.cves)
    assert out["T0001"].text == "adversari steal web session cooki"
    assert all(clean.mode is PreprocessMode.FULL for clean in out.values())
    assert all(out[sid].source_id == sid for sid in out)


def test_preprocess_corpus_rejects_bad_mode():
    with pytest.raises(ConfigurationError):
        preprocess_corpus(make_diamond_snapshot(), "mixed")


def test_custom_word_lists(tmp_path):
    stop = tmp_path / "stop.txt"
    stop.write_text("alpha\n\nbeta\n", encoding="utf-8")
    lemma = tmp_path / "lemma.tsv"
    lemma.write_text("cookies\tbiscuit\n", encoding="utf-8")
    pre = Preprocessor(load_stopwords(stop), load_lemma_table(lemma))
    assert pre.preprocess("alpha cookies beta", "partial").text == "biscuit"


def test_bad_stopword_file(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("good\nBad Word\n", encoding="utf-8")
    with pytest.raises(DataError, match="line 2"):
        load_stopwords(path)


def test_bad_lemma_file(tmp_path):
    path = tmp_path / "lemma.tsv"
    path.write_text("one\ttwo\tthree\n", encoding="utf-8")
    with pytest.raises(DataError, match="2 tab-separated"):
        load_lemma_table(path)
    path.write_text("form\tlemma\nform\tother\n", encoding="utf-8")
    with pytest.raises(DataError, match="conflicting"):
        load_lemma_table(path)


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=200))
def test_idempotence_property(text):
    for mode in (PreprocessMode.PARTIAL, PreprocessMode.FULL):
        once = preprocess(text, mode).text
        assert preprocess(once, mode).text == once


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=200))
def test_full_alphabet_property(text):
    assert set(preprocess(text, "full").text) <= FULL_ALPHABET


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet=string.ascii_letters + string.digits + " .,;()-/:", max_size=200))
def test_token_monotonicity_property(text):
    n_full = len(preprocess(text, "full").text.split())
    n_partial = len(preprocess(text, "partial").text.split())
    assert n_full <= n_partial

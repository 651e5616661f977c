"""Deterministic text utilities behind validators and metrics.

Tokenization, a lookup+suffix lemmatizer, n-gram sets, and a rule-based
gibberish screen.  Everything here is a pure function over immutable rule
tables loaded from the packaged data files, so concurrent use is safe and
results never depend on process state.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .errors import InvalidN

_EDGE_PUNCT = re.compile(r"^[^a-z0-9]+|[^a-z0-9]+$")
_VOWELS = set("aeiouy")


def _load_lines(name: str) -> list[str]:
    text = resources.files("paracrowd.data").joinpath(name).read_text("utf-8")
    return [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]


@lru_cache(maxsize=1)
def lemma_exceptions() -> dict[str, str]:
    """Irregular surface→lemma pairs from the packaged table."""
    table = {}
    for line in _load_lines("lemma_exceptions.txt"):
        surface, _, lemma = line.partition("\t")
        table[surface] = lemma
    return table


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    return frozenset(_load_lines("stopwords.txt"))


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, trim edge punctuation.

    Internal apostrophes and hyphens survive ("don't", "sit-down"); tokens
    that trim to nothing are dropped.
    """
    tokens = []
    for chunk in text.lower().split():
        tok = _EDGE_PUNCT.sub("", chunk)
        if tok:
            tokens.append(tok)
    return tokens


def _strip_suffix_once(token: str) -> str:
    """One pass of the suffix rules; first matching rule wins."""
    exceptions = lemma_exceptions()
    if token in exceptions:
        return exceptions[token]
    if token.endswith("ies") and len(token) >= 5:
        return token[:-3] + "y"
    if token.endswith("sses"):
        return token[:-2]
    if token.endswith("es") and len(token) >= 4:
        stem = token[:-2]
        if stem.endswith(("ch", "sh", "x", "z")):
            return stem
        return token[:-1]  # keep the e: places -> place
    if token.endswith("s") and len(token) >= 4 and not token.endswith(("ss", "us", "is")):
        return token[:-1]
    if token.endswith("ied") and len(token) >= 5:
        return token[:-3] + "y"
    if token.endswith("eed") and len(token) >= 5:
        return token[:-1]
    if token.endswith("ing") and len(token) >= 6:
        stem = token[:-3]
        return _repair_stem(stem, token)
    if token.endswith("ed") and len(token) >= 5:
        stem = token[:-2]
        return _repair_stem(stem, token)
    return token


def _repair_stem(stem: str, original: str) -> str:
    """Undouble trailing consonants (running→run) and reject vowelless stems."""
    if not any(c in _VOWELS for c in stem):
        return original
    if (
        len(stem) >= 3
        and stem[-1] == stem[-2]
        and stem[-1] not in _VOWELS
        and stem[-1] not in ("l", "s")
    ):
        return stem[:-1]
    return stem


@lru_cache(maxsize=65536)
def lemmatize(token: str) -> str:
    """Collapse inflection via exception lookup then suffix rules.

    Iterates to a fixpoint so the function is idempotent on its own outputs;
    over-stemming is acceptable, nondeterminism is not.
    """
    current = token
    for _ in range(10):
        reduced = _strip_suffix_once(current)
        if reduced == current:
            return current
        current = reduced
    return current


@lru_cache(maxsize=65536)
def lemma_sequence(text: str) -> tuple[str, ...]:
    """Lemmatized token sequence used for copy/duplicate equality.

    Cached: duplicate checks compare each draft against the whole curated
    collection, and those texts recur for every incoming draft.
    """
    return tuple(lemmatize(tok) for tok in tokenize(text))


def ngram_set(tokens: list[str], n: int) -> set[tuple[str, ...]]:
    """Set of contiguous n-token windows; empty when the text is too short."""
    if n < 1:
        raise InvalidN(f"n must be >= 1, got {n}")
    return {tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)}


@dataclass(frozen=True)
class GibberishRules:
    """Thresholds for the rule-based gibberish screen."""

    max_token_length: int = 20
    vowelless_min_length: int = 5
    max_symbol_ratio: float = 0.5
    min_tokens: int = 2
    max_char_run: int = 3  # a run of 4+ identical characters fires


@dataclass(frozen=True)
class GibberishVerdict:
    ok: bool
    reasons: tuple[str, ...] = field(default_factory=tuple)


DEFAULT_GIBBERISH_RULES = GibberishRules()


def gibberish_check(text: str, rules: GibberishRules = DEFAULT_GIBBERISH_RULES) -> GibberishVerdict:
    """Screen out junk submissions with five deterministic rules.

    Fires on: overlong tokens, vowelless alphabetic tokens, symbol-heavy
    text, fewer than two tokens, and long runs of one character.
    """
    reasons = []
    tokens = tokenize(text)

    if any(len(tok) > rules.max_token_length for tok in tokens):
        reasons.append("long_token")
    if any(
        tok.isalpha() and len(tok) >= rules.vowelless_min_length and not set(tok) & _VOWELS
        for tok in tokens
    ):
        reasons.append("vowelless_token")

    nonspace = [c for c in text if not c.isspace()]
    if nonspace:
        symbols = sum(1 for c in nonspace if not c.isalpha())
        if symbols / len(nonspace) > rules.max_symbol_ratio:
            reasons.append("symbol_heavy")

    if len(tokens) < rules.min_tokens:
        reasons.append("too_few_tokens")

    run_char, run_len = "", 0
    for c in text:
        if c.isspace():
            run_char, run_len = "", 0
            continue
        if c == run_char:
            run_len += 1
        else:
            run_char, run_len = c, 1
        if run_len > rules.max_char_run:
            reasons.append("char_run")
            break

    return GibberishVerdict(ok=not reasons, reasons=tuple(reasons))

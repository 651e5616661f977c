"""Pattern frequency counting and target/taboo selection.

Counts canonical patterns over the curated collection by exact string
matching, picks the k least- or most-frequent ones, and draws the exemplar
paraphrases and words that prompts are built from.  All sampling is seeded
and iterates sorted structures, so identical inputs give identical outputs
across processes.
"""

from __future__ import annotations

import enum
import logging
import random
from collections import Counter
from dataclasses import dataclass

from .errors import EmptyPool, EmptyTable, InvalidM, NoMembers
from .records import ParaphraseRecord
from .textutils import stopwords, tokenize

log = logging.getLogger(__name__)


class SelectionMode(str, enum.Enum):
    BOTTOM_K = "bottom_k"
    TOP_K = "top_k"


@dataclass(frozen=True)
class PatternEntry:
    count: int
    members: tuple[str, ...]  # paraphrase record ids, input order


@dataclass(frozen=True)
class PatternFrequencyTable:
    """Exact-match counts of canonical patterns over curated paraphrases."""

    entries: dict[str, PatternEntry]
    excluded: tuple[str, ...] = ()  # record ids that carried no tree/pattern

    def total(self) -> int:
        return sum(entry.count for entry in self.entries.values())

    def rows(self) -> list[tuple[str, int]]:
        """(pattern, count) sorted by count descending, then pattern."""
        return sorted(
            ((p, e.count) for p, e in self.entries.items()),
            key=lambda row: (-row[1], row[0]),
        )


@dataclass(frozen=True)
class Exemplar:
    record_id: str
    text: str
    pattern: str

    def to_dict(self) -> dict:
        return {"record_id": self.record_id, "text": self.text, "pattern": self.pattern}


@dataclass(frozen=True)
class SelectionResult:
    """Everything a prompt needs from pattern selection."""

    mode: SelectionMode
    k: int
    patterns: tuple[str, ...]
    exemplars: tuple[Exemplar, ...] = ()
    words: tuple[str, ...] = ()
    taboo_words: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "k": self.k,
            "patterns": list(self.patterns),
            "exemplars": [e.to_dict() for e in self.exemplars],
            "words": list(self.words),
            "taboo_words": list(self.taboo_words),
        }


def count_patterns(curated: list[ParaphraseRecord]) -> PatternFrequencyTable:
    """Tally canonical patterns; records without trees are set aside."""
    counts: Counter[str] = Counter()
    members: dict[str, list[str]] = {}
    excluded = []
    for record in curated:
        if record.pattern is None:
            excluded.append(record.id)
            continue
        counts[record.pattern] += 1
        members.setdefault(record.pattern, []).append(record.id)
    if excluded:
        log.warning("count_patterns: %d record(s) without trees excluded", len(excluded))
    entries = {
        pattern: PatternEntry(count=counts[pattern], members=tuple(members[pattern]))
        for pattern in sorted(counts)
    }
    return PatternFrequencyTable(entries=entries, excluded=tuple(excluded))


def select_patterns(
    table: PatternFrequencyTable, k: int, mode: SelectionMode
) -> SelectionResult:
    """The k least-frequent (targets) or most-frequent (taboo) patterns.

    Ties break lexicographically on the canonical string; fewer than k come
    back when the table has fewer distinct patterns.
    """
    if k < 1:
        raise InvalidM(f"k must be >= 1, got {k}")
    if not table.entries:
        raise EmptyTable("no patterns counted")
    if mode is SelectionMode.BOTTOM_K:
        ranked = sorted(table.entries, key=lambda p: (table.entries[p].count, p))
    else:
        ranked = sorted(table.entries, key=lambda p: (-table.entries[p].count, p))
    return SelectionResult(mode=mode, k=k, patterns=tuple(ranked[:k]))


def sample_exemplars(
    curated: list[ParaphraseRecord],
    patterns: tuple[str, ...] | list[str],
    m: int,
    rng_seed: int,
) -> tuple[Exemplar, ...]:
    """Up to m exemplar paraphrases, round-robin across the given patterns.

    Each pass takes one member per pattern; the order within a pattern's
    member list is a seeded shuffle.  No record is drawn twice.
    """
    if m < 1:
        raise InvalidM(f"m must be >= 1, got {m}")
    by_pattern: dict[str, list[ParaphraseRecord]] = {p: [] for p in patterns}
    for record in curated:
        if record.pattern in by_pattern:
            by_pattern[record.pattern].append(record)
    for pattern in patterns:
        if not by_pattern[pattern]:
            raise NoMembers(f"pattern {pattern} has no member paraphrases")

    rng = random.Random(rng_seed)
    queues = []
    for pattern in patterns:
        members = list(by_pattern[pattern])
        rng.shuffle(members)
        queues.append(members)

    out: list[Exemplar] = []
    depth = 0
    while len(out) < m and any(depth < len(q) for q in queues):
        for queue in queues:
            if depth < len(queue) and len(out) < m:
                record = queue[depth]
                out.append(Exemplar(record.id, record.text, record.pattern))
        depth += 1
    return tuple(out)


def sample_words(
    curated: list[ParaphraseRecord],
    patterns: tuple[str, ...] | list[str],
    m: int,
    seed_text: str,
    rng_seed: int,
    stopword_set: frozenset[str] | set[str] | None = None,
) -> tuple[str, ...]:
    """Up to m distinct words drawn from the given patterns' paraphrases.

    The pool drops stopwords and every token of the current seed: words the
    seed already uses cannot add diversity.
    """
    if m < 1:
        raise InvalidM(f"m must be >= 1, got {m}")
    stops = stopwords() if stopword_set is None else stopword_set
    seed_tokens = set(tokenize(seed_text))
    wanted = set(patterns)
    pool = {
        token
        for record in curated
        if record.pattern in wanted
        for token in tokenize(record.text)
        if token not in stops and token not in seed_tokens
    }
    if not pool:
        raise EmptyPool("no candidate words after exclusions")
    ordered = sorted(pool)
    rng = random.Random(rng_seed)
    return tuple(rng.sample(ordered, min(m, len(ordered))))


def top_frequency_words(
    curated: list[ParaphraseRecord],
    count: int,
    stopword_set: frozenset[str] | set[str] | None = None,
) -> tuple[str, ...]:
    """Most frequent content words of the collection, for taboo-word prompts.

    Ties break alphabetically so the taboo list is stable across runs.
    """
    if count < 1:
        raise InvalidM(f"count must be >= 1, got {count}")
    stops = stopwords() if stopword_set is None else stopword_set
    freq: Counter[str] = Counter()
    for record in curated:
        for token in tokenize(record.text):
            if token not in stops:
                freq[token] += 1
    ranked = sorted(freq, key=lambda w: (-freq[w], w))
    return tuple(ranked[:count])


def overlap_warning(targets: SelectionResult, taboo: SelectionResult) -> tuple[str, ...]:
    """Patterns present on both the target and taboo side (tiny collections)."""
    overlap = tuple(sorted(set(targets.patterns) & set(taboo.patterns)))
    if overlap:
        log.warning("target and taboo pattern sets overlap: %s", ", ".join(overlap))
    return overlap

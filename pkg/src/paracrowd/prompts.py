"""Worker prompt construction and draft validation.

Materializes each task-design condition into a fully specified prompt
(instructions, exemplar paraphrases, recommended or forbidden words,
fill-in-the-blank templates, syntactic constraints) and checks drafts
against the automatic validators plus the condition's own constraints.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import MissingSelectionData
from .records import Condition, RoundConfig, Utterance
from .selection import SelectionMode, SelectionResult
from .rng import derive_rng, derive_seed
from .textutils import gibberish_check, lemma_sequence, lemmatize, tokenize
from .trees import ParseTree, pattern_of

# Which side of the frequency ranking feeds each condition's selection.
SELECTION_MODE_FOR: dict[Condition, SelectionMode | None] = {
    Condition.BASELINE: None,
    Condition.WORD_RECOMMEND: None,  # words drawn from the whole collection
    Condition.TABOO_WORDS: None,
    Condition.PATTERNS_BY_EXAMPLE: SelectionMode.BOTTOM_K,
    Condition.PATTERNS_BY_EXAMPLE_CONSTRAINED: SelectionMode.BOTTOM_K,
    Condition.TABOO_PATTERNS: SelectionMode.TOP_K,
    Condition.PATTERNS_BY_WORDS: SelectionMode.BOTTOM_K,
    Condition.PATTERNS_FILL_BLANKS: SelectionMode.BOTTOM_K,
}

EXAMPLE_CONDITIONS = (
    Condition.PATTERNS_BY_EXAMPLE,
    Condition.PATTERNS_BY_EXAMPLE_CONSTRAINED,
    Condition.TABOO_PATTERNS,
)
WORD_CONDITIONS = (
    Condition.WORD_RECOMMEND,
    Condition.PATTERNS_BY_WORDS,
    Condition.PATTERNS_FILL_BLANKS,
)

BASE_INSTRUCTIONS = (
    "Rewrite the sentence below in your own words so it keeps exactly the "
    "same meaning. Write natural, fluent English and provide {n} different "
    "rewordings."
)

CONDITION_CLAUSES: dict[Condition, str] = {
    Condition.BASELINE: "",
    Condition.WORD_RECOMMEND: (
        "You may find the suggested words helpful; using them is optional."
    ),
    Condition.TABOO_WORDS: (
        "Do not use any of the forbidden words listed below, in any form."
    ),
    Condition.PATTERNS_BY_EXAMPLE: (
        "Use the example rewordings below as inspiration; new sentence "
        "shapes are welcome."
    ),
    Condition.PATTERNS_BY_EXAMPLE_CONSTRAINED: (
        "Shape each rewording like one of the examples below: same kind of "
        "sentence structure, your own words."
    ),
    Condition.TABOO_PATTERNS: (
        "Write rewordings whose structure differs from every example below."
    ),
    Condition.PATTERNS_BY_WORDS: (
        "Use all of the listed words somewhere in each rewording."
    ),
    Condition.PATTERNS_FILL_BLANKS: (
        "Fill in the blanks around the fixed words; keep the fixed words in "
        "their given positions."
    ),
}


@dataclass(frozen=True)
class BlankTemplate:
    """Ordered slots: a string pins that word to the slot, None is free."""

    slots: tuple[str | None, ...]

    @property
    def fixed_words(self) -> tuple[str, ...]:
        return tuple(s for s in self.slots if s is not None)

    def to_list(self) -> list[str | None]:
        return list(self.slots)


def build_blank_template(
    words: tuple[str, ...], rng_seed: int, total_slots: int | None = None
) -> BlankTemplate:
    """Scatter the words over fixed slot positions, seeded.

    The template has ``total_slots`` slots (default 2*len(words)+1).  Fixed
    positions are a seeded sorted draw with at least one free slot between
    consecutive fixed ones: positions are ``sorted(sample(range(L-m+1), m))``
    with i added to the i-th draw.
    """
    m = len(words)
    length = total_slots if total_slots is not None else 2 * m + 1
    length = max(length, 2 * m - 1)
    rng = derive_rng(rng_seed, "blanks", *words)
    picks = sorted(rng.sample(range(length - m + 1), m))
    positions = [q + i for i, q in enumerate(picks)]
    slots: list[str | None] = [None] * length
    for word, pos in zip(words, positions):
        slots[pos] = word
    return BlankTemplate(slots=tuple(slots))


@dataclass(frozen=True)
class PromptSpec:
    """A fully materialized worker task for one condition and seed."""

    condition: Condition
    seed: Utterance
    n_required: int
    instructions: str
    examples: tuple[str, ...] = ()
    words: tuple[str, ...] = ()
    blanks: BlankTemplate | None = None
    taboo: tuple[str, ...] = ()
    target_patterns: tuple[str, ...] = ()

    def __post_init__(self):
        c = self.condition
        if c is Condition.BASELINE:
            if self.examples or self.words or self.taboo or self.blanks:
                raise MissingSelectionData("baseline prompt must be bare")
        if c in EXAMPLE_CONDITIONS and not self.examples:
            raise MissingSelectionData(f"{c.value} needs example paraphrases")
        if c is Condition.TABOO_PATTERNS and not self.taboo:
            raise MissingSelectionData("taboo_patterns needs taboo patterns")
        if c in WORD_CONDITIONS and not self.words:
            raise MissingSelectionData(f"{c.value} needs recommended words")
        if c is Condition.PATTERNS_FILL_BLANKS:
            if self.blanks is None or self.blanks.fixed_words != self.words:
                raise MissingSelectionData("fill-blanks template must pin the words")
        if c is Condition.PATTERNS_BY_EXAMPLE_CONSTRAINED and not self.target_patterns:
            raise MissingSelectionData("constrained prompt needs target patterns")

    def to_dict(self) -> dict:
        return {
            "condition": self.condition.value,
            "seed": self.seed.to_dict(),
            "n_required": self.n_required,
            "instructions": self.instructions,
            "examples": list(self.examples),
            "words": list(self.words),
            "blanks": self.blanks.to_list() if self.blanks else None,
            "taboo": list(self.taboo),
            "target_patterns": list(self.target_patterns),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PromptSpec":
        blanks = data.get("blanks")
        return cls(
            condition=Condition(data["condition"]),
            seed=Utterance.from_dict(data["seed"]),
            n_required=int(data["n_required"]),
            instructions=data["instructions"],
            examples=tuple(data.get("examples", ())),
            words=tuple(data.get("words", ())),
            blanks=BlankTemplate(tuple(blanks)) if blanks is not None else None,
            taboo=tuple(data.get("taboo", ())),
            target_patterns=tuple(data.get("target_patterns", ())),
        )


def render_instructions(condition: Condition, config: RoundConfig) -> str:
    base = BASE_INSTRUCTIONS.format(n=config.n_required)
    clause = CONDITION_CLAUSES[condition]
    return f"{base} {clause}".strip()


def build_prompt(
    condition: Condition,
    seed: Utterance,
    selection: SelectionResult,
    config: RoundConfig,
    rng_seed: int,
) -> PromptSpec:
    """Assemble the PromptSpec for one seed under one condition."""
    instructions = render_instructions(condition, config)
    common = dict(seed=seed, n_required=config.n_required, instructions=instructions)

    if condition is Condition.BASELINE:
        return PromptSpec(condition=condition, **common)

    if condition is Condition.WORD_RECOMMEND:
        _require(selection.words, "word recommendations")
        return PromptSpec(condition=condition, words=selection.words, **common)

    if condition is Condition.TABOO_WORDS:
        _require(selection.taboo_words, "taboo words")
        return PromptSpec(condition=condition, taboo=selection.taboo_words, **common)

    if condition is Condition.PATTERNS_BY_EXAMPLE:
        texts = _exemplar_texts(selection)
        return PromptSpec(condition=condition, examples=texts, **common)

    if condition is Condition.PATTERNS_BY_EXAMPLE_CONSTRAINED:
        texts = _exemplar_texts(selection)
        return PromptSpec(
            condition=condition,
            examples=texts,
            target_patterns=selection.patterns,
            **common,
        )

    if condition is Condition.TABOO_PATTERNS:
        texts = _exemplar_texts(selection)
        return PromptSpec(
            condition=condition, examples=texts, taboo=selection.patterns, **common
        )

    if condition is Condition.PATTERNS_BY_WORDS:
        _require(selection.words, "recommended words")
        return PromptSpec(condition=condition, words=selection.words, **common)

    if condition is Condition.PATTERNS_FILL_BLANKS:
        _require(selection.words, "recommended words")
        template = build_blank_template(
            selection.words, derive_seed(rng_seed, seed.id), config.blank_slot_count
        )
        return PromptSpec(
            condition=condition, words=selection.words, blanks=template, **common
        )

    raise MissingSelectionData(f"unknown condition {condition!r}")


def _require(value, what: str):
    if not value:
        raise MissingSelectionData(f"selection provides no {what}")


def _exemplar_texts(selection: SelectionResult) -> tuple[str, ...]:
    if not selection.exemplars:
        raise MissingSelectionData("selection provides no exemplar paraphrases")
    return tuple(e.text for e in selection.exemplars)


class Check(str, enum.Enum):
    COPY_OF_EXAMPLE = "copy_of_example"
    DUPLICATE = "duplicate"
    GIBBERISH = "gibberish"
    TABOO_WORD_PRESENT = "taboo_word_present"
    REQUIRED_WORD_MISSING = "required_word_missing"
    BLANK_MISMATCH = "blank_mismatch"
    PATTERN_NOT_IN_TARGETS = "pattern_not_in_targets"
    PATTERN_IN_TABOO = "pattern_in_taboo"
    PATTERN_UNKNOWN = "pattern_unknown"


# The one non-fatal flag: the draft is parked for syntactic review instead
# of being rejected.
NON_FATAL_CHECKS = frozenset({Check.PATTERN_UNKNOWN})


@dataclass(frozen=True)
class CheckFailure:
    check: Check
    detail: str

    def to_dict(self) -> dict:
        return {"check": self.check.value, "detail": self.detail}


@dataclass(frozen=True)
class ValidationVerdict:
    accepted: bool
    failures: tuple[CheckFailure, ...] = ()

    @property
    def fatal_failures(self) -> tuple[CheckFailure, ...]:
        return tuple(f for f in self.failures if f.check not in NON_FATAL_CHECKS)

    @property
    def needs_syntax_review(self) -> bool:
        return any(f.check is Check.PATTERN_UNKNOWN for f in self.failures)

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "failures": [f.to_dict() for f in self.failures],
        }


def matches_blank_template(tokens: list[str], template: BlankTemplate) -> bool:
    """Greedy left-to-right fit of tokens against the slot template.

    A fixed slot must be matched by that exact token, in order; every free
    slot absorbs at least one token.
    """
    min_next = 0
    for slot in template.slots:
        if slot is None:
            min_next += 1
            continue
        idx = next((i for i in range(min_next, len(tokens)) if tokens[i] == slot), None)
        if idx is None:
            return False
        min_next = idx + 1
    return min_next <= len(tokens)


def check_submission(
    draft: str,
    prompt: PromptSpec,
    existing: list[str],
    draft_tree: ParseTree | None = None,
    config: RoundConfig | None = None,
) -> ValidationVerdict:
    """Run every automatic validator against one draft.

    ``existing`` holds the current curated texts plus any sibling drafts
    already taken in the same task.  Copy and duplicate equality compare
    lemma sequences, order-sensitive, so reorderings survive.  A missing
    tree under a pattern-constrained condition yields the non-fatal
    ``pattern_unknown`` flag.
    """
    failures: list[CheckFailure] = []

    gib = gibberish_check(draft)
    if not gib.ok:
        failures.append(CheckFailure(Check.GIBBERISH, ",".join(gib.reasons)))

    draft_lemmas = lemma_sequence(draft)

    shown = list(prompt.examples) + [prompt.seed.text]
    if any(draft_lemmas == lemma_sequence(text) for text in shown):
        failures.append(CheckFailure(Check.COPY_OF_EXAMPLE, "matches a shown example or the seed"))

    if any(draft_lemmas == lemma_sequence(text) for text in existing):
        failures.append(CheckFailure(Check.DUPLICATE, "matches an existing paraphrase"))

    lemma_set = set(draft_lemmas)

    if prompt.condition is Condition.TABOO_WORDS:
        hits = [w for w in prompt.taboo if lemmatize(w.lower()) in lemma_set]
        if hits:
            failures.append(CheckFailure(Check.TABOO_WORD_PRESENT, ",".join(hits)))

    elif prompt.condition is Condition.PATTERNS_BY_WORDS:
        missing = [w for w in prompt.words if lemmatize(w.lower()) not in lemma_set]
        if missing:
            failures.append(CheckFailure(Check.REQUIRED_WORD_MISSING, ",".join(missing)))

    elif prompt.condition is Condition.PATTERNS_FILL_BLANKS:
        assert prompt.blanks is not None
        if not matches_blank_template(tokenize(draft), prompt.blanks):
            failures.append(CheckFailure(Check.BLANK_MISMATCH, "draft does not fit the slot template"))

    elif prompt.condition is Condition.PATTERNS_BY_EXAMPLE_CONSTRAINED:
        if draft_tree is None:
            failures.append(CheckFailure(Check.PATTERN_UNKNOWN, "no parse tree attached yet"))
        elif pattern_of(draft_tree) not in prompt.target_patterns:
            failures.append(
                CheckFailure(Check.PATTERN_NOT_IN_TARGETS, pattern_of(draft_tree))
            )

    elif prompt.condition is Condition.TABOO_PATTERNS:
        if draft_tree is None:
            failures.append(CheckFailure(Check.PATTERN_UNKNOWN, "no parse tree attached yet"))
        elif pattern_of(draft_tree) in prompt.taboo:
            failures.append(CheckFailure(Check.PATTERN_IN_TABOO, pattern_of(draft_tree)))

    fatal = [f for f in failures if f.check not in NON_FATAL_CHECKS]
    return ValidationVerdict(accepted=not fatal, failures=tuple(failures))

"""Simulated worker and judge pools for desk-scale runs.

A worker profile owns a bank of pre-authored (text, tree) paraphrases keyed
by intent, plus behavior knobs: how often it honors the prompt's
constraints, duplicates itself, or types junk.  Judges vote correct with a
fixed accuracy.  Everything is driven by derived RNGs, so a whole simulated
round replays byte-identically.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .errors import BankExhausted
from .prompts import PromptSpec, matches_blank_template
from .records import Condition, Judgment, Utterance
from .rng import derive_rng
from .textutils import lemmatize, stopwords, tokenize
from .trees import ParseTree, parse_bracketed, pattern_of

GIBBERISH_DRAFT = "zxqvk wrtpl mnbgf"


@dataclass(frozen=True)
class BankEntry:
    text: str
    tree: ParseTree
    pattern: str

    @classmethod
    def from_bracket(cls, text: str, bracket: str) -> "BankEntry":
        tree = parse_bracketed(bracket)
        return cls(text=text, tree=tree, pattern=pattern_of(tree))


@dataclass(frozen=True)
class WorkerProfile:
    """One simulated crowd worker.

    ``pattern_weights`` skews unconstrained draws across the bank's
    patterns (missing patterns draw with weight 0); None means uniform over
    entries.
    """

    worker_id: str
    bank: dict[str, list[BankEntry]]  # intent -> entries
    compliance: float = 1.0
    duplicate_prob: float = 0.0
    gibberish_prob: float = 0.0
    pattern_weights: dict[str, float] | None = None


def _entry_allowed(entry: BankEntry, prompt: PromptSpec) -> bool:
    """Does this bank entry satisfy the prompt's hard constraints?"""
    c = prompt.condition
    if c is Condition.PATTERNS_BY_EXAMPLE_CONSTRAINED:
        return entry.pattern in prompt.target_patterns
    if c is Condition.TABOO_PATTERNS:
        return entry.pattern not in prompt.taboo
    if c is Condition.TABOO_WORDS:
        lemmas = {lemmatize(t) for t in tokenize(entry.text)}
        return not any(lemmatize(w.lower()) in lemmas for w in prompt.taboo)
    if c is Condition.PATTERNS_BY_WORDS:
        lemmas = {lemmatize(t) for t in tokenize(entry.text)}
        return all(lemmatize(w.lower()) in lemmas for w in prompt.words)
    if c is Condition.PATTERNS_FILL_BLANKS:
        assert prompt.blanks is not None
        return matches_blank_template(tokenize(entry.text), prompt.blanks)
    return True


def _weighted_draw(
    entries: list[BankEntry], weights: dict[str, float] | None, rng: random.Random
) -> BankEntry:
    if not weights:
        return entries[rng.randrange(len(entries))]
    by_pattern: dict[str, list[BankEntry]] = {}
    for entry in entries:
        by_pattern.setdefault(entry.pattern, []).append(entry)
    patterns = sorted(p for p in by_pattern if weights.get(p, 0.0) > 0.0)
    if not patterns:  # nothing weighted is eligible; fall back to uniform
        return entries[rng.randrange(len(entries))]
    total = sum(weights[p] for p in patterns)
    roll = rng.random() * total
    acc = 0.0
    chosen = patterns[-1]
    for pattern in patterns:
        acc += weights[pattern]
        if roll < acc:
            chosen = pattern
            break
    group = by_pattern[chosen]
    return group[rng.randrange(len(group))]


def _weave_words(entry: BankEntry, prompt: PromptSpec) -> str:
    """Append the required words to a carrier sentence from the bank."""
    words = [w.lower() for w in prompt.words]
    return " ".join(tokenize(entry.text) + ["using"] + words)


def _fill_template(entry: BankEntry, prompt: PromptSpec) -> str:
    """Fill the template's free slots with the carrier's content tokens."""
    assert prompt.blanks is not None
    fillers = [t for t in tokenize(entry.text)] or ["nice"]
    out, i = [], 0
    for slot in prompt.blanks.slots:
        if slot is not None:
            out.append(slot)
        else:
            out.append(fillers[i % len(fillers)])
            i += 1
    return " ".join(out)


def simulated_worker(
    profile: WorkerProfile, prompt: PromptSpec, rng_seed: int
) -> list[tuple[str, ParseTree | None]]:
    """Produce the task's n_required drafts for one worker.

    Compliant draws honor the prompt's constraints: pattern conditions pick
    bank entries on the right side of the target/taboo sets; word
    conditions fall back to composing a draft around a carrier entry when
    no entry contains the required words (composed drafts carry no tree).
    A non-compliant draw ignores constraints and lets the validators
    reject it.  BankExhausted means the bank genuinely cannot supply
    enough distinct drafts.
    """
    entries = profile.bank.get(prompt.seed.intent, [])
    if not entries:
        raise BankExhausted(f"no bank entries for intent {prompt.seed.intent!r}")
    rng = random.Random(rng_seed)
    drafts: list[tuple[str, ParseTree | None]] = []
    used: set[str] = set()

    for _ in range(prompt.n_required):
        if rng.random() < profile.gibberish_prob:
            drafts.append((GIBBERISH_DRAFT, None))
            continue
        if rng.random() < profile.duplicate_prob:
            if prompt.examples:
                drafts.append((prompt.examples[0], None))
                continue
            if drafts:
                drafts.append(drafts[0])
                continue

        fresh = [e for e in entries if e.text not in used]
        if not fresh:
            raise BankExhausted(
                f"bank for intent {prompt.seed.intent!r} ran out of distinct entries"
            )
        comply = rng.random() < profile.compliance
        pool = [e for e in fresh if _entry_allowed(e, prompt)] if comply else fresh
        if pool:
            entry = _weighted_draw(pool, profile.pattern_weights, rng)
            drafts.append((entry.text, entry.tree))
        else:
            entry = _weighted_draw(fresh, profile.pattern_weights, rng)
            if prompt.condition is Condition.PATTERNS_BY_WORDS:
                drafts.append((_weave_words(entry, prompt), None))
            elif prompt.condition is Condition.PATTERNS_FILL_BLANKS:
                drafts.append((_fill_template(entry, prompt), None))
            else:
                drafts.append((entry.text, entry.tree))
        used.add(entry.text)

    return drafts


@dataclass(frozen=True)
class JudgeProfile:
    judge_id: str
    accuracy: float = 1.0  # probability of voting "correct"


def judge_votes(
    judges: list[JudgeProfile], record_id: str, count: int, base_seed: int
) -> tuple[Judgment, ...]:
    """Votes from the first ``count`` judges, derived per (judge, record)."""
    votes = []
    for judge in judges[:count]:
        rng = derive_rng(base_seed, "judge", judge.judge_id, record_id)
        votes.append(Judgment(judge_id=judge.judge_id, correct=rng.random() < judge.accuracy))
    return tuple(votes)


def make_worker_pool(
    count: int,
    bank: dict[str, list[BankEntry]],
    compliance: float = 1.0,
    duplicate_prob: float = 0.0,
    gibberish_prob: float = 0.0,
    pattern_weights: dict[str, float] | None = None,
) -> list[WorkerProfile]:
    return [
        WorkerProfile(
            worker_id=f"w{i:02d}",
            bank=bank,
            compliance=compliance,
            duplicate_prob=duplicate_prob,
            gibberish_prob=gibberish_prob,
            pattern_weights=pattern_weights,
        )
        for i in range(1, count + 1)
    ]


def make_judge_pool(count: int, accuracy: float = 1.0) -> list[JudgeProfile]:
    return [JudgeProfile(judge_id=f"j{i:02d}", accuracy=accuracy) for i in range(1, count + 1)]


# --- deterministic bank synthesis for CLI simulations -----------------------

_VERBS_IMP = ("find", "locate", "show", "list", "fetch", "suggest", "display", "pull")
_VERBS_WANT = ("want", "need", "prefer", "expect")
_PRONOUNS = ("i", "we", "you")
_MODALS = ("can", "could", "should", "may")
_ADVERBS = ("nearby", "today", "tonight", "soon", "quickly")
_SUPERLATIVES = ("best", "closest", "cheapest", "nicest")


def _family_imperative(v: str, obj: str) -> tuple[str, str]:
    return (
        f"{v} {obj} for me",
        f"(S (VP (VB {v}) (NP (NNS {obj})) (PP (IN for) (NP (PRP me)))) (. .))",
    )


def _family_where(md: str, pr: str, v: str, obj: str) -> tuple[str, str]:
    return (
        f"where {md} {pr} {v} {obj}",
        f"(SBARQ (WHADVP (WRB where)) (SQ (MD {md}) (NP (PRP {pr})) "
        f"(VP (VB {v}) (NP (NNS {obj})))) (. ?))",
    )


def _family_declarative(pr: str, v: str, obj: str, adv: str) -> tuple[str, str]:
    return (
        f"{pr} {v} {obj} {adv}",
        f"(S (NP (PRP {pr})) (VP (VBP {v}) (NP (NNS {obj})) (ADVP (RB {adv}))) (. .))",
    )


def _family_polite(md: str, v: str, obj: str) -> tuple[str, str]:
    return (
        f"{md} you {v} {obj}",
        f"(SQ (MD {md}) (NP (PRP you)) (VP (VB {v}) (NP (NNS {obj}))) (. ?))",
    )


def _family_fragment(obj: str, adv: str) -> tuple[str, str]:
    return (
        f"{obj} {adv} thanks",
        f"(FRAG (NP (NNS {obj})) (ADVP (RB {adv})) (INTJ (UH thanks)) (. .))",
    )


def _family_what(sup: str, obj: str) -> tuple[str, str]:
    return (
        f"what is the {sup} {obj}",
        f"(SBARQ (WHNP (WP what)) (SQ (VBZ is) (NP (DT the) (JJS {sup}) (NNS {obj}))) (. ?))",
    )


def synthesize_bank(
    seeds: list[Utterance], entries_per_intent: int = 80, rng_seed: int = 0
) -> dict[str, list[BankEntry]]:
    """Generate a paraphrase bank covering every intent among the seeds.

    Texts combine a handful of sentence families with the intent's own
    content vocabulary; generation order is fixed, then shuffled with a
    derived RNG, so the same inputs always give the same bank.
    """
    by_intent: dict[str, list[str]] = {}
    for seed in sorted(seeds, key=lambda s: s.id):
        by_intent.setdefault(seed.intent, [])
        for token in tokenize(seed.text):
            if token not in stopwords() and token not in by_intent[seed.intent]:
                by_intent[seed.intent].append(token)

    bank: dict[str, list[BankEntry]] = {}
    for intent in sorted(by_intent):
        vocab = by_intent[intent] or ["things"]
        candidates: list[tuple[str, str]] = []
        for obj in vocab:
            for v in _VERBS_IMP:
                candidates.append(_family_imperative(v, obj))
            for md, pr, v in itertools.product(_MODALS[:2], _PRONOUNS[:2], _VERBS_IMP[:3]):
                candidates.append(_family_where(md, pr, v, obj))
            for pr, v, adv in itertools.product(_PRONOUNS[:2], _VERBS_WANT, _ADVERBS[:3]):
                candidates.append(_family_declarative(pr, v, obj, adv))
            for md, v in itertools.product(_MODALS, _VERBS_IMP[:4]):
                candidates.append(_family_polite(md, v, obj))
            for adv in _ADVERBS:
                candidates.append(_family_fragment(obj, adv))
            for sup in _SUPERLATIVES:
                candidates.append(_family_what(sup, obj))

        seen: set[str] = set()
        entries = []
        for text, bracket in candidates:
            if text in seen:
                continue
            seen.add(text)
            entries.append(BankEntry.from_bracket(text, bracket))
        rng = derive_rng(rng_seed, "bank", intent)
        rng.shuffle(entries)
        bank[intent] = entries[:entries_per_intent]
    return bank

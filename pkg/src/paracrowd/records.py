"""Domain records: utterances, paraphrase records, round configuration/state.

All types serialize to plain JSON dicts whose keys are the wire names used
by the store, the HTTP service, and the UI.  Parse trees travel as bracket
strings under the ``tree`` key.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .errors import MalformedNode
from .trees import ParseTree, parse_bracketed, pattern_of


class Condition(str, enum.Enum):
    """The six task designs plus the two variants, as wire strings."""

    BASELINE = "baseline"
    WORD_RECOMMEND = "word_recommend"
    TABOO_WORDS = "taboo_words"
    PATTERNS_BY_EXAMPLE = "patterns_by_example"
    PATTERNS_BY_EXAMPLE_CONSTRAINED = "patterns_by_example_constrained"
    TABOO_PATTERNS = "taboo_patterns"
    PATTERNS_BY_WORDS = "patterns_by_words"
    PATTERNS_FILL_BLANKS = "patterns_fill_blanks"


class Status(str, enum.Enum):
    UNVERIFIED = "unverified"
    PENDING_SYNTAX = "pending_syntax"
    ACCEPTED = "accepted"
    REJECTED = "rejected"


class SeedStrategy(str, enum.Enum):
    ALL = "all"
    RANDOM_SAMPLE = "random_sample"
    OUTLIER = "outlier"


@dataclass(frozen=True)
class Utterance:
    """A seed sentence expressing an intent, optionally with its parse."""

    id: str
    intent: str
    text: str
    tree: ParseTree | None = None

    def __post_init__(self):
        if not self.text:
            raise ValueError("utterance text must be nonempty")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "intent": self.intent,
            "text": self.text,
            "tree": self.tree.serialize() if self.tree else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Utterance":
        tree = parse_bracketed(data["tree"]) if data.get("tree") else None
        return cls(id=data["id"], intent=data["intent"], text=data["text"], tree=tree)


@dataclass(frozen=True)
class Judgment:
    judge_id: str
    correct: bool

    def to_dict(self) -> dict:
        return {"judge_id": self.judge_id, "correct": self.correct}

    @classmethod
    def from_dict(cls, data: dict) -> "Judgment":
        return cls(judge_id=data["judge_id"], correct=bool(data["correct"]))


@dataclass(frozen=True)
class ParaphraseRecord:
    """One worker paraphrase and everything the pipeline knows about it.

    ``pattern`` is always the canonical pattern of ``tree``; the two are
    present or absent together.  Round 0 marks records ingested as the
    experiment's initial curated collection.
    """

    id: str
    seed_id: str
    text: str
    worker_id: str
    round: int
    condition: Condition
    status: Status = Status.UNVERIFIED
    tree: ParseTree | None = None
    pattern: str | None = None
    judgments: tuple[Judgment, ...] = ()

    def __post_init__(self):
        if self.round < 0:
            raise ValueError("round must be >= 0")
        if (self.tree is None) != (self.pattern is None):
            raise MalformedNode("pattern and tree must be present together")
        if self.tree is not None and self.pattern != pattern_of(self.tree):
            raise MalformedNode("pattern does not match tree")

    @classmethod
    def create(
        cls,
        id: str,
        seed_id: str,
        text: str,
        worker_id: str,
        round: int,
        condition: Condition,
        status: Status = Status.UNVERIFIED,
        tree: ParseTree | None = None,
        judgments: tuple[Judgment, ...] = (),
    ) -> "ParaphraseRecord":
        """Build a record, deriving the pattern from the tree."""
        return cls(
            id=id,
            seed_id=seed_id,
            text=text,
            worker_id=worker_id,
            round=round,
            condition=condition,
            status=status,
            tree=tree,
            pattern=pattern_of(tree) if tree is not None else None,
            judgments=judgments,
        )

    def with_tree(self, tree: ParseTree) -> "ParaphraseRecord":
        return replace(self, tree=tree, pattern=pattern_of(tree))

    def with_status(self, status: Status) -> "ParaphraseRecord":
        return replace(self, status=status)

    def with_judgment(self, judgment: Judgment) -> "ParaphraseRecord":
        return replace(self, judgments=self.judgments + (judgment,))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "seed_id": self.seed_id,
            "text": self.text,
            "worker_id": self.worker_id,
            "round": self.round,
            "condition": self.condition.value,
            "status": self.status.value,
            "tree": self.tree.serialize() if self.tree else None,
            "pattern": self.pattern,
            "judgments": [j.to_dict() for j in self.judgments],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ParaphraseRecord":
        tree = parse_bracketed(data["tree"]) if data.get("tree") else None
        return cls(
            id=data["id"],
            seed_id=data["seed_id"],
            text=data["text"],
            worker_id=data.get("worker_id", ""),
            round=int(data["round"]),
            condition=Condition(data["condition"]),
            status=Status(data.get("status", "unverified")),
            tree=tree,
            pattern=data.get("pattern") if tree is not None else None,
            judgments=tuple(Judgment.from_dict(j) for j in data.get("judgments", [])),
        )


@dataclass(frozen=True)
class RoundConfig:
    """Procedure constants for one round of collection."""

    condition: Condition = Condition.BASELINE
    workers_per_seed: int = 10
    n_required: int = 3
    k: int = 2
    judges_per_paraphrase: int = 3
    accept_threshold: int = 2
    seed_strategy: SeedStrategy = SeedStrategy.RANDOM_SAMPLE
    seed_sample_size: int = 5
    carry_over_seeds: bool = False  # False = fully replace seeds each round
    rng_seed: int = 0
    example_count: int = 3
    word_count: int = 3
    taboo_word_count: int = 5
    blank_slot_count: int | None = None
    max_ngram: int = 4
    task_expiry_minutes: int = 30

    def __post_init__(self):
        if self.workers_per_seed < 1:
            raise ValueError("workers_per_seed must be >= 1")
        if self.accept_threshold > self.judges_per_paraphrase:
            raise ValueError("accept_threshold cannot exceed judges_per_paraphrase")

    def to_dict(self) -> dict:
        return {
            "condition": self.condition.value,
            "workers_per_seed": self.workers_per_seed,
            "n_required": self.n_required,
            "k": self.k,
            "judges_per_paraphrase": self.judges_per_paraphrase,
            "accept_threshold": self.accept_threshold,
            "seed_strategy": self.seed_strategy.value,
            "seed_sample_size": self.seed_sample_size,
            "carry_over_seeds": self.carry_over_seeds,
            "rng_seed": self.rng_seed,
            "example_count": self.example_count,
            "word_count": self.word_count,
            "taboo_word_count": self.taboo_word_count,
            "blank_slot_count": self.blank_slot_count,
            "max_ngram": self.max_ngram,
            "task_expiry_minutes": self.task_expiry_minutes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RoundConfig":
        kwargs = dict(data)
        kwargs["condition"] = Condition(kwargs["condition"])
        kwargs["seed_strategy"] = SeedStrategy(kwargs["seed_strategy"])
        return cls(**kwargs)


@dataclass
class RoundState:
    """The pipeline's persistent unit: one round's inputs and pools.

    ``seed_history`` accumulates every utterance that has ever served as a
    seed, so any record's ``seed_id`` resolves even after seeds were
    replaced between rounds.
    """

    round: int
    seeds: list[Utterance]
    curated: list[ParaphraseRecord]
    unverified: list[ParaphraseRecord]
    config: RoundConfig
    seed_history: dict[str, Utterance] = field(default_factory=dict)

    def __post_init__(self):
        for seed in self.seeds:
            self.seed_history.setdefault(seed.id, seed)

    def seed_text(self, seed_id: str) -> str:
        return self.seed_history[seed_id].text

    def seed_intent(self, seed_id: str) -> str:
        return self.seed_history[seed_id].intent

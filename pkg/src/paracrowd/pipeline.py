"""Round orchestration: selection, prompting, intake, judging, seed rotation.

One call to ``run_round`` executes a full collection round against simulated
pools and returns the next round's state plus a report.  The same building
blocks (``plan_round``, ``intake_draft``, ``finalize_round``) back the HTTP
service, which spreads the identical flow across live endpoints.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .errors import (
    EmptyCurated,
    InsufficientJudgments,
    NoSeeds,
    PoolExhausted,
    TooFewRecords,
)
from .metrics import MetricsReport, compute_report
from .prompts import (
    SELECTION_MODE_FOR,
    PromptSpec,
    ValidationVerdict,
    build_prompt,
    check_submission,
)
from .records import (
    Condition,
    ParaphraseRecord,
    RoundConfig,
    RoundState,
    SeedStrategy,
    Status,
    Utterance,
)
from .rng import derive_rng, derive_seed
from .selection import (
    PatternFrequencyTable,
    SelectionMode,
    SelectionResult,
    count_patterns,
    overlap_warning,
    sample_exemplars,
    sample_words,
    select_patterns,
    top_frequency_words,
)
from .textutils import lemmatize, tokenize
from .workers import JudgeProfile, WorkerProfile, judge_votes, simulated_worker

log = logging.getLogger(__name__)


def aggregate_judgments(
    record: ParaphraseRecord, threshold: int, required: int
) -> Status:
    """Accepted iff at least ``threshold`` of the required votes say correct."""
    if len(record.judgments) != required:
        raise InsufficientJudgments(
            f"record {record.id} has {len(record.judgments)} of {required} judgments"
        )
    correct = sum(1 for j in record.judgments if j.correct)
    return Status.ACCEPTED if correct >= threshold else Status.REJECTED


def _lemma_vector(text: str) -> dict[str, int]:
    vec: dict[str, int] = {}
    for token in tokenize(text):
        lemma = lemmatize(token)
        vec[lemma] = vec.get(lemma, 0) + 1
    return vec


def _cosine_distance(a: dict[str, int], b: dict[str, int]) -> float:
    if not a and not b:
        return 0.0
    if not a or not b:
        return 1.0
    dot = sum(count * b.get(lemma, 0) for lemma, count in a.items())
    norm_a = sum(c * c for c in a.values()) ** 0.5
    norm_b = sum(c * c for c in b.values()) ** 0.5
    return 1.0 - dot / (norm_a * norm_b)


def outlier_scores(records: list[ParaphraseRecord]) -> dict[str, float]:
    """Mean cosine distance of each record's bag-of-lemmas to all others."""
    if len(records) < 2:
        raise TooFewRecords("outlier scoring needs at least two records")
    vectors = [(r.id, _lemma_vector(r.text)) for r in records]
    scores = {}
    for i, (rid, vec) in enumerate(vectors):
        dists = [
            _cosine_distance(vec, other)
            for j, (_, other) in enumerate(vectors)
            if j != i
        ]
        scores[rid] = sum(dists) / len(dists)
    return scores


def select_seeds(
    curated: list[ParaphraseRecord],
    strategy: SeedStrategy,
    size: int,
    rng_seed: int,
    intents: dict[str, str] | None = None,
) -> list[Utterance]:
    """Choose the next round's seeds from the curated collection.

    ``all`` promotes every accepted record of the latest round; the
    sampling strategies draw from the whole collection.  A size larger than
    the pool clamps with a warning instead of failing the round.
    """
    if not curated:
        raise EmptyCurated("no curated paraphrases to select seeds from")
    intents = intents or {}

    if strategy is SeedStrategy.ALL:
        latest = max(r.round for r in curated)
        chosen = [r for r in curated if r.round == latest]
    elif strategy is SeedStrategy.RANDOM_SAMPLE:
        pool = sorted(curated, key=lambda r: r.id)
        if size > len(pool):
            log.warning("seed sample size %d > pool %d; clamping", size, len(pool))
            size = len(pool)
        rng = derive_rng(rng_seed, "seed_sample")
        chosen = rng.sample(pool, size)
    else:  # outlier
        if len(curated) < 2:
            raise TooFewRecords("outlier strategy needs at least two records")
        scores = outlier_scores(curated)
        ranked = sorted(curated, key=lambda r: (-scores[r.id], r.id))
        if size > len(ranked):
            log.warning("seed sample size %d > pool %d; clamping", size, len(ranked))
            size = len(ranked)
        chosen = ranked[:size]

    return [
        Utterance(
            id=record.id,
            intent=intents.get(record.seed_id, ""),
            text=record.text,
            tree=record.tree,
        )
        for record in chosen
    ]


@dataclass
class RoundPlan:
    """Everything computed up front for one round: table, per-seed prompts."""

    table: PatternFrequencyTable
    targets: tuple[str, ...]
    taboo: tuple[str, ...]
    prompts: dict[str, PromptSpec]  # seed id -> prompt


def _selection_for_seed(
    state: RoundState, table: PatternFrequencyTable, seed: Utterance
) -> SelectionResult:
    """Assemble the SelectionResult one seed's prompt is built from."""
    config = state.config
    condition = config.condition
    mode = SELECTION_MODE_FOR[condition]

    if mode is None:
        base = SelectionResult(
            mode=SelectionMode.BOTTOM_K,
            k=max(len(table.entries), 1),
            patterns=tuple(sorted(table.entries)),
        )
    else:
        base = select_patterns(table, config.k, mode)

    exemplars = base.exemplars
    words = base.words
    taboo_words = base.taboo_words

    if condition in (
        Condition.PATTERNS_BY_EXAMPLE,
        Condition.PATTERNS_BY_EXAMPLE_CONSTRAINED,
        Condition.TABOO_PATTERNS,
    ):
        exemplars = sample_exemplars(
            state.curated,
            base.patterns,
            config.example_count,
            derive_seed(config.rng_seed, "exemplars", state.round, seed.id),
        )
    if condition in (
        Condition.WORD_RECOMMEND,
        Condition.PATTERNS_BY_WORDS,
        Condition.PATTERNS_FILL_BLANKS,
    ):
        words = sample_words(
            state.curated,
            base.patterns,
            config.word_count,
            seed.text,
            derive_seed(config.rng_seed, "words", state.round, seed.id),
        )
    if condition is Condition.TABOO_WORDS:
        same_intent = [
            r
            for r in state.curated
            if state.seed_history.get(r.seed_id)
            and state.seed_intent(r.seed_id) == seed.intent
        ]
        pool = same_intent or state.curated
        taboo_words = top_frequency_words(pool, config.taboo_word_count)

    return SelectionResult(
        mode=base.mode,
        k=base.k,
        patterns=base.patterns,
        exemplars=exemplars,
        words=words,
        taboo_words=taboo_words,
    )


def plan_round(state: RoundState) -> RoundPlan:
    """Count patterns, pick targets/taboo, and build every seed's prompt."""
    if not state.seeds:
        raise NoSeeds(f"round {state.round} has no seeds")
    config = state.config
    table = count_patterns(state.curated)

    targets: tuple[str, ...] = ()
    taboo: tuple[str, ...] = ()
    if table.entries:
        mode = SELECTION_MODE_FOR[config.condition]
        if mode is SelectionMode.BOTTOM_K:
            targets = select_patterns(table, config.k, SelectionMode.BOTTOM_K).patterns
        elif mode is SelectionMode.TOP_K:
            taboo = select_patterns(table, config.k, SelectionMode.TOP_K).patterns
        if targets and len(table.entries) > 0:
            top = select_patterns(table, config.k, SelectionMode.TOP_K)
            overlap_warning(
                SelectionResult(SelectionMode.BOTTOM_K, config.k, targets), top
            )

    prompts = {}
    for seed in sorted(state.seeds, key=lambda s: s.id):
        selection = _selection_for_seed(state, table, seed)
        prompts[seed.id] = build_prompt(
            config.condition, seed, selection, config, config.rng_seed
        )
    return RoundPlan(table=table, targets=targets, taboo=taboo, prompts=prompts)


@dataclass
class RoundReport:
    round: int
    condition: str
    counts: dict
    rejections: dict  # fatal validator failures by check code
    selection: dict
    metrics: dict | None
    seeds_in: int
    seeds_out: int

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "condition": self.condition,
            "counts": self.counts,
            "rejections": self.rejections,
            "selection": self.selection,
            "metrics": self.metrics,
            "seeds_in": self.seeds_in,
            "seeds_out": self.seeds_out,
        }


@dataclass
class IntakeResult:
    record: ParaphraseRecord | None
    verdict: ValidationVerdict


def intake_draft(
    draft: str,
    tree,
    prompt: PromptSpec,
    existing: list[str],
    record_id: str,
    worker_id: str,
    round_no: int,
    config: RoundConfig,
) -> IntakeResult:
    """Validate one draft and wrap survivors in a ParaphraseRecord."""
    verdict = check_submission(draft, prompt, existing, tree, config)
    if not verdict.accepted:
        return IntakeResult(record=None, verdict=verdict)
    status = Status.PENDING_SYNTAX if verdict.needs_syntax_review else Status.UNVERIFIED
    record = ParaphraseRecord.create(
        id=record_id,
        seed_id=prompt.seed.id,
        text=draft,
        worker_id=worker_id,
        round=round_no,
        condition=prompt.condition,
        status=status,
        tree=tree,
    )
    return IntakeResult(record=record, verdict=verdict)


def finalize_round(
    state: RoundState,
    newly_accepted: list[ParaphraseRecord],
    pending: list[ParaphraseRecord],
    plan: RoundPlan,
    counts: dict,
    rejections: dict,
) -> tuple[RoundState, RoundReport]:
    """Append accepted records, rotate seeds, and assemble the report."""
    config = state.config
    curated_after = state.curated + newly_accepted

    intents = {sid: state.seed_intent(sid) for sid in state.seed_history}
    next_seeds = select_seeds(
        curated_after,
        config.seed_strategy,
        config.seed_sample_size,
        derive_seed(config.rng_seed, "seed_selection", state.round),
        intents=intents,
    )
    if config.carry_over_seeds:
        fresh_ids = {s.id for s in state.seeds}
        next_seeds = list(state.seeds) + [s for s in next_seeds if s.id not in fresh_ids]

    metrics_dict = None
    if curated_after:
        seed_texts = {sid: state.seed_text(sid) for sid in state.seed_history}
        report_metrics: MetricsReport = compute_report(
            curated_after, seed_texts, config.max_ngram, require_patterns=False
        )
        metrics_dict = report_metrics.to_dict()

    report = RoundReport(
        round=state.round,
        condition=config.condition.value,
        counts=counts,
        rejections=rejections,
        selection={"targets": list(plan.targets), "taboo": list(plan.taboo)},
        metrics=metrics_dict,
        seeds_in=len(state.seeds),
        seeds_out=len(next_seeds),
    )

    next_state = RoundState(
        round=state.round + 1,
        seeds=next_seeds,
        curated=curated_after,
        unverified=pending,
        config=config,
        seed_history=dict(state.seed_history),
    )
    return next_state, report


def run_round(
    state: RoundState,
    worker_pool: list[WorkerProfile],
    judge_pool: list[JudgeProfile],
) -> tuple[RoundState, RoundReport]:
    """Execute one full simulated round.

    Drafts flow: validators -> (reject | pending syntactic review | judging)
    -> majority aggregation -> curated.  Conservation holds per round:
    submitted = fatal-rejected + pending + judged, and judged splits into
    accepted + rejected.
    """
    config = state.config
    if not state.seeds:
        raise NoSeeds(f"round {state.round} has no seeds")
    if len(worker_pool) < config.workers_per_seed:
        raise PoolExhausted(
            f"{len(worker_pool)} workers < workers_per_seed={config.workers_per_seed}"
        )
    if len(judge_pool) < config.judges_per_paraphrase:
        raise PoolExhausted(
            f"{len(judge_pool)} judges < judges_per_paraphrase={config.judges_per_paraphrase}"
        )

    plan = plan_round(state)

    existing = [r.text for r in state.curated] + [r.text for r in state.unverified]
    accepted: list[ParaphraseRecord] = []
    pending: list[ParaphraseRecord] = list(state.unverified)
    rejections: dict[str, int] = {}
    counts = {
        "submitted": 0,
        "rejected_validation": 0,
        "pending_syntax": 0,
        "judged": 0,
        "accepted": 0,
        "rejected_judgment": 0,
    }

    for seed in sorted(state.seeds, key=lambda s: s.id):
        prompt = plan.prompts[seed.id]
        for worker in worker_pool[: config.workers_per_seed]:
            drafts = simulated_worker(
                worker,
                prompt,
                derive_seed(config.rng_seed, "drafts", state.round, seed.id, worker.worker_id),
            )
            siblings: list[str] = []
            for i, (text, tree) in enumerate(drafts):
                counts["submitted"] += 1
                record_id = f"r{state.round}-{seed.id}-{worker.worker_id}-{i}"
                result = intake_draft(
                    text,
                    tree,
                    prompt,
                    existing + siblings,
                    record_id,
                    worker.worker_id,
                    state.round,
                    config,
                )
                if result.record is None:
                    counts["rejected_validation"] += 1
                    for failure in result.verdict.fatal_failures:
                        key = failure.check.value
                        rejections[key] = rejections.get(key, 0) + 1
                    continue
                siblings.append(text)
                if result.record.status is Status.PENDING_SYNTAX:
                    counts["pending_syntax"] += 1
                    pending.append(result.record)
                    continue
                votes = judge_votes(
                    judge_pool,
                    record_id,
                    config.judges_per_paraphrase,
                    derive_seed(config.rng_seed, "judging", state.round),
                )
                judged = result.record
                for vote in votes:
                    judged = judged.with_judgment(vote)
                counts["judged"] += 1
                status = aggregate_judgments(
                    judged, config.accept_threshold, config.judges_per_paraphrase
                )
                if status is Status.ACCEPTED:
                    counts["accepted"] += 1
                    accepted.append(judged.with_status(Status.ACCEPTED))
                else:
                    counts["rejected_judgment"] += 1
            existing.extend(siblings)

    return finalize_round(state, accepted, pending, plan, counts, rejections)

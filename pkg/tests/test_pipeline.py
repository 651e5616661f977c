import itertools
import json

import pytest

from paracrowd.errors import (
    BankExhausted,
    EmptyCurated,
    InsufficientJudgments,
    NoSeeds,
    PoolExhausted,
    TooFewRecords,
)
from paracrowd.pipeline import (
    aggregate_judgments,
    outlier_scores,
    plan_round,
    run_round,
    select_seeds,
)
from paracrowd.records import (
    Condition,
    Judgment,
    ParaphraseRecord,
    RoundConfig,
    RoundState,
    SeedStrategy,
    Status,
    Utterance,
)
from paracrowd.textutils import lemmatize, tokenize
from paracrowd.trees import parse_bracketed
from paracrowd.workers import (
    BankEntry,
    JudgeProfile,
    WorkerProfile,
    judge_votes,
    make_judge_pool,
    make_worker_pool,
    simulated_worker,
    synthesize_bank,
)


def _rec(i, text, seed_id="s1", round=1, bracket=None, judgments=()):
    tree = parse_bracketed(bracket) if bracket else None
    return ParaphraseRecord.create(
        id=f"p{i:02d}",
        seed_id=seed_id,
        text=text,
        worker_id="w",
        round=round,
        condition=Condition.BASELINE,
        status=Status.ACCEPTED,
        tree=tree,
        judgments=tuple(judgments),
    )


# --- judgment aggregation -----------------------------------------------------

def test_aggregation_exhaustive_majority():
    for votes in itertools.product([True, False], repeat=3):
        record = _rec(1, "any text", judgments=[Judgment(f"j{i}", v) for i, v in enumerate(votes)])
        status = aggregate_judgments(record, threshold=2, required=3)
        expected = Status.ACCEPTED if sum(votes) >= 2 else Status.REJECTED
        assert status is expected, votes


def test_aggregation_insufficient():
    record = _rec(1, "any text", judgments=[Judgment("j1", True), Judgment("j2", True)])
    with pytest.raises(InsufficientJudgments):
        aggregate_judgments(record, threshold=2, required=3)


# --- outlier scoring -----------------------------------------------------------

def test_outlier_identical_texts_score_zero():
    scores = outlier_scores([_rec(1, "a b"), _rec(2, "a b")])
    assert scores["p01"] == pytest.approx(0.0, abs=1e-12)
    assert scores["p02"] == pytest.approx(0.0, abs=1e-12)


def test_outlier_orthogonal_text_wins():
    scores = outlier_scores([_rec(1, "a b"), _rec(2, "a b"), _rec(3, "z q")])
    assert scores["p03"] > scores["p01"] == scores["p02"]


def test_outlier_matches_bruteforce_oracle():
    texts = ["find nice food", "find cheap food", "play loud music", "weather in berlin"]
    records = [_rec(i, t) for i, t in enumerate(texts)]

    def vec(text):
        v = {}
        for tok in tokenize(text):
            lemma = lemmatize(tok)
            v[lemma] = v.get(lemma, 0) + 1
        return v

    def cos_dist(a, b):
        if not a and not b:
            return 0.0
        if not a or not b:
            return 1.0
        dot = sum(c * b.get(k, 0) for k, c in a.items())
        na = sum(c * c for c in a.values()) ** 0.5
        nb = sum(c * c for c in b.values()) ** 0.5
        return 1.0 - dot / (na * nb)

    vectors = [vec(t) for t in texts]
    scores = outlier_scores(records)
    for i, record in enumerate(records):
        expected = sum(cos_dist(vectors[i], vectors[j]) for j in range(len(texts)) if j != i) / (
            len(texts) - 1
        )
        assert scores[record.id] == pytest.approx(expected, abs=1e-12)


def test_outlier_too_few():
    with pytest.raises(TooFewRecords):
        outlier_scores([_rec(1, "a b")])


# --- seed selection --------------------------------------------------------------

def test_select_seeds_all_latest_round():
    curated = [_rec(i, f"text number {i}", round=1) for i in range(3)]
    curated += [_rec(i + 10, f"later text {i}", round=2) for i in range(4)]
    seeds = select_seeds(curated, SeedStrategy.ALL, size=0, rng_seed=0)
    assert len(seeds) == 4
    assert {s.id for s in seeds} == {f"p{i+10:02d}" for i in range(4)}


def test_select_seeds_random_deterministic():
    curated = [_rec(i, f"text number {i}") for i in range(8)]
    a = select_seeds(curated, SeedStrategy.RANDOM_SAMPLE, 3, rng_seed=5)
    b = select_seeds(curated, SeedStrategy.RANDOM_SAMPLE, 3, rng_seed=5)
    assert [s.id for s in a] == [s.id for s in b]
    assert len(a) == 3
    c = select_seeds(curated, SeedStrategy.RANDOM_SAMPLE, 3, rng_seed=6)
    assert {s.id for s in a} <= {r.id for r in curated}
    assert any([s.id for s in a] != [s.id for s in select_seeds(curated, SeedStrategy.RANDOM_SAMPLE, 3, rng_seed=x)] for x in range(6, 16))


def test_select_seeds_random_clamps_oversize():
    curated = [_rec(i, f"text number {i}") for i in range(3)]
    seeds = select_seeds(curated, SeedStrategy.RANDOM_SAMPLE, 99, rng_seed=5)
    assert len(seeds) == 3


def test_select_seeds_outlier_fixture():
    curated = [_rec(1, "a b"), _rec(2, "a b"), _rec(3, "z q")]
    seeds = select_seeds(curated, SeedStrategy.OUTLIER, 1, rng_seed=0)
    assert [s.text for s in seeds] == ["z q"]


def test_select_seeds_empty():
    with pytest.raises(EmptyCurated):
        select_seeds([], SeedStrategy.ALL, 1, 0)


def test_select_seeds_carries_intent():
    curated = [_rec(1, "new seed text", seed_id="s9")]
    seeds = select_seeds(curated, SeedStrategy.ALL, 0, 0, intents={"s9": "booking"})
    assert seeds[0].intent == "booking"


# --- simulated workers ------------------------------------------------------------

WHQ = "(SBARQ (WHADVP (WRB where)) (SQ (MD can) (NP (PRP we)) (VP (VB eat))) (. ?))"
IMP = "(S (VP (VB find) (NP (NNS cafes))) (. .))"
DECL = "(S (NP (PRP i)) (VP (VBP want) (NP (NN food))) (. .))"


def _bank():
    return {
        "restaurant_search": [
            BankEntry.from_bracket("where can we eat", WHQ),
            BankEntry.from_bracket("find cafes", IMP),
            BankEntry.from_bracket("i want food", DECL),
            BankEntry.from_bracket(
                "where can we dine",
                "(SBARQ (WHADVP (WRB where)) (SQ (MD can) (NP (PRP we)) (VP (VB dine))) (. ?))",
            ),
        ]
    }


def _prompt(condition=Condition.BASELINE, **kwargs):
    from paracrowd.prompts import PromptSpec, render_instructions

    seed = Utterance(id="s1", intent="restaurant_search", text="find restaurants in milan")
    defaults = dict(
        condition=condition,
        seed=seed,
        n_required=2,
        instructions=render_instructions(condition, RoundConfig()),
    )
    defaults.update(kwargs)
    return PromptSpec(**defaults)


def test_worker_compliant_constrained_only_emits_targets():
    whq_pattern = "(SBARQ (WHADVP) (SQ) (.))"
    prompt = _prompt(
        Condition.PATTERNS_BY_EXAMPLE_CONSTRAINED,
        examples=("where can we eat tonight",),
        target_patterns=(whq_pattern,),
    )
    worker = WorkerProfile("w1", _bank(), compliance=1.0)
    for seed in range(5):
        for text, tree in simulated_worker(worker, prompt, seed):
            assert tree is not None
            from paracrowd.trees import pattern_of

            assert pattern_of(tree) == whq_pattern


def test_worker_gibberish_knob():
    worker = WorkerProfile("w1", _bank(), gibberish_prob=1.0)
    from paracrowd.textutils import gibberish_check

    for text, tree in simulated_worker(worker, _prompt(), 3):
        assert not gibberish_check(text).ok
        assert tree is None


def test_worker_deterministic():
    worker = WorkerProfile("w1", _bank(), compliance=0.5, duplicate_prob=0.2)
    assert simulated_worker(worker, _prompt(), 11) == simulated_worker(worker, _prompt(), 11)


def test_worker_bank_exhausted():
    bank = {"restaurant_search": [BankEntry.from_bracket("find cafes", IMP)]}
    worker = WorkerProfile("w1", bank)
    with pytest.raises(BankExhausted):
        simulated_worker(worker, _prompt(), 0)  # needs 2 distinct drafts, bank has 1


def test_worker_unknown_intent():
    from paracrowd.prompts import PromptSpec, render_instructions

    worker = WorkerProfile("w1", _bank())
    stranger = Utterance(id="sX", intent="unknown_intent", text="whatever this is")
    prompt = PromptSpec(
        condition=Condition.BASELINE,
        seed=stranger,
        n_required=1,
        instructions=render_instructions(Condition.BASELINE, RoundConfig()),
    )
    with pytest.raises(BankExhausted):
        simulated_worker(worker, prompt, 0)


def test_synthesize_bank_deterministic_and_covers_intents(fixture_seeds):
    a = synthesize_bank(fixture_seeds, 40, rng_seed=9)
    b = synthesize_bank(fixture_seeds, 40, rng_seed=9)
    assert set(a) == {s.intent for s in fixture_seeds}
    assert all(len(v) == 40 for v in a.values())
    assert a == b
    texts = [e.text for entries in a.values() for e in entries]
    from paracrowd.textutils import gibberish_check

    assert all(gibberish_check(t).ok for t in texts)


# --- run_round -----------------------------------------------------------------

def _initial_state(fixture_seeds, fixture_curated, **config_kwargs):
    defaults = dict(
        condition=Condition.BASELINE,
        workers_per_seed=3,
        n_required=2,
        judges_per_paraphrase=3,
        accept_threshold=2,
        seed_strategy=SeedStrategy.RANDOM_SAMPLE,
        seed_sample_size=4,
        rng_seed=7,
        k=2,
    )
    defaults.update(config_kwargs)
    config = RoundConfig(**defaults)
    return RoundState(
        round=1,
        seeds=list(fixture_seeds),
        curated=list(fixture_curated),
        unverified=[],
        config=config,
    )


def _pools(fixture_seeds, config, **knobs):
    bank = synthesize_bank(fixture_seeds, 60, config.rng_seed)
    workers = make_worker_pool(config.workers_per_seed, bank, **knobs)
    judges = make_judge_pool(config.judges_per_paraphrase)
    return workers, judges


def test_run_round_conservation_and_growth(fixture_seeds, fixture_curated):
    state = _initial_state(fixture_seeds, fixture_curated)
    workers, judges = _pools(fixture_seeds, state.config)
    next_state, report = run_round(state, workers, judges)

    counts = report.counts
    assert counts["submitted"] == counts["rejected_validation"] + counts[
        "pending_syntax"
    ] + counts["judged"]
    assert counts["judged"] == counts["accepted"] + counts["rejected_judgment"]
    assert len(next_state.curated) == len(state.curated) + counts["accepted"]
    assert next_state.round == 2
    # curated is append-only
    assert next_state.curated[: len(state.curated)] == state.curated


def test_run_round_judges_always_incorrect(fixture_seeds, fixture_curated):
    state = _initial_state(fixture_seeds, fixture_curated)
    bank = synthesize_bank(fixture_seeds, 60, state.config.rng_seed)
    workers = make_worker_pool(state.config.workers_per_seed, bank)
    judges = make_judge_pool(3, accuracy=0.0)
    next_state, report = run_round(state, workers, judges)
    assert report.counts["accepted"] == 0
    assert next_state.curated == state.curated


def test_run_round_compliant_pass_yields_two_per_worker(fixture_seeds, fixture_curated):
    # 1 seed, 2 compliant workers, 1 draft each, always-correct judges
    seed = fixture_seeds[0]
    state = RoundState(
        round=1,
        seeds=[seed],
        curated=list(fixture_curated),
        unverified=[],
        config=RoundConfig(
            condition=Condition.BASELINE,
            workers_per_seed=2,
            n_required=1,
            judges_per_paraphrase=3,
            accept_threshold=2,
            seed_strategy=SeedStrategy.ALL,
            rng_seed=3,
        ),
        seed_history={s.id: s for s in fixture_seeds},
    )
    bank = synthesize_bank(fixture_seeds, 60, 3)
    workers = make_worker_pool(2, bank)
    judges = make_judge_pool(3)
    next_state, report = run_round(state, workers, judges)
    assert report.counts["accepted"] == 2
    assert len(next_state.curated) == len(fixture_curated) + 2


def test_run_round_deterministic(fixture_seeds, fixture_curated):
    state_a = _initial_state(fixture_seeds, fixture_curated)
    state_b = _initial_state(fixture_seeds, fixture_curated)
    workers_a, judges_a = _pools(fixture_seeds, state_a.config)
    workers_b, judges_b = _pools(fixture_seeds, state_b.config)
    next_a, report_a = run_round(state_a, workers_a, judges_a)
    next_b, report_b = run_round(state_b, workers_b, judges_b)
    assert json.dumps(report_a.to_dict(), sort_keys=True) == json.dumps(
        report_b.to_dict(), sort_keys=True
    )
    assert [r.to_dict() for r in next_a.curated] == [r.to_dict() for r in next_b.curated]
    assert [s.to_dict() for s in next_a.seeds] == [s.to_dict() for s in next_b.seeds]


def test_run_round_errors(fixture_seeds, fixture_curated):
    state = _initial_state(fixture_seeds, fixture_curated)
    workers, judges = _pools(fixture_seeds, state.config)
    empty = RoundState(
        round=1, seeds=[], curated=list(fixture_curated), unverified=[], config=state.config
    )
    with pytest.raises(NoSeeds):
        run_round(empty, workers, judges)
    with pytest.raises(PoolExhausted):
        run_round(state, workers[:1], judges)


def test_run_round_constrained_accepts_only_targets(fixture_seeds, fixture_curated):
    state = _initial_state(
        fixture_seeds,
        fixture_curated,
        condition=Condition.PATTERNS_BY_EXAMPLE_CONSTRAINED,
        workers_per_seed=4,
    )
    plan = plan_round(state)
    targets = set(plan.targets)
    workers, judges = _pools(fixture_seeds, state.config, compliance=1.0)
    next_state, report = run_round(state, workers, judges)
    new_records = next_state.curated[len(state.curated) :]
    assert new_records, "expected some accepted records"
    assert all(r.pattern in targets for r in new_records)


def test_select_seeds_all_matches_latest_accepted(fixture_seeds, fixture_curated):
    state = _initial_state(
        fixture_seeds, fixture_curated, seed_strategy=SeedStrategy.ALL
    )
    workers, judges = _pools(fixture_seeds, state.config)
    next_state, report = run_round(state, workers, judges)
    assert len(next_state.seeds) == report.counts["accepted"]


def test_carry_over_seeds_retains_current(fixture_seeds, fixture_curated):
    state = _initial_state(fixture_seeds, fixture_curated, carry_over_seeds=True)
    workers, judges = _pools(fixture_seeds, state.config)
    next_state, report = run_round(state, workers, judges)
    next_ids = {s.id for s in next_state.seeds}
    assert {s.id for s in fixture_seeds} <= next_ids
    assert len(next_state.seeds) > len(fixture_seeds)

"""Command-line driver.

    paracrowd ingest --dir exp --seeds seeds.jsonl [--curated curated.jsonl] [config flags]
    paracrowd patterns --dir exp
    paracrowd select --dir exp --k 2 --mode bottom_k
    paracrowd prompts --dir exp --condition patterns_by_example
    paracrowd attach-trees --dir exp --trees trees.jsonl
    paracrowd simulate --dir exp --rounds 2 --condition baseline --rng-seed 7
    paracrowd metrics --dir exp [--json]
    paracrowd serve --dir exp --port 8000 [--rng-seed 7]

Every subcommand exits nonzero with a single-line error on failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .errors import EmptyCorpus, ExperimentError, ParacrowdError
from .metrics import compute_report
from .pipeline import plan_round, run_round
from .records import (
    Condition,
    ParaphraseRecord,
    RoundConfig,
    SeedStrategy,
    Status,
    Utterance,
)
from .selection import SelectionMode, count_patterns, select_patterns
from .store import Experiment, _load_jsonl
from .trees import parse_bracketed
from .workers import make_judge_pool, make_worker_pool, synthesize_bank

CONDITIONS = [c.value for c in Condition]


def _config_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--condition", choices=CONDITIONS, default=None)
    parser.add_argument("--rng-seed", type=int, default=None)
    parser.add_argument("--workers-per-seed", type=int, default=None)
    parser.add_argument("--n-required", type=int, default=None)
    parser.add_argument("--k", type=int, default=None)
    parser.add_argument("--judges-per-paraphrase", type=int, default=None)
    parser.add_argument("--accept-threshold", type=int, default=None)
    parser.add_argument(
        "--seed-strategy", choices=[s.value for s in SeedStrategy], default=None
    )
    parser.add_argument("--seed-sample-size", type=int, default=None)
    parser.add_argument("--carry-over-seeds", action="store_const", const=True, default=None)
    parser.add_argument("--example-count", type=int, default=None)
    parser.add_argument("--word-count", type=int, default=None)
    parser.add_argument("--taboo-word-count", type=int, default=None)


def _apply_config_flags(config: RoundConfig, args) -> RoundConfig:
    updates = {}
    mapping = {
        "condition": ("condition", Condition),
        "rng_seed": ("rng_seed", None),
        "workers_per_seed": ("workers_per_seed", None),
        "n_required": ("n_required", None),
        "k": ("k", None),
        "judges_per_paraphrase": ("judges_per_paraphrase", None),
        "accept_threshold": ("accept_threshold", None),
        "seed_strategy": ("seed_strategy", SeedStrategy),
        "seed_sample_size": ("seed_sample_size", None),
        "carry_over_seeds": ("carry_over_seeds", None),
        "example_count": ("example_count", None),
        "word_count": ("word_count", None),
        "taboo_word_count": ("taboo_word_count", None),
    }
    for arg_name, (field, cast) in mapping.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            updates[field] = cast(value) if cast else value
    return dataclasses.replace(config, **updates) if updates else config


def cmd_ingest(args) -> int:
    seed_rows = _load_jsonl(Path(args.seeds))
    if not seed_rows:
        raise ExperimentError(f"no seeds found in {args.seeds}")
    seeds = [Utterance.from_dict(row) for row in seed_rows]

    curated: list[ParaphraseRecord] = []
    if args.curated:
        for row in _load_jsonl(Path(args.curated)):
            tree = parse_bracketed(row["tree"]) if row.get("tree") else None
            curated.append(
                ParaphraseRecord.create(
                    id=row["id"],
                    seed_id=row["seed_id"],
                    text=row["text"],
                    worker_id=row.get("worker_id", "origin"),
                    round=int(row.get("round", 0)),
                    condition=Condition(row.get("condition", "baseline")),
                    status=Status(row.get("status", "accepted")),
                    tree=tree,
                )
            )

    config = _apply_config_flags(RoundConfig(), args)
    Experiment.init(args.dir, seeds, curated, config)
    print(f"initialized {args.dir}: {len(seeds)} seeds, {len(curated)} curated")
    return 0


def cmd_patterns(args) -> int:
    state = Experiment(args.dir).load_state()
    table = count_patterns(state.curated)
    for pattern, count in table.rows():
        print(f"{count:6d}  {pattern}")
    if table.excluded:
        print(f"# excluded (no tree): {len(table.excluded)}", file=sys.stderr)
    print(f"total {table.total()}")
    return 0


def cmd_select(args) -> int:
    state = Experiment(args.dir).load_state()
    table = count_patterns(state.curated)
    result = select_patterns(table, args.k, SelectionMode(args.mode))
    print(json.dumps(result.to_dict(), indent=2, sort_keys=True))
    return 0


def cmd_prompts(args) -> int:
    experiment = Experiment(args.dir)
    state = experiment.load_state()
    state.config = _apply_config_flags(state.config, args)
    plan = plan_round(state)
    specs = [plan.prompts[seed.id].to_dict() for seed in sorted(state.seeds, key=lambda s: s.id)]
    print(json.dumps(specs, indent=2, sort_keys=True))
    return 0


def cmd_attach_trees(args) -> int:
    experiment = Experiment(args.dir)
    state = experiment.load_state()
    tree_map = {}
    for row in _load_jsonl(Path(args.trees)):
        tree_map[row["id"]] = row["tree"]

    resolved = passed = rejected = 0
    updated: list[ParaphraseRecord] = []
    for record in state.unverified:
        if record.status is not Status.PENDING_SYNTAX or record.id not in tree_map:
            updated.append(record)
            continue
        with_tree = record.with_tree(parse_bracketed(tree_map[record.id]))
        ok = True
        if record.condition in (
            Condition.PATTERNS_BY_EXAMPLE_CONSTRAINED,
            Condition.TABOO_PATTERNS,
        ):
            report = experiment.load_report(record.round)
            targets = report["selection"]["targets"]
            taboo = report["selection"]["taboo"]
            if record.condition is Condition.PATTERNS_BY_EXAMPLE_CONSTRAINED:
                ok = with_tree.pattern in targets
            else:
                ok = with_tree.pattern not in taboo
        resolved += 1
        if ok:
            passed += 1
            updated.append(with_tree.with_status(Status.UNVERIFIED))
        else:
            rejected += 1
            updated.append(with_tree.with_status(Status.REJECTED))

    state.unverified = updated
    experiment.write_unverified(updated)
    print(f"resolved {resolved} pending records: {passed} passed, {rejected} rejected")
    return 0


def cmd_simulate(args) -> int:
    experiment = Experiment(args.dir)
    state = experiment.load_state()
    state.config = _apply_config_flags(state.config, args)
    experiment.update_config(state.config)

    bank_seeds = sorted(state.seed_history.values(), key=lambda u: u.id)
    bank = synthesize_bank(bank_seeds, args.bank_size, state.config.rng_seed)
    workers = make_worker_pool(
        state.config.workers_per_seed,
        bank,
        compliance=args.compliance,
        duplicate_prob=args.duplicate_prob,
        gibberish_prob=args.gibberish_prob,
    )
    judges = make_judge_pool(state.config.judges_per_paraphrase, args.judge_accuracy)

    for _ in range(args.rounds):
        finished = state.round
        state, report = run_round(state, workers, judges)
        experiment.save_round(finished, state, report)
        counts = report.counts
        print(
            f"round {finished}: submitted={counts['submitted']} "
            f"accepted={counts['accepted']} curated={len(state.curated)}"
        )
    return 0


def cmd_metrics(args) -> int:
    state = Experiment(args.dir).load_state()
    if not state.curated:
        raise EmptyCorpus("empty corpus")
    seed_texts = {sid: u.text for sid, u in state.seed_history.items()}
    report = compute_report(
        state.curated, seed_texts, state.config.max_ngram, require_patterns=False
    )
    if args.json:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print(report.table())
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceRuntime, create_app

    experiment = Experiment(args.dir)
    runtime = ServiceRuntime(experiment)
    if args.rng_seed is not None:
        runtime.state.config = dataclasses.replace(
            runtime.state.config, rng_seed=args.rng_seed
        )
    app = create_app(runtime, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paracrowd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="create an experiment directory from fixtures")
    p.add_argument("--dir", required=True)
    p.add_argument("--seeds", required=True)
    p.add_argument("--curated", default=None)
    _config_flags(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("patterns", help="print the pattern frequency table")
    p.add_argument("--dir", required=True)
    p.set_defaults(func=cmd_patterns)

    p = sub.add_parser("select", help="run pattern selection")
    p.add_argument("--dir", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=[m.value for m in SelectionMode], required=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("prompts", help="emit PromptSpecs for the current seeds")
    p.add_argument("--dir", required=True)
    _config_flags(p)
    p.set_defaults(func=cmd_prompts)

    p = sub.add_parser("attach-trees", help="resolve pending-syntax records")
    p.add_argument("--dir", required=True)
    p.add_argument("--trees", required=True)
    p.set_defaults(func=cmd_attach_trees)

    p = sub.add_parser("simulate", help="run rounds with simulated pools")
    p.add_argument("--dir", required=True)
    p.add_argument("--rounds", type=int, default=1)
    p.add_argument("--judge-accuracy", type=float, default=1.0)
    p.add_argument("--compliance", type=float, default=1.0)
    p.add_argument("--duplicate-prob", type=float, default=0.0)
    p.add_argument("--gibberish-prob", type=float, default=0.0)
    p.add_argument("--bank-size", type=int, default=80)
    _config_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("metrics", help="print the diversity metrics report")
    p.add_argument("--dir", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("serve", help="start the HTTP task service")
    p.add_argument("--dir", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--rng-seed", type=int, default=None)
    p.add_argument("--ui", default=None, help="directory with the built worker UI")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParacrowdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

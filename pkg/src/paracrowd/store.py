"""Experiment directory persistence.

The experiment directory is the source of truth: JSONL rows plus a manifest,
append-only in spirit, diffable, no database.

    seeds.jsonl       every utterance that ever served as a seed, tagged
                      with the round it was introduced in (the current
                      round's seeds are the rows with the latest tag)
    curated.jsonl     accepted paraphrase records, oldest first
    unverified.jsonl  submitted records still awaiting judgment or trees
    rounds/r<k>/report.json
    manifest.json     round-config history; the only file with timestamps
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

from .errors import ExperimentError
from .pipeline import RoundReport
from .records import ParaphraseRecord, RoundConfig, RoundState, Utterance

_JSONL = dict(sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _dump_jsonl(path: Path, rows: list[dict]):
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, **_JSONL) + "\n")


def _load_jsonl(path: Path) -> list[dict]:
    if not path.exists():
        return []
    rows = []
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


class Experiment:
    """Handle on one experiment directory."""

    def __init__(self, root: Path | str):
        self.root = Path(root)

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.json"

    @property
    def seeds_path(self) -> Path:
        return self.root / "seeds.jsonl"

    @property
    def curated_path(self) -> Path:
        return self.root / "curated.jsonl"

    @property
    def unverified_path(self) -> Path:
        return self.root / "unverified.jsonl"

    def report_path(self, round_no: int) -> Path:
        return self.root / "rounds" / f"r{round_no}" / "report.json"

    # --- lifecycle ---

    @classmethod
    def init(
        cls,
        root: Path | str,
        seeds: list[Utterance],
        curated: list[ParaphraseRecord],
        config: RoundConfig,
    ) -> "Experiment":
        """Create the directory layout for a fresh experiment at round 1."""
        exp = cls(root)
        exp.root.mkdir(parents=True, exist_ok=True)
        if exp.manifest_path.exists():
            raise ExperimentError(f"{exp.root} already holds an experiment")

        ids = [s.id for s in seeds]
        if len(set(ids)) != len(ids):
            raise ExperimentError("duplicate seed ids")
        known = set(ids)
        for record in curated:
            if record.seed_id not in known:
                raise ExperimentError(
                    f"curated record {record.id} references unknown seed {record.seed_id}"
                )

        _dump_jsonl(exp.seeds_path, [{**s.to_dict(), "round": 1} for s in seeds])
        _dump_jsonl(exp.curated_path, [r.to_dict() for r in curated])
        _dump_jsonl(exp.unverified_path, [])
        manifest = {
            "created_at": datetime.now(timezone.utc).isoformat(),
            "current_round": 1,
            "rounds": [{"round": 1, "config": config.to_dict(), "seed_ids": ids}],
        }
        exp.manifest_path.write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        return exp

    def manifest(self) -> dict:
        if not self.manifest_path.exists():
            raise ExperimentError(f"{self.root} is not an experiment directory")
        return json.loads(self.manifest_path.read_text(encoding="utf-8"))

    def load_state(self) -> RoundState:
        manifest = self.manifest()
        current = manifest["current_round"]
        latest = manifest["rounds"][-1]
        config = RoundConfig.from_dict(latest["config"])

        history: dict[str, Utterance] = {}
        for row in _load_jsonl(self.seeds_path):
            utt = Utterance.from_dict(row)
            history[utt.id] = utt
        missing = [sid for sid in latest["seed_ids"] if sid not in history]
        if missing:
            raise ExperimentError(f"current seeds missing from registry: {missing}")
        current_seeds = [history[sid] for sid in latest["seed_ids"]]

        curated = [ParaphraseRecord.from_dict(r) for r in _load_jsonl(self.curated_path)]
        unverified = [
            ParaphraseRecord.from_dict(r) for r in _load_jsonl(self.unverified_path)
        ]
        return RoundState(
            round=current,
            seeds=current_seeds,
            curated=curated,
            unverified=unverified,
            config=config,
            seed_history=history,
        )

    def save_round(self, finished_round: int, next_state: RoundState, report: RoundReport):
        """Persist the outcome of ``finished_round`` and advance the manifest."""
        report_file = self.report_path(finished_round)
        report_file.parent.mkdir(parents=True, exist_ok=True)
        report_file.write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )

        _dump_jsonl(self.curated_path, [r.to_dict() for r in next_state.curated])
        _dump_jsonl(self.unverified_path, [r.to_dict() for r in next_state.unverified])

        rows = _load_jsonl(self.seeds_path)
        known = {row["id"] for row in rows}
        for seed in next_state.seeds:
            if seed.id not in known:
                rows.append({**seed.to_dict(), "round": next_state.round})
                known.add(seed.id)
        _dump_jsonl(self.seeds_path, rows)

        manifest = self.manifest()
        manifest["current_round"] = next_state.round
        manifest["rounds"].append(
            {
                "round": next_state.round,
                "config": next_state.config.to_dict(),
                "seed_ids": [s.id for s in next_state.seeds],
            }
        )
        self.manifest_path.write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    def load_report(self, round_no: int) -> dict:
        path = self.report_path(round_no)
        if not path.exists():
            raise ExperimentError(f"no report for round {round_no}")
        return json.loads(path.read_text(encoding="utf-8"))

    def write_unverified(self, records: list[ParaphraseRecord]):
        _dump_jsonl(self.unverified_path, [r.to_dict() for r in records])

    def update_config(self, config: RoundConfig):
        """Rewrite the current round's config entry (CLI flag overrides)."""
        manifest = self.manifest()
        manifest["rounds"][-1]["config"] = config.to_dict()
        self.manifest_path.write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

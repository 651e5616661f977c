import json

import pytest

from paracrowd.errors import ExperimentError
from paracrowd.pipeline import run_round
from paracrowd.records import RoundConfig
from paracrowd.store import Experiment
from paracrowd.workers import make_judge_pool, make_worker_pool, synthesize_bank


def test_init_creates_layout(experiment_dir):
    assert (experiment_dir / "manifest.json").exists()
    assert (experiment_dir / "seeds.jsonl").exists()
    assert (experiment_dir / "curated.jsonl").exists()
    assert (experiment_dir / "unverified.jsonl").exists()
    manifest = json.loads((experiment_dir / "manifest.json").read_text())
    assert manifest["current_round"] == 1
    assert manifest["rounds"][0]["seed_ids"]


def test_init_refuses_double_init(experiment_dir, fixture_seeds, fixture_curated):
    with pytest.raises(ExperimentError):
        Experiment.init(experiment_dir, fixture_seeds, fixture_curated, RoundConfig())


def test_init_rejects_duplicate_seed_ids(tmp_path, fixture_seeds):
    with pytest.raises(ExperimentError):
        Experiment.init(tmp_path / "x", fixture_seeds + [fixture_seeds[0]], [], RoundConfig())


def test_init_rejects_dangling_seed_reference(tmp_path, fixture_seeds, fixture_curated):
    with pytest.raises(ExperimentError):
        Experiment.init(tmp_path / "x", fixture_seeds[:1], fixture_curated, RoundConfig())


def test_state_roundtrip(experiment_dir, fixture_seeds, fixture_curated):
    state = Experiment(experiment_dir).load_state()
    assert state.round == 1
    assert [s.to_dict() for s in state.seeds] == [s.to_dict() for s in fixture_seeds]
    assert [r.to_dict() for r in state.curated] == [r.to_dict() for r in fixture_curated]
    assert state.unverified == []
    assert set(state.seed_history) == {s.id for s in fixture_seeds}


def test_save_round_persists_everything(experiment_dir, fixture_seeds):
    experiment = Experiment(experiment_dir)
    state = experiment.load_state()
    bank = synthesize_bank(fixture_seeds, 60, state.config.rng_seed)
    workers = make_worker_pool(state.config.workers_per_seed, bank)
    judges = make_judge_pool(state.config.judges_per_paraphrase)
    next_state, report = run_round(state, workers, judges)
    experiment.save_round(1, next_state, report)

    assert experiment.report_path(1).exists()
    loaded = experiment.load_state()
    assert loaded.round == 2
    assert len(loaded.curated) == len(next_state.curated)
    assert [s.id for s in loaded.seeds] == [s.id for s in next_state.seeds]
    # promoted seeds resolve in the history even after replacement
    for record in loaded.curated:
        assert record.seed_id in loaded.seed_history

    report_on_disk = experiment.load_report(1)
    assert report_on_disk == report.to_dict()


def test_missing_directory_is_an_error(tmp_path):
    with pytest.raises(ExperimentError):
        Experiment(tmp_path / "nope").load_state()

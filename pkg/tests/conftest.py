import json
from pathlib import Path

import pytest

from paracrowd.records import ParaphraseRecord, Utterance

FIXTURES = Path(__file__).parent / "fixtures"


def load_jsonl(path):
    return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]


@pytest.fixture(scope="session")
def fixture_seeds() -> list[Utterance]:
    return [Utterance.from_dict(row) for row in load_jsonl(FIXTURES / "seeds.jsonl")]


@pytest.fixture(scope="session")
def fixture_curated() -> list[ParaphraseRecord]:
    return [ParaphraseRecord.from_dict(row) for row in load_jsonl(FIXTURES / "curated.jsonl")]


@pytest.fixture()
def experiment_dir(tmp_path, fixture_seeds, fixture_curated):
    """A fresh experiment directory initialized from the shipped fixtures."""
    from paracrowd.records import RoundConfig
    from paracrowd.store import Experiment

    root = tmp_path / "exp"
    Experiment.init(root, fixture_seeds, fixture_curated, RoundConfig())
    return root

import json
from pathlib import Path

import pytest

from paracrowd.cli import main
from paracrowd.records import ParaphraseRecord, Status
from paracrowd.store import Experiment

FIXTURES = Path(__file__).parent / "fixtures"


def _ingest(tmp_path, name="exp", extra=()):
    exp_dir = tmp_path / name
    code = main(
        [
            "ingest",
            "--dir",
            str(exp_dir),
            "--seeds",
            str(FIXTURES / "seeds.jsonl"),
            "--curated",
            str(FIXTURES / "curated.jsonl"),
            *extra,
        ]
    )
    assert code == 0
    return exp_dir


def test_ingest_creates_experiment(tmp_path, capsys):
    exp_dir = _ingest(tmp_path)
    out = capsys.readouterr().out
    assert "6 seeds, 50 curated" in out
    assert (exp_dir / "manifest.json").exists()


def test_ingest_missing_seeds_file(tmp_path, capsys):
    code = main(["ingest", "--dir", str(tmp_path / "x"), "--seeds", str(tmp_path / "nope.jsonl")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_patterns_totals_match_fixture_count(tmp_path, capsys):
    exp_dir = _ingest(tmp_path)
    capsys.readouterr()
    assert main(["patterns", "--dir", str(exp_dir)]) == 0
    out = capsys.readouterr().out
    assert out.strip().splitlines()[-1] == "total 50"
    assert "(S (VP) (.))" in out


def test_select_bottom_k(tmp_path, capsys):
    exp_dir = _ingest(tmp_path)
    capsys.readouterr()
    assert main(["select", "--dir", str(exp_dir), "--k", "2", "--mode", "bottom_k"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["patterns"] == ["(FRAG (NP) (PP) (.))", "(SQ (MD) (NP) (VP) (.))"]


def test_prompts_emits_one_spec_per_seed(tmp_path, capsys):
    exp_dir = _ingest(tmp_path)
    capsys.readouterr()
    assert (
        main(
            [
                "prompts",
                "--dir",
                str(exp_dir),
                "--condition",
                "patterns_by_example",
                "--rng-seed",
                "5",
            ]
        )
        == 0
    )
    specs = json.loads(capsys.readouterr().out)
    assert len(specs) == 6
    assert all(s["condition"] == "patterns_by_example" for s in specs)
    assert all(s["examples"] for s in specs)


def test_metrics_table_and_json(tmp_path, capsys):
    exp_dir = _ingest(tmp_path)
    capsys.readouterr()
    assert main(["metrics", "--dir", str(exp_dir)]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("ttr")
    assert main(["metrics", "--dir", str(exp_dir), "--json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["counts"]["paraphrases"] == 50


def test_metrics_empty_experiment_fails(tmp_path, capsys):
    exp_dir = tmp_path / "empty"
    assert (
        main(["ingest", "--dir", str(exp_dir), "--seeds", str(FIXTURES / "seeds.jsonl")]) == 0
    )
    capsys.readouterr()
    assert main(["metrics", "--dir", str(exp_dir)]) == 1
    assert "empty corpus" in capsys.readouterr().err


def test_simulate_round_and_replay_identical(tmp_path, capsys):
    args = [
        "--rounds",
        "2",
        "--condition",
        "patterns_by_example",
        "--rng-seed",
        "7",
        "--workers-per-seed",
        "3",
        "--n-required",
        "2",
    ]
    dir_a = _ingest(tmp_path, "a")
    assert main(["simulate", "--dir", str(dir_a), *args]) == 0
    dir_b = _ingest(tmp_path, "b")
    assert main(["simulate", "--dir", str(dir_b), *args]) == 0

    for rel in ["curated.jsonl", "rounds/r1/report.json", "rounds/r2/report.json"]:
        assert (dir_a / rel).read_bytes() == (dir_b / rel).read_bytes(), rel
    state = Experiment(dir_a).load_state()
    assert state.round == 3
    assert len(state.curated) > 50


def test_attach_trees_resolves_pending(tmp_path, capsys):
    from fastapi.testclient import TestClient

    from paracrowd.service import ServiceRuntime, create_app

    exp_dir = _ingest(
        tmp_path,
        extra=("--condition", "patterns_by_example_constrained", "--n-required", "2"),
    )
    runtime = ServiceRuntime(Experiment(exp_dir))
    client = TestClient(create_app(runtime))
    client.post("/admin/rounds", json={"action": "start"})
    task = client.get("/tasks/next", params={"worker_id": "w1"}).json()
    drafts = ["would you grab a corner spot", "fetch iced espresso flights"]
    submitted = client.post(f"/tasks/{task['task_id']}/submit", json={"drafts": drafts})
    verdicts = submitted.json()["verdicts"]
    assert all(v["accepted"] for v in verdicts)
    assert all(v["failures"][0]["check"] == "pattern_unknown" for v in verdicts)
    client.post("/admin/rounds", json={"action": "advance"})

    pending = [
        ParaphraseRecord.from_dict(json.loads(line))
        for line in (exp_dir / "unverified.jsonl").read_text().splitlines()
    ]
    assert {r.status for r in pending} == {Status.PENDING_SYNTAX}
    assert len(pending) == 2

    # first draft's tree lands in the round's targets, second one does not
    trees_file = tmp_path / "trees.jsonl"
    rows = [
        {
            "id": pending[0].id,
            "tree": "(SQ (MD would) (NP (PRP you)) (VP (VB grab) (NP (DT a) (NN corner) (NN spot))) (. ?))",
        },
        {
            "id": pending[1].id,
            "tree": "(S (VP (VB fetch) (NP (JJ iced) (NN espresso) (NNS flights))) (. .))",
        },
    ]
    trees_file.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    capsys.readouterr()
    assert main(["attach-trees", "--dir", str(exp_dir), "--trees", str(trees_file)]) == 0
    assert "resolved 2 pending records: 1 passed, 1 rejected" in capsys.readouterr().out

    resolved = {
        r["id"]: r
        for r in map(json.loads, (exp_dir / "unverified.jsonl").read_text().splitlines())
    }
    assert resolved[pending[0].id]["status"] == "unverified"
    assert resolved[pending[0].id]["pattern"] == "(SQ (MD) (NP) (VP) (.))"
    assert resolved[pending[1].id]["status"] == "rejected"


def test_unknown_command_exits_nonzero():
    with pytest.raises(SystemExit):
        main(["definitely-not-a-command"])

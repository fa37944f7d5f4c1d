import json
from pathlib import Path

import pytest

from avalon_assassin.cli import dispatch
from avalon_assassin.log_ingest import game_to_dict
from conftest import make_g1

FIXTURES = Path(__file__).parent / "fixtures"


def run(capsys, *argv):
    code = dispatch(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_simulate_deterministic_bytes(tmp_path, capsys):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for path in (a, b):
        code, _, _ = run(capsys, "simulate", "--games", "100", "--seed", "7",
                         "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    manifest = json.loads((tmp_path / "a.jsonl.manifest.json").read_text())
    assert manifest["subcommand"] == "simulate"
    assert manifest["seed"] == 7
    assert str(a) in manifest["outputs"]


def test_unknown_flag_exits_1(capsys):
    code, _, err = run(capsys, "simulate", "--games", "5", "--frobnicate")
    assert code == 1
    assert "usage" in err.lower()


def test_unknown_subcommand_exits_1(capsys):
    code, _, _ = run(capsys, "transmogrify")
    assert code == 1


def test_missing_input_exits_2(tmp_path, capsys):
    code, _, err = run(capsys, "filter", "--in", str(tmp_path / "nope.jsonl"),
                       "--out", str(tmp_path / "out.jsonl"))
    assert code == 2
    assert "data error" in err


def test_end_to_end_train_predict(tmp_path, capsys):
    games = tmp_path / "g.jsonl"
    model = tmp_path / "m.json"
    code, _, _ = run(capsys, "simulate", "--games", "300", "--seed", "3",
                     "--merlin-leak", "0.7", "--eligible-only",
                     "--out", str(games))
    assert code == 0
    code, _, _ = run(capsys, "train", "--model", "linear-svc",
                     "--features", "engineered", "--in", str(games),
                     "--out", str(model))
    assert code == 0
    one = tmp_path / "one.json"
    one.write_text(json.dumps(game_to_dict(make_g1())))
    code, out, _ = run(capsys, "predict", "--model", str(model),
                       "--game", str(one))
    assert code == 0
    assert out.startswith("target: seat ")
    scores_line = out.splitlines()[1]
    assert scores_line.startswith("scores: ")
    assert len(scores_line.split()[1:]) == 5


def test_train_mlp_with_curve(tmp_path, capsys):
    games = tmp_path / "g.jsonl"
    run(capsys, "simulate", "--games", "80", "--seed", "4", "--eligible-only",
        "--out", str(games))
    model = tmp_path / "m.json"
    curve = tmp_path / "curve.csv"
    code, _, _ = run(capsys, "train", "--model", "mlp", "--layers", "8,8",
                     "--epochs", "3", "--lr", "1e-3", "--in", str(games),
                     "--out", str(model), "--curve-out", str(curve))
    assert code == 0
    assert curve.read_text().startswith("epoch,loss,accuracy")
    assert json.loads(model.read_text())["model_type"] == "mlp"


def test_validate_subcommand(tmp_path, capsys):
    games = tmp_path / "g.jsonl"
    run(capsys, "simulate", "--games", "20", "--seed", "5", "--out", str(games))
    with open(games, "a") as fh:
        fh.write("{broken\n")
    code, out, _ = run(capsys, "validate", "--in", str(games))
    assert code == 0
    report = json.loads(out)
    assert report["valid_games"] == 20
    assert len(report["parse_errors"]) == 1


def test_featurize_csv(tmp_path, capsys):
    code, out, _ = run(capsys, "featurize", "--in",
                       str(FIXTURES / "games.jsonl"), "--features", "engineered",
                       "--subset", "f1,f2")
    assert code == 0
    header = out.splitlines()[0]
    assert header == ",".join(
        [f"s{s}_{f}" for s in range(5) for f in ("f1", "f2")] + ["merlin_seat"])


def test_cv_subcommand_json(tmp_path, capsys):
    games = tmp_path / "g.jsonl"
    run(capsys, "simulate", "--games", "150", "--seed", "6", "--merlin-leak",
        "0.8", "--eligible-only", "--out", str(games))
    code, out, _ = run(capsys, "cv", "--in", str(games), "--folds", "5", "--json")
    assert code == 0
    report = json.loads(out)
    assert len(report["fold_accuracies"]) == 5
    assert report["mean_accuracy"] > 0.4


def test_select_features_subcommand(tmp_path, capsys):
    games = tmp_path / "g.jsonl"
    run(capsys, "simulate", "--games", "80", "--seed", "8", "--merlin-leak",
        "0.8", "--eligible-only", "--out", str(games))
    out_csv = tmp_path / "search.csv"
    code, out, _ = run(capsys, "select-features", "--in", str(games),
                       "--candidates", "f1,f2,f3", "--folds", "4",
                       "--out", str(out_csv))
    assert code == 0
    assert "subsets evaluated: 7" in out
    assert out_csv.exists()


def test_analyze_subcommand(tmp_path, capsys):
    games = tmp_path / "g.jsonl"
    model = tmp_path / "m.json"
    run(capsys, "simulate", "--games", "150", "--seed", "9", "--merlin-leak",
        "0.6", "--eligible-only", "--out", str(games))
    run(capsys, "train", "--in", str(games), "--out", str(model))
    code, out, _ = run(capsys, "analyze", "--in", str(games), "--model",
                       str(model), "--json")
    assert code == 0
    report = json.loads(out)
    assert sum(report["contingency"].values()) == 150


def test_inputs_never_mutated(tmp_path, capsys):
    games = tmp_path / "g.jsonl"
    run(capsys, "simulate", "--games", "50", "--seed", "10", "--eligible-only",
        "--out", str(games))
    before = games.read_bytes()
    run(capsys, "cv", "--in", str(games), "--folds", "5")
    run(capsys, "featurize", "--in", str(games))
    assert games.read_bytes() == before


def test_train_output_deterministic(tmp_path, capsys):
    games = tmp_path / "g.jsonl"
    run(capsys, "simulate", "--games", "120", "--seed", "11", "--merlin-leak",
        "0.5", "--eligible-only", "--out", str(games))
    m1, m2 = tmp_path / "m1.json", tmp_path / "m2.json"
    run(capsys, "train", "--in", str(games), "--out", str(m1))
    run(capsys, "train", "--in", str(games), "--out", str(m2))
    assert m1.read_bytes() == m2.read_bytes()

import json

import pytest

from avalon_assassin.log_ingest import (
    GameStream,
    SchemaError,
    filter_assassination_eligible,
    game_to_dict,
    game_to_line,
    parse_game_stream,
    write_game_stream,
)
from avalon_assassin.simulator import SimConfig, simulate_dataset

from conftest import make_g1


def g1_line():
    return game_to_line(make_g1())


def test_parse_three_valid_lines():
    text = "\n".join([g1_line()] * 3) + "\n"
    stream = parse_game_stream(text)
    assert len(stream.games) == 3
    assert stream.parse_errors == ()


def test_lenient_skips_and_records_missing_field():
    broken = json.loads(g1_line())
    del broken["roles"]
    text = "\n".join([g1_line(), json.dumps(broken), g1_line()]) + "\n"
    stream = parse_game_stream(text, "lenient")
    assert len(stream.games) == 2
    assert len(stream.parse_errors) == 1
    assert stream.parse_errors[0].line == 2


def test_strict_aborts_on_missing_field():
    broken = json.loads(g1_line())
    del broken["roles"]
    text = "\n".join([g1_line(), json.dumps(broken), g1_line()]) + "\n"
    with pytest.raises(SchemaError) as exc:
        parse_game_stream(text, "strict")
    assert exc.value.line == 2
    assert exc.value.field == "roles"


def test_lenient_records_malformed_json():
    text = g1_line() + "\n{not json\n"
    stream = parse_game_stream(text)
    assert len(stream.games) == 1
    assert stream.parse_errors[0].line == 2


def test_lenient_never_yields_invalid_games():
    broken = json.loads(g1_line())
    broken["assassination"] = None  # violates AssassinationRequired
    text = json.dumps(broken) + "\n"
    stream = parse_game_stream(text)
    assert stream.games == ()
    assert len(stream.parse_errors) == 1


def test_simulator_round_trip_1000_games(tmp_path):
    stream = simulate_dataset(SimConfig(seed=2, num_games=1000, merlin_leak=0.3))
    path = tmp_path / "games.jsonl"
    write_game_stream(stream, path)
    back = parse_game_stream(path.read_bytes(), source=str(path))
    assert back.games == stream.games


def test_byte_level_round_trip(tmp_path):
    stream = simulate_dataset(SimConfig(seed=4, num_games=50))
    path = tmp_path / "games.jsonl"
    write_game_stream(stream, path)
    raw = path.read_bytes()
    reparsed = parse_game_stream(raw)
    path2 = tmp_path / "again.jsonl"
    write_game_stream(reparsed, path2)
    assert path2.read_bytes() == raw


def test_write_empty_stream(tmp_path):
    n = write_game_stream(GameStream(games=(), source="x"), tmp_path / "e.jsonl")
    assert n == 0
    assert (tmp_path / "e.jsonl").read_bytes() == b""


def test_write_single_game_single_line(tmp_path):
    stream = parse_game_stream(g1_line())
    path = tmp_path / "one.jsonl"
    write_game_stream(stream, path)
    data = path.read_bytes()
    assert data.endswith(b"\n")
    assert data.count(b"\n") == 1


def test_filter_keeps_only_assassination_games():
    stream = simulate_dataset(SimConfig(seed=8, num_games=200, spy_sabotage=0.6))
    filtered = filter_assassination_eligible(stream)
    assert all(g.assassination is not None for g in filtered.games)
    assert all(sum(1 for m in g.missions if m.succeeded) == 3 for g in filtered.games)
    excluded = set(stream.games) - set(filtered.games)
    assert all(g.assassination is None for g in excluded)
    # idempotent and order-preserving
    again = filter_assassination_eligible(filtered)
    assert again.games == filtered.games


def test_filter_noop_with_zero_sabotage():
    stream = simulate_dataset(SimConfig(seed=9, num_games=100, spy_sabotage=0.0))
    filtered = filter_assassination_eligible(stream)
    assert filtered.games == stream.games


def test_game_to_dict_key_order(g1):
    keys = list(game_to_dict(g1).keys())
    assert keys == ["game_id", "num_players", "first_leader", "roles",
                    "missions", "winner", "assassination"]

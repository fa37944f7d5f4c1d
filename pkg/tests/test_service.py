import json
import threading
import urllib.error
import urllib.request
from pathlib import Path

import pytest

from avalon_assassin.cli import dispatch
from avalon_assassin.game_model import assassin_view
from avalon_assassin.log_ingest import game_to_dict
from avalon_assassin.service import (
    AdvisorServer,
    advice_response_json,
    advise,
    build_model_meta,
    model_checksum,
    view_from_dict,
    view_to_dict,
)
from avalon_assassin.svm import load_model
from conftest import make_g1

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="module")
def model_path(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("svc")
    games = tmp / "g.jsonl"
    model = tmp / "m.json"
    assert dispatch(["simulate", "--games", "400", "--seed", "20",
                     "--merlin-leak", "0.7", "--eligible-only",
                     "--out", str(games)]) == 0
    assert dispatch(["train", "--model", "linear-svc", "--in", str(games),
                     "--out", str(model)]) == 0
    return model


@pytest.fixture(scope="module")
def server(model_path):
    srv = AdvisorServer(model_path, port=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield srv
    srv.shutdown()


def call(server, path, body=None, method=None):
    url = f"http://127.0.0.1:{server.server_address[1]}{path}"
    data = None if body is None else body.encode("utf-8")
    req = urllib.request.Request(url, data=data, method=method,
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, resp.read().decode("utf-8")
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read().decode("utf-8")


def test_health(server):
    status, body = call(server, "/api/v1/health")
    assert status == 200
    payload = json.loads(body)
    assert payload["status"] == "ok"
    assert payload["api_version"] == "1"
    assert payload["model"]["type"] == "linear-svc"


def test_advise_parity_with_library(server, model_path):
    model = load_model(model_path)
    meta = build_model_meta(model, model_checksum(model_path))
    view = assassin_view(make_g1())
    expected = advice_response_json(advise(view, model), meta)
    status, body = call(server, "/api/v1/advise", json.dumps(view_to_dict(view)))
    assert status == 200
    assert body == expected  # byte-identical HTTP vs library response


def test_advise_parity_with_cli_on_fixture_suite(server, model_path, tmp_path,
                                                 capsys):
    from avalon_assassin.log_ingest import read_game_stream, filter_assassination_eligible
    stream = filter_assassination_eligible(read_game_stream(FIXTURES / "games.jsonl"))
    assert stream.games
    for log in stream.games:
        game_file = tmp_path / "game.json"
        game_file.write_text(json.dumps(game_to_dict(log)))
        assert dispatch(["predict", "--model", str(model_path),
                         "--game", str(game_file)]) == 0
        out = capsys.readouterr().out
        cli_response = out.splitlines()[2]
        status, body = call(server, "/api/v1/advise",
                            json.dumps(view_to_dict(assassin_view(log))))
        assert status == 200
        assert body == cli_response


def test_advise_rejects_three_spies(server):
    view = view_to_dict(assassin_view(make_g1()))
    view["spy_seats"] = [2, 3, 4]
    status, body = call(server, "/api/v1/advise", json.dumps(view))
    assert status == 422
    payload = json.loads(body)
    assert payload["field"] == "spy_seats"


def test_advise_malformed_json(server):
    status, body = call(server, "/api/v1/advise", "{nope")
    assert status == 400
    assert "malformed" in json.loads(body)["error"]


def test_validate_endpoint(server):
    view = view_to_dict(assassin_view(make_g1()))
    status, body = call(server, "/api/v1/validate", json.dumps(view))
    assert status == 200
    assert json.loads(body)["violations"] == []
    view["missions"][0]["proposals"][0]["team"] = [0, 1, 2]
    status, body = call(server, "/api/v1/validate", json.dumps(view))
    assert status == 200
    rules = {v["rule"] for v in json.loads(body)["violations"]}
    assert "TeamSize" in rules


def test_unknown_endpoint_404(server):
    status, _ = call(server, "/api/v1/nope")
    assert status == 404


def test_zero_event_view_no_signal(server):
    view = {"spy_seats": [3, 4], "first_leader": 0, "missions": []}
    status, body = call(server, "/api/v1/advise", json.dumps(view))
    assert status == 200
    payload = json.loads(body)
    assert payload["meta"]["no_signal"] is True
    assert payload["meta"]["partial"] is True
    # all-zero features: tie broken to lowest resistance seat
    assert payload["target"] == 0


def test_midgame_vs_full_views(server):
    g1 = make_g1()
    full_view = assassin_view(g1)
    mid_view = view_to_dict(full_view)
    mid_view["missions"] = mid_view["missions"][:1]
    status_mid, body_mid = call(server, "/api/v1/advise", json.dumps(mid_view))
    status_full, body_full = call(server, "/api/v1/advise",
                                  json.dumps(view_to_dict(full_view)))
    assert status_mid == 200 and status_full == 200
    mid, full = json.loads(body_mid), json.loads(body_full)
    assert mid["meta"]["partial"] is True
    assert full["meta"]["partial"] is False
    assert len(mid["ranking"]) == len(full["ranking"]) == 3
    assert mid["scores"] != full["scores"]


def test_concurrent_identical_requests(server):
    view = json.dumps(view_to_dict(assassin_view(make_g1())))
    results = []

    def worker():
        results.append(call(server, "/api/v1/advise", view))

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len({body for _, body in results}) == 1


def test_general_feature_model_rejected(server, tmp_path, capsys):
    games = tmp_path / "g.jsonl"
    model = tmp_path / "gen.json"
    assert dispatch(["simulate", "--games", "60", "--seed", "21",
                     "--eligible-only", "--out", str(games)]) == 0
    assert dispatch(["train", "--features", "general", "--in", str(games),
                     "--out", str(model)]) == 0
    capsys.readouterr()
    srv = AdvisorServer(model, port=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    try:
        view = json.dumps(view_to_dict(assassin_view(make_g1())))
        status, body = call(srv, "/api/v1/advise", view)
        assert status == 422
        assert "engineered" in json.loads(body)["error"]
    finally:
        srv.shutdown()


def test_view_from_dict_round_trip():
    view = assassin_view(make_g1())
    assert view_from_dict(view_to_dict(view)) == view

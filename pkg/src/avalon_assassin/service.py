"""Local HTTP advisor: serves a trained model for live assassination advice.

Endpoints (JSON over HTTP/1.1, localhost):
    GET  /api/v1/health
    POST /api/v1/advise    AssassinView -> ranked resistance seats + target
    POST /api/v1/validate  AssassinView -> violations list
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from .features import engineered_features
from .game_model import (
    NUM_PLAYERS,
    AssassinView,
    Mission,
    Proposal,
    validate_view,
)
from .svm import load_model, decision_scores

API_VERSION = "1"


class FeatureSchemaMismatch(ValueError):
    pass


class ViewSchemaError(ValueError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"field '{field}': {message}")


@dataclass(frozen=True)
class Advice:
    ranking: tuple[dict, ...]  # {"seat": int, "score": float}, descending
    target: int
    scores: tuple[float, ...]  # all 5 decision scores
    no_signal: bool
    partial: bool


def view_from_dict(obj: dict) -> AssassinView:
    if not isinstance(obj, dict):
        raise ViewSchemaError("", "body must be a JSON object")
    for key in ("spy_seats", "first_leader", "missions"):
        if key not in obj:
            raise ViewSchemaError(key, "missing")
    spy_seats = obj["spy_seats"]
    if not isinstance(spy_seats, list) or not all(isinstance(s, int) for s in spy_seats):
        raise ViewSchemaError("spy_seats", "expected a list of seat indices")
    if not isinstance(obj["first_leader"], int):
        raise ViewSchemaError("first_leader", "expected a seat index")
    missions = []
    if not isinstance(obj["missions"], list):
        raise ViewSchemaError("missions", "expected a list")
    for mi, mobj in enumerate(obj["missions"]):
        if not isinstance(mobj, dict):
            raise ViewSchemaError(f"missions[{mi}]", "expected an object")
        proposals = []
        for pi, pobj in enumerate(mobj.get("proposals", [])):
            path = f"missions[{mi}].proposals[{pi}]"
            if not isinstance(pobj, dict):
                raise ViewSchemaError(path, "expected an object")
            try:
                proposals.append(Proposal(
                    leader=int(pobj["leader"]),
                    team=tuple(pobj["team"]),
                    votes=tuple(pobj["votes"]),
                    approved=bool(pobj["approved"]),
                ))
            except (KeyError, TypeError) as exc:
                raise ViewSchemaError(path, f"bad proposal: {exc}") from exc
        try:
            missions.append(Mission(
                index=int(mobj["index"]),
                team_size=int(mobj["team_size"]),
                proposals=tuple(proposals),
                fail_count=mobj.get("fail_count"),
                succeeded=mobj.get("succeeded"),
            ))
        except (KeyError, TypeError) as exc:
            raise ViewSchemaError(f"missions[{mi}]", f"bad mission: {exc}") from exc
    return AssassinView(
        spy_seats=frozenset(spy_seats),
        first_leader=obj["first_leader"],
        missions=tuple(missions),
    )


def view_to_dict(view: AssassinView) -> dict:
    return {
        "spy_seats": sorted(view.spy_seats),
        "first_leader": view.first_leader,
        "missions": [
            {
                "index": m.index,
                "team_size": m.team_size,
                "proposals": [
                    {
                        "leader": p.leader,
                        "team": list(p.team),
                        "votes": list(p.votes),
                        "approved": p.approved,
                    }
                    for p in m.proposals
                ],
                "fail_count": m.fail_count,
                "succeeded": m.succeeded,
            }
            for m in view.missions
        ],
    }


def advise(view: AssassinView, model) -> Advice:
    """Score a (possibly mid-game) view and rank the resistance seats."""
    schema = model.feature_schema
    if schema.get("kind") != "engineered":
        raise FeatureSchemaMismatch(
            f"live advising requires an engineered-feature model, got {schema}")
    subset = tuple(schema["subset"])
    feats = engineered_features(view, subset)
    scores = decision_scores(model, feats.values)
    mask = [s not in view.spy_seats for s in range(NUM_PLAYERS)]
    no_signal = not np.any(feats.values)
    resistance = [s for s in range(NUM_PLAYERS) if mask[s]]
    if no_signal:
        order = resistance  # no information: fall back to the tie-break rule
    else:
        order = sorted(resistance, key=lambda s: (-scores[s], s))
    ranking = tuple({"seat": s, "score": float(scores[s])} for s in order)
    successes = sum(1 for m in view.missions if m.succeeded)
    return Advice(
        ranking=ranking,
        target=order[0],
        scores=tuple(float(v) for v in scores),
        no_signal=no_signal,
        partial=successes < 3,
    )


def model_checksum(model_path) -> str:
    with open(model_path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def advice_response(advice: Advice, model_meta: dict) -> dict:
    return {
        "api_version": API_VERSION,
        "ranking": list(advice.ranking),
        "target": advice.target,
        "scores": list(advice.scores),
        "meta": {"no_signal": advice.no_signal, "partial": advice.partial},
        "model_meta": model_meta,
    }


def advice_response_json(advice: Advice, model_meta: dict) -> str:
    return json.dumps(advice_response(advice, model_meta), separators=(",", ":"))


def build_model_meta(model, checksum: str) -> dict:
    return {
        "type": model.model_type,
        "feature_schema": model.feature_schema,
        "checksum": checksum,
    }


class AdvisorHandler(BaseHTTPRequestHandler):
    server_version = "AvalonAdvisor/1"

    def log_message(self, fmt, *args):  # structured request log to stderr
        print(json.dumps({"remote": self.address_string(),
                          "request": fmt % args}), file=sys.stderr)

    def _send_json(self, status: int, payload: dict | str):
        body = payload if isinstance(payload, str) else (
            json.dumps(payload, separators=(",", ":")))
        data = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _error(self, status: int, message: str, field: str = ""):
        self._send_json(status, {
            "api_version": API_VERSION,
            "error": message,
            "field": field,
        })

    def _read_body(self):
        length = int(self.headers.get("Content-Length", 0))
        return self.rfile.read(length)

    def do_GET(self):
        if self.path == "/api/v1/health":
            self._send_json(200, {
                "api_version": API_VERSION,
                "status": "ok",
                "model": self.server.model_meta,
            })
        else:
            self._error(404, f"no such endpoint: {self.path}")

    def do_POST(self):
        if self.path not in ("/api/v1/advise", "/api/v1/validate"):
            self._error(404, f"no such endpoint: {self.path}")
            return
        try:
            obj = json.loads(self._read_body())
        except json.JSONDecodeError as exc:
            self._error(400, f"malformed JSON: {exc}")
            return
        try:
            view = view_from_dict(obj)
        except ViewSchemaError as exc:
            self._error(422, str(exc), exc.field)
            return
        violations = validate_view(view)
        if self.path == "/api/v1/validate":
            self._send_json(200, {
                "api_version": API_VERSION,
                "violations": [
                    {"rule": v.rule, "location": v.location, "message": v.message}
                    for v in violations
                ],
            })
            return
        if violations:
            v = violations[0]
            self._error(422, v.message, v.location)
            return
        try:
            result = advise(view, self.server.model)
        except FeatureSchemaMismatch as exc:
            self._error(422, str(exc), "model")
            return
        except Exception as exc:  # noqa: BLE001 - surface as HTTP 500
            self._error(500, f"internal error: {exc}")
            return
        self._send_json(200, advice_response_json(result, self.server.model_meta))


class AdvisorServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, model_path, port: int, host: str = "127.0.0.1"):
        self.model = load_model(model_path)
        self.model_meta = build_model_meta(self.model, model_checksum(model_path))
        super().__init__((host, port), AdvisorHandler)


def serve(model_path, port: int, host: str = "127.0.0.1"):
    """Run until terminated."""
    server = AdvisorServer(model_path, port, host)
    print(json.dumps({"listening": f"http://{host}:{server.server_address[1]}",
                      "model": server.model_meta}), file=sys.stderr)
    server.serve_forever()

"""Line-delimited JSON ingestion and emission of game logs.

Canonical record, one per line, fixed key order:

    {"game_id": str, "num_players": 5, "first_leader": int,
     "roles": [str x5],
     "missions": [{"index": int, "team_size": int,
                   "proposals": [{"leader": int, "team": [int],
                                  "votes": [str x5], "approved": bool}],
                   "fail_count": int|null, "succeeded": bool|null}],
     "winner": "Resistance"|"Spies",
     "assassination": {"shooter": int, "target": int, "correct": bool}|null}
"""

from __future__ import annotations

import io
import json
import os
from dataclasses import dataclass

from .game_model import (
    Assassination,
    GameLog,
    Mission,
    Proposal,
    canonicalize,
    validate_game,
)

STRICT = "strict"
LENIENT = "lenient"


class SchemaError(ValueError):
    def __init__(self, line: int, field: str, message: str):
        self.line = line
        self.field = field
        super().__init__(f"line {line}: field '{field}': {message}")


@dataclass(frozen=True)
class ParseFailure:
    line: int
    message: str


@dataclass(frozen=True)
class GameStream:
    games: tuple[GameLog, ...]
    source: str
    parse_errors: tuple[ParseFailure, ...] = ()


def _field(obj, key, types, line, path=""):
    name = f"{path}{key}"
    if key not in obj:
        raise SchemaError(line, name, "missing")
    value = obj[key]
    if types is not None and not isinstance(value, types):
        raise SchemaError(line, name, f"expected {types}, got {type(value).__name__}")
    if isinstance(value, bool) and types == int:
        raise SchemaError(line, name, "expected integer, got boolean")
    return value


def _int_field(obj, key, line, path=""):
    value = _field(obj, key, int, line, path)
    if isinstance(value, bool):
        raise SchemaError(line, f"{path}{key}", "expected integer, got boolean")
    return value


def game_from_dict(obj: dict, line: int = 0) -> GameLog:
    if not isinstance(obj, dict):
        raise SchemaError(line, "", "record is not a JSON object")
    missions = []
    raw_missions = _field(obj, "missions", list, line)
    for mi, mobj in enumerate(raw_missions):
        mpath = f"missions[{mi}]."
        if not isinstance(mobj, dict):
            raise SchemaError(line, f"missions[{mi}]", "not an object")
        proposals = []
        raw_props = _field(mobj, "proposals", list, line, mpath)
        for pi, pobj in enumerate(raw_props):
            ppath = f"{mpath}proposals[{pi}]."
            if not isinstance(pobj, dict):
                raise SchemaError(line, ppath[:-1], "not an object")
            proposals.append(Proposal(
                leader=_int_field(pobj, "leader", line, ppath),
                team=tuple(_field(pobj, "team", list, line, ppath)),
                votes=tuple(_field(pobj, "votes", list, line, ppath)),
                approved=_field(pobj, "approved", bool, line, ppath),
            ))
        fail_count = mobj.get("fail_count")
        if fail_count is not None and (isinstance(fail_count, bool) or not isinstance(fail_count, int)):
            raise SchemaError(line, f"{mpath}fail_count", "expected integer or null")
        succeeded = mobj.get("succeeded")
        if succeeded is not None and not isinstance(succeeded, bool):
            raise SchemaError(line, f"{mpath}succeeded", "expected boolean or null")
        missions.append(Mission(
            index=_int_field(mobj, "index", line, mpath),
            team_size=_int_field(mobj, "team_size", line, mpath),
            proposals=tuple(proposals),
            fail_count=fail_count,
            succeeded=succeeded,
        ))
    assassination = None
    if "assassination" not in obj:
        raise SchemaError(line, "assassination", "missing")
    if obj["assassination"] is not None:
        aobj = obj["assassination"]
        if not isinstance(aobj, dict):
            raise SchemaError(line, "assassination", "expected object or null")
        assassination = Assassination(
            shooter=_int_field(aobj, "shooter", line, "assassination."),
            target=_int_field(aobj, "target", line, "assassination."),
            correct=_field(aobj, "correct", bool, line, "assassination."),
        )
    return GameLog(
        game_id=_field(obj, "game_id", str, line),
        num_players=_int_field(obj, "num_players", line),
        first_leader=_int_field(obj, "first_leader", line),
        roles=tuple(_field(obj, "roles", list, line)),
        missions=tuple(missions),
        winner=_field(obj, "winner", str, line),
        assassination=assassination,
    )


def game_to_dict(log: GameLog) -> dict:
    return {
        "game_id": log.game_id,
        "num_players": log.num_players,
        "first_leader": log.first_leader,
        "roles": list(log.roles),
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
            for m in log.missions
        ],
        "winner": log.winner,
        "assassination": None if log.assassination is None else {
            "shooter": log.assassination.shooter,
            "target": log.assassination.target,
            "correct": log.assassination.correct,
        },
    }


def game_to_line(log: GameLog) -> str:
    return json.dumps(game_to_dict(log), separators=(",", ":"))


def parse_game_stream(data, strictness: str = LENIENT, source: str = "<memory>") -> GameStream:
    """Parse JSONL into validated, canonicalized games.

    Strict mode aborts on the first malformed line; lenient mode skips bad
    lines and records them in parse_errors.
    """
    if isinstance(data, bytes):
        text = data.decode("utf-8")
    else:
        text = data
    games: list[GameLog] = []
    errors: list[ParseFailure] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            if strictness == STRICT:
                raise SchemaError(lineno, "", f"malformed JSON: {exc}") from exc
            errors.append(ParseFailure(lineno, f"malformed JSON: {exc}"))
            continue
        try:
            log = game_from_dict(obj, lineno)
        except SchemaError as exc:
            if strictness == STRICT:
                raise
            errors.append(ParseFailure(lineno, str(exc)))
            continue
        violations = validate_game(log)
        if violations:
            msg = "; ".join(f"{v.rule}@{v.location}" for v in violations)
            if strictness == STRICT:
                raise SchemaError(lineno, violations[0].location, msg)
            errors.append(ParseFailure(lineno, msg))
            continue
        games.append(canonicalize(log))
    return GameStream(games=tuple(games), source=source, parse_errors=tuple(errors))


def read_game_stream(path, strictness: str = LENIENT) -> GameStream:
    with open(path, "rb") as fh:
        return parse_game_stream(fh.read(), strictness, source=os.fspath(path))


def filter_assassination_eligible(stream: GameStream) -> GameStream:
    """Keep exactly the games that reached the assassination phase."""
    kept = tuple(
        g for g in stream.games
        if g.assassination is not None
        and sum(1 for m in g.missions if m.succeeded) == 3
    )
    return GameStream(games=kept, source=stream.source, parse_errors=stream.parse_errors)


def write_game_stream(stream: GameStream, destination) -> int:
    """Write one canonical JSON line per game; returns bytes written."""
    payload = "".join(game_to_line(g) + "\n" for g in stream.games).encode("utf-8")
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "wb") as fh:
            fh.write(payload)
    elif isinstance(destination, io.TextIOBase):
        destination.write(payload.decode("utf-8"))
    else:
        destination.write(payload)
    return len(payload)

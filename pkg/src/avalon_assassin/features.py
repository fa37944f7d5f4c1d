"""Feature encodings: the general 5x5x5x4 vote-history tensor and the
engineered per-seat statistic catalog.

Engineered statistics (per seat, computed over proposals in chronological
order; a team is CLEAN iff it contains no spy seat; spy seats are zeroed):

    f1  correct-vote count: approved a clean team or rejected a dirty one
    f2  correct-proposal count: proposals led by the seat with a clean team
    f3  first-full-clean flag: led the first clean proposal of the game
    f4  first-pick-correct flag: led >= 1 proposal and the first was clean
    f5  approved-membership count: approved proposals including the seat
    f6  successful-mission count: succeeded missions including the seat
    f7  majority-vote count: vote matched the proposal outcome
    f8  leadership count: proposals led
    f9  overruled-reject count: rejected proposals that were approved anyway
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .game_model import (
    APPROVE,
    NUM_PLAYERS,
    AssassinView,
    GameLog,
    assassin_view,
    canonicalize,
    merlin_seat,
    require_valid,
    resistance_mask,
    spy_seats,
)
from .log_ingest import GameStream

STAT_IDS = ("f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "f9")
DEFAULT_SUBSET = ("f1", "f2", "f3", "f4")

GENERAL_DIM = 5 * 5 * 5 * 4  # players x missions x proposals x channels


class EmptySubset(ValueError):
    pass


@dataclass(frozen=True)
class EngineeredFeatures:
    values: np.ndarray  # length 5 * |subset|, seat-major then statistic
    subset: tuple[str, ...]
    label: int | None


@dataclass(frozen=True)
class GeneralFeatures:
    values: np.ndarray  # length 500 in {-1, 0, +1}
    label: int | None


def normalize_subset(subset) -> tuple[str, ...]:
    ids = tuple(s for s in STAT_IDS if s in set(subset))
    if len(ids) != len(set(subset)):
        unknown = set(subset) - set(STAT_IDS)
        raise ValueError(f"unknown statistic ids: {sorted(unknown)}")
    if not ids:
        raise EmptySubset("feature subset must be non-empty")
    return ids


def raw_stat_table(view: AssassinView, strict_full_team: bool = False) -> np.ndarray:
    """(5, 9) table of engineered statistics *before* spy zeroing.

    strict_full_team narrows f3's "clean" to the full 3-resistance team.
    """
    spies = view.spy_seats
    table = np.zeros((NUM_PLAYERS, len(STAT_IDS)), dtype=np.int64)
    first_pick_seen = [False] * NUM_PLAYERS
    first_clean_claimed = False

    for mission in view.missions:
        for prop in mission.proposals:
            clean = not any(s in spies for s in prop.team)
            full_clean = clean and (not strict_full_team or len(prop.team) == 3)
            leader = prop.leader
            for seat in range(NUM_PLAYERS):
                vote = prop.votes[seat]
                approved = prop.approved
                if (clean and vote == APPROVE) or (not clean and vote != APPROVE):
                    table[seat, 0] += 1  # f1
                if (vote == APPROVE) == approved:
                    table[seat, 6] += 1  # f7
                if approved and vote != APPROVE:
                    table[seat, 8] += 1  # f9
                if approved and seat in prop.team:
                    table[seat, 4] += 1  # f5
            if clean:
                table[leader, 1] += 1  # f2
            if full_clean and not first_clean_claimed:
                table[leader, 2] = 1  # f3
                first_clean_claimed = True
            if not first_pick_seen[leader]:
                first_pick_seen[leader] = True
                if clean:
                    table[leader, 3] = 1  # f4
            table[leader, 7] += 1  # f8
        if mission.succeeded:
            for seat in mission.proposals[-1].team:
                table[seat, 5] += 1  # f6
    return table


def stat_table(view: AssassinView, strict_full_team: bool = False) -> np.ndarray:
    """Engineered statistics with spy seats zeroed."""
    table = raw_stat_table(view, strict_full_team)
    for seat in view.spy_seats:
        table[seat, :] = 0
    return table


def engineered_stat(view: AssassinView, seat: int, stat_id: str,
                    strict_full_team: bool = False) -> int:
    if view.first_leader != 0:
        raise ValueError("view must be canonical (first_leader == 0)")
    if stat_id not in STAT_IDS:
        raise ValueError(f"unknown statistic id: {stat_id}")
    return int(stat_table(view, strict_full_team)[seat, STAT_IDS.index(stat_id)])


def engineered_features(view: AssassinView, subset=DEFAULT_SUBSET,
                        label: int | None = None,
                        strict_full_team: bool = False) -> EngineeredFeatures:
    if view.first_leader != 0:
        raise ValueError("view must be canonical (first_leader == 0)")
    ids = normalize_subset(subset)
    cols = [STAT_IDS.index(s) for s in ids]
    table = stat_table(view, strict_full_team)
    values = table[:, cols].reshape(-1).astype(np.float64)
    return EngineeredFeatures(values=values, subset=ids, label=label)


def general_features(log: GameLog) -> GeneralFeatures:
    """The 5x5x5x4 tensor, flattened player-major; 0 marks proposals that
    never happened."""
    require_valid(log)
    if log.first_leader != 0:
        raise ValueError("log must be canonical (first_leader == 0)")
    spies = spy_seats(log)
    tensor = np.zeros((NUM_PLAYERS, 5, 5, 4), dtype=np.float64)
    for mission in log.missions:
        for p_index, prop in enumerate(mission.proposals):
            for seat in range(NUM_PLAYERS):
                tensor[seat, mission.index, p_index, 0] = 1.0 if seat == prop.leader else -1.0
                tensor[seat, mission.index, p_index, 1] = 1.0 if seat in prop.team else -1.0
                tensor[seat, mission.index, p_index, 2] = (
                    1.0 if prop.votes[seat] == APPROVE else -1.0
                )
                tensor[seat, mission.index, p_index, 3] = -1.0 if seat in spies else 1.0
    return GeneralFeatures(values=tensor.reshape(-1), label=merlin_seat(log))


def engineered_matrix(stream: GameStream, subset=DEFAULT_SUBSET,
                      strict_full_team: bool = False):
    """(X, y, masks) over a stream of canonical eligible games."""
    ids = normalize_subset(subset)
    rows, labels, masks = [], [], []
    for log in stream.games:
        feats = engineered_features(assassin_view(log), ids,
                                    label=merlin_seat(log),
                                    strict_full_team=strict_full_team)
        rows.append(feats.values)
        labels.append(feats.label)
        masks.append(resistance_mask(log))
    n = len(rows)
    X = np.vstack(rows) if rows else np.zeros((0, 5 * len(ids)))
    return X, np.asarray(labels, dtype=np.int64), np.asarray(masks, dtype=bool).reshape(n, NUM_PLAYERS)


def general_matrix(stream: GameStream):
    rows, labels, masks = [], [], []
    for log in stream.games:
        feats = general_features(log)
        rows.append(feats.values)
        labels.append(feats.label)
        masks.append(resistance_mask(log))
    n = len(rows)
    X = np.vstack(rows) if rows else np.zeros((0, GENERAL_DIM))
    return X, np.asarray(labels, dtype=np.int64), np.asarray(masks, dtype=bool).reshape(n, NUM_PLAYERS)


def engineered_header(subset=DEFAULT_SUBSET) -> list[str]:
    ids = normalize_subset(subset)
    return [f"s{seat}_{stat}" for seat in range(NUM_PLAYERS) for stat in ids]


def general_header() -> list[str]:
    names = []
    channels = ("leader", "team", "vote", "resistance")
    for p in range(NUM_PLAYERS):
        for m in range(5):
            for j in range(5):
                for c in channels:
                    names.append(f"p{p}_m{m}_j{j}_{c}")
    return names


def matrix_to_csv(X: np.ndarray, y: np.ndarray, header: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header + ["merlin_seat"])
    for row, label in zip(X, y):
        writer.writerow([_fmt(v) for v in row] + [int(label)])
    return buf.getvalue()


def _fmt(v: float):
    return int(v) if float(v).is_integer() else repr(float(v))

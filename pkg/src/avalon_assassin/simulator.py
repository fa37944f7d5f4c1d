"""Deterministic synthetic game generation with tunable information leakage.

Each game draws from its own RNG stream keyed by (seed, game_index), so a
game is reproducible regardless of how many games are generated around it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game_model import (
    APPROVE,
    ASSASSIN,
    MERLIN,
    MISSION_TEAM_SIZES,
    NUM_PLAYERS,
    REJECT,
    RESISTANCE_WIN,
    ROLES,
    SPY_WIN,
    Assassination,
    GameLog,
    Mission,
    Proposal,
    canonicalize,
    is_spy,
)
from .log_ingest import GameStream


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    num_games: int = 0
    merlin_leak: float = 0.0
    spy_sabotage: float = 0.3
    base_approve: float = 0.7
    eligible_only: bool = False

    def __post_init__(self):
        for name in ("merlin_leak", "spy_sabotage", "base_approve"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        if self.num_games < 0:
            raise ValueError("num_games must be >= 0")


def _propose_team(rng, leader, size, roles, spies, resistance, merlin_leak):
    if is_spy(roles[leader]):
        # spy leaders always self-deal one spy onto the team
        spy = int(rng.choice(sorted(spies)))
        others = [s for s in range(NUM_PLAYERS) if s != spy]
        rest = rng.choice(others, size=size - 1, replace=False)
        return tuple(sorted([spy, *map(int, rest)]))
    if roles[leader] == MERLIN and rng.random() < merlin_leak:
        team = rng.choice(sorted(resistance), size=size, replace=False)
        return tuple(sorted(map(int, team)))
    team = rng.choice(NUM_PLAYERS, size=size, replace=False)
    return tuple(sorted(map(int, team)))


def _vote(rng, seat, roles, team, spies, cfg: SimConfig, is_hammer: bool) -> str:
    if is_hammer:
        return APPROVE
    dirty = any(s in spies for s in team)
    role = roles[seat]
    if is_spy(role):
        return APPROVE if dirty else REJECT
    if role == MERLIN and rng.random() < cfg.merlin_leak:
        return REJECT if dirty else APPROVE
    return APPROVE if rng.random() < cfg.base_approve else REJECT


def simulate_game(config: SimConfig, game_index: int) -> GameLog:
    """Play out one rule-valid game; deterministic in (seed, game_index)."""
    rng = np.random.default_rng([config.seed, game_index])
    roles = tuple(rng.permutation(list(ROLES)))
    first_leader = int(rng.integers(NUM_PLAYERS))
    spies = frozenset(s for s, r in enumerate(roles) if is_spy(r))
    resistance = frozenset(range(NUM_PLAYERS)) - spies

    missions: list[Mission] = []
    successes = 0
    failures = 0
    proposal_counter = 0
    winner = None

    for m_index in range(5):
        size = MISSION_TEAM_SIZES[m_index]
        proposals: list[Proposal] = []
        approved_team = None
        for attempt in range(5):
            leader = (first_leader + proposal_counter) % NUM_PLAYERS
            proposal_counter += 1
            team = _propose_team(rng, leader, size, roles, spies, resistance,
                                 config.merlin_leak)
            is_hammer = attempt == 4
            votes = tuple(
                _vote(rng, seat, roles, team, spies, config, is_hammer)
                for seat in range(NUM_PLAYERS)
            )
            approved = sum(v == APPROVE for v in votes) >= 3
            proposals.append(Proposal(leader=leader, team=team, votes=votes,
                                      approved=approved))
            if approved:
                approved_team = team
                break
        if approved_team is None:
            # five rejections in a row: spies win outright
            missions.append(Mission(index=m_index, team_size=size,
                                    proposals=tuple(proposals),
                                    fail_count=None, succeeded=None))
            winner = SPY_WIN
            break
        fail_count = sum(
            1 for s in approved_team
            if s in spies and rng.random() < config.spy_sabotage
        )
        succeeded = fail_count == 0
        missions.append(Mission(index=m_index, team_size=size,
                                proposals=tuple(proposals),
                                fail_count=fail_count, succeeded=succeeded))
        if succeeded:
            successes += 1
        else:
            failures += 1
        if successes == 3 or failures == 3:
            break

    assassination = None
    if successes == 3:
        shooter = roles.index(ASSASSIN)
        # uniform shot stands in for the human assassin baseline
        target = int(rng.choice(sorted(resistance)))
        correct = roles[target] == MERLIN
        assassination = Assassination(shooter=shooter, target=target, correct=correct)
        winner = SPY_WIN if correct else RESISTANCE_WIN
    elif winner is None:
        winner = SPY_WIN

    return GameLog(
        game_id=f"sim-{config.seed}-{game_index}",
        num_players=NUM_PLAYERS,
        first_leader=first_leader,
        roles=roles,
        missions=tuple(missions),
        winner=winner,
        assassination=assassination,
    )


def simulate_dataset(config: SimConfig) -> GameStream:
    """Generate num_games games (post-filter when eligible_only), canonicalized."""
    games: list[GameLog] = []
    game_index = 0
    while len(games) < config.num_games:
        log = simulate_game(config, game_index)
        game_index += 1
        if config.eligible_only and log.assassination is None:
            continue
        games.append(canonicalize(log))
    return GameStream(games=tuple(games), source=f"sim:seed={config.seed}")

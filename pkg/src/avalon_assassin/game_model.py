"""Domain types and rule validation for 5-player Avalon games.

All downstream code assumes the canonical seat ordering produced by
:func:`canonicalize`: the first leader of the game sits at index 0 and
leadership advances by +1 mod 5 after every proposal.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

NUM_PLAYERS = 5
MAJORITY = 3  # strictly more than half of 5

MERLIN = "Merlin"
PERCIVAL = "Percival"
LOYAL_SERVANT = "LoyalServant"
ASSASSIN = "Assassin"
MORGANA = "Morgana"

ROLES = (MERLIN, PERCIVAL, LOYAL_SERVANT, ASSASSIN, MORGANA)
SPY_ROLES = frozenset({ASSASSIN, MORGANA})
RESISTANCE_ROLES = frozenset({MERLIN, PERCIVAL, LOYAL_SERVANT})

APPROVE = "Approve"
REJECT = "Reject"

RESISTANCE_WIN = "Resistance"
SPY_WIN = "Spies"

# Standard 5-player mission team sizes.
MISSION_TEAM_SIZES = (2, 3, 2, 3, 3)

MAX_PROPOSALS_PER_MISSION = 5


class InvalidGameError(ValueError):
    """Raised when an operation requires a rule-valid game log."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        lines = "; ".join(f"{v.rule}@{v.location}" for v in self.violations)
        super().__init__(f"invalid game log: {lines}")


@dataclass(frozen=True)
class Violation:
    rule: str
    location: str
    message: str


@dataclass(frozen=True)
class Proposal:
    leader: int
    team: tuple[int, ...]
    votes: tuple[str, ...]
    approved: bool


@dataclass(frozen=True)
class Mission:
    index: int
    team_size: int
    proposals: tuple[Proposal, ...]
    fail_count: int | None
    succeeded: bool | None


@dataclass(frozen=True)
class Assassination:
    shooter: int
    target: int
    correct: bool


@dataclass(frozen=True)
class GameLog:
    game_id: str
    num_players: int
    first_leader: int
    roles: tuple[str, ...]
    missions: tuple[Mission, ...]
    winner: str
    assassination: Assassination | None


@dataclass(frozen=True)
class AssassinView:
    """The assassin's legal information set: spies plus public history."""

    spy_seats: frozenset[int]
    first_leader: int
    missions: tuple[Mission, ...]


def is_spy(role: str) -> bool:
    return role in SPY_ROLES


def spy_seats(log: GameLog) -> frozenset[int]:
    return frozenset(s for s, r in enumerate(log.roles) if is_spy(r))


def resistance_mask(log: GameLog) -> tuple[bool, ...]:
    return tuple(not is_spy(r) for r in log.roles)


def merlin_seat(log: GameLog) -> int:
    return log.roles.index(MERLIN)


def _seat_ok(seat) -> bool:
    return isinstance(seat, int) and 0 <= seat < NUM_PLAYERS


def validate_game(log: GameLog) -> list[Violation]:
    """Check every rule-level invariant; violations are data, not errors."""
    out: list[Violation] = []

    def bad(rule, location, message):
        out.append(Violation(rule, location, message))

    if log.num_players != NUM_PLAYERS:
        bad("PlayerCount", "num_players", f"expected 5 players, got {log.num_players}")
    if sorted(log.roles) != sorted(ROLES):
        bad("RoleComposition", "roles", f"expected one of each role, got {log.roles}")
    if not _seat_ok(log.first_leader):
        bad("SeatRange", "first_leader", f"seat out of range: {log.first_leader}")
        return out  # leader rotation cannot be checked

    successes = 0
    failures = 0
    hammered_out = False
    proposal_counter = 0
    for m_pos, mission in enumerate(log.missions):
        loc = f"missions[{m_pos}]"
        if successes >= 3 or failures >= 3 or hammered_out:
            bad("Termination", loc, "mission recorded after the game already ended")
        if mission.index != m_pos:
            bad("MissionIndex", loc, f"index {mission.index} != position {m_pos}")
        expected_size = MISSION_TEAM_SIZES[m_pos] if m_pos < 5 else None
        if expected_size is not None and mission.team_size != expected_size:
            bad("TeamSize", loc, f"team_size {mission.team_size} != {expected_size}")
        if not 1 <= len(mission.proposals) <= MAX_PROPOSALS_PER_MISSION:
            bad("ProposalCount", loc, f"{len(mission.proposals)} proposals")

        approved_any = False
        for p_pos, prop in enumerate(mission.proposals):
            ploc = f"{loc}.proposals[{p_pos}]"
            expected_leader = (log.first_leader + proposal_counter) % NUM_PLAYERS
            if prop.leader != expected_leader:
                bad("LeaderRotation", ploc,
                    f"leader {prop.leader}, rotation requires {expected_leader}")
            proposal_counter += 1
            if len(set(prop.team)) != len(prop.team) or not all(_seat_ok(s) for s in prop.team):
                bad("SeatRange", ploc, f"bad team {prop.team}")
            if len(prop.team) != mission.team_size:
                bad("TeamSize", ploc,
                    f"team of {len(prop.team)} on a size-{mission.team_size} mission")
            if len(prop.votes) != NUM_PLAYERS or any(v not in (APPROVE, REJECT) for v in prop.votes):
                bad("VoteFormat", ploc, f"bad votes {prop.votes}")
                continue
            approvals = sum(v == APPROVE for v in prop.votes)
            # majority = strictly more than half; unreachable tie clause kept
            # for future even-player support
            tie = 2 * approvals == NUM_PLAYERS
            should_approve = approvals >= MAJORITY and not tie
            if prop.approved != should_approve:
                bad("MajorityRule", ploc,
                    f"approved={prop.approved} with {approvals} Approve votes")
            if prop.approved:
                if p_pos != len(mission.proposals) - 1:
                    bad("ApprovedPlacement", ploc, "approved proposal is not the last")
                approved_any = True

        if approved_any:
            if mission.fail_count is None or mission.succeeded is None:
                bad("MissionOutcome", loc, "approved mission missing outcome fields")
            else:
                team = mission.proposals[-1].team
                n_spies = sum(1 for s in team if s in spy_seats(log))
                if not 0 <= mission.fail_count <= n_spies:
                    bad("FailCount", loc,
                        f"fail_count {mission.fail_count} with {n_spies} spies on team")
                if mission.succeeded != (mission.fail_count == 0):
                    bad("MissionOutcome", loc,
                        f"succeeded={mission.succeeded} with fail_count={mission.fail_count}")
                if mission.fail_count == 0:
                    successes += 1
                else:
                    failures += 1
        else:
            if mission.fail_count is not None or mission.succeeded is not None:
                bad("MissionOutcome", loc, "unapproved mission carries outcome fields")
            if len(mission.proposals) == MAX_PROPOSALS_PER_MISSION:
                hammered_out = True
            else:
                bad("MissionIncomplete", loc,
                    "no approved proposal and fewer than 5 rejections")

    terminated = successes >= 3 or failures >= 3 or hammered_out
    if not terminated:
        bad("Termination", "missions", "game did not reach a termination condition")

    if successes >= 3:
        if log.assassination is None:
            bad("AssassinationRequired", "assassination",
                "3 missions succeeded but no assassination recorded")
        else:
            shot = log.assassination
            if not _seat_ok(shot.shooter) or not _seat_ok(shot.target):
                bad("SeatRange", "assassination", f"bad seats {shot.shooter},{shot.target}")
            elif log.roles[shot.shooter] != ASSASSIN:
                bad("AssassinationShooter", "assassination",
                    f"shooter seat {shot.shooter} is {log.roles[shot.shooter]}")
            if _seat_ok(shot.target) and sorted(log.roles) == sorted(ROLES):
                actually_correct = log.roles[shot.target] == MERLIN
                if shot.correct != actually_correct:
                    bad("AssassinationCorrectFlag", "assassination",
                        f"correct={shot.correct} but target role is {log.roles[shot.target]}")
            expected_winner = SPY_WIN if shot.correct else RESISTANCE_WIN
            if log.winner != expected_winner:
                bad("WinnerConsistency", "winner",
                    f"winner {log.winner} inconsistent with assassination")
    else:
        if log.assassination is not None:
            bad("AssassinationRequired", "assassination",
                "assassination recorded without 3 mission successes")
        if terminated and log.winner != SPY_WIN:
            bad("WinnerConsistency", "winner",
                "spies win on 3 failures or a 5-rejection round")

    return out


def require_valid(log: GameLog) -> GameLog:
    violations = validate_game(log)
    if violations:
        raise InvalidGameError(violations)
    return log


def _remap_proposal(prop: Proposal, perm) -> Proposal:
    votes = [None] * NUM_PLAYERS
    for seat, vote in enumerate(prop.votes):
        votes[perm(seat)] = vote
    return Proposal(
        leader=perm(prop.leader),
        team=tuple(sorted(perm(s) for s in prop.team)),
        votes=tuple(votes),
        approved=prop.approved,
    )


def canonicalize(log: GameLog) -> GameLog:
    """Relabel seats so the game's first leader sits at index 0.

    Clockwise order is preserved (seat k maps to (k - first_leader) mod 5);
    idempotent, and violations are preserved 1:1 under the permutation.
    """
    require_valid(log)
    shift = log.first_leader

    def perm(seat: int) -> int:
        return (seat - shift) % NUM_PLAYERS

    roles = [None] * NUM_PLAYERS
    for seat, role in enumerate(log.roles):
        roles[perm(seat)] = role
    missions = tuple(
        replace(m, proposals=tuple(_remap_proposal(p, perm) for p in m.proposals))
        for m in log.missions
    )
    assassination = log.assassination
    if assassination is not None:
        assassination = replace(
            assassination,
            shooter=perm(assassination.shooter),
            target=perm(assassination.target),
        )
    return replace(
        log,
        first_leader=0,
        roles=tuple(roles),
        missions=missions,
        assassination=assassination,
    )


def assassin_view(log: GameLog) -> AssassinView:
    """Project a log down to what the assassin legally knows."""
    require_valid(log)
    return AssassinView(
        spy_seats=spy_seats(log),
        first_leader=log.first_leader,
        missions=log.missions,
    )


def validate_view(view: AssassinView) -> list[Violation]:
    """Rule checks for a (possibly mid-game) assassin view."""
    out: list[Violation] = []

    def bad(rule, location, message):
        out.append(Violation(rule, location, message))

    if len(view.spy_seats) != 2 or not all(_seat_ok(s) for s in view.spy_seats):
        bad("SpySeats", "spy_seats", f"expected 2 valid spy seats, got {sorted(view.spy_seats)}")
    if not _seat_ok(view.first_leader):
        bad("SeatRange", "first_leader", f"seat out of range: {view.first_leader}")
        return out

    proposal_counter = 0
    for m_pos, mission in enumerate(view.missions):
        loc = f"missions[{m_pos}]"
        if mission.index != m_pos:
            bad("MissionIndex", loc, f"index {mission.index} != position {m_pos}")
        if m_pos < 5 and mission.team_size != MISSION_TEAM_SIZES[m_pos]:
            bad("TeamSize", loc, f"team_size {mission.team_size} != {MISSION_TEAM_SIZES[m_pos]}")
        for p_pos, prop in enumerate(mission.proposals):
            ploc = f"{loc}.proposals[{p_pos}]"
            expected_leader = (view.first_leader + proposal_counter) % NUM_PLAYERS
            if prop.leader != expected_leader:
                bad("LeaderRotation", ploc,
                    f"leader {prop.leader}, rotation requires {expected_leader}")
            proposal_counter += 1
            if len(set(prop.team)) != len(prop.team) or not all(_seat_ok(s) for s in prop.team):
                bad("SeatRange", ploc, f"bad team {prop.team}")
            if len(prop.team) != mission.team_size:
                bad("TeamSize", ploc,
                    f"team of {len(prop.team)} on a size-{mission.team_size} mission")
            if len(prop.votes) != NUM_PLAYERS or any(v not in (APPROVE, REJECT) for v in prop.votes):
                bad("VoteFormat", ploc, f"bad votes {prop.votes}")
                continue
            approvals = sum(v == APPROVE for v in prop.votes)
            if prop.approved != (approvals >= MAJORITY):
                bad("MajorityRule", ploc,
                    f"approved={prop.approved} with {approvals} Approve votes")
            if prop.approved and p_pos != len(mission.proposals) - 1:
                bad("ApprovedPlacement", ploc, "approved proposal is not the last")
        if mission.succeeded is not None and mission.fail_count is not None:
            if mission.succeeded != (mission.fail_count == 0):
                bad("MissionOutcome", loc,
                    f"succeeded={mission.succeeded} with fail_count={mission.fail_count}")
    return out

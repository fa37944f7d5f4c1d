import pytest

from avalon_assassin.game_model import (
    Assassination,
    GameLog,
    Mission,
    Proposal,
)

A = "Approve"
R = "Reject"


def proposal(leader, team, votes, approved):
    return Proposal(leader=leader, team=tuple(team), votes=tuple(votes),
                    approved=approved)


def make_g1():
    """Documented full game: 3 successes, assassination misses.

    Seats: 0 Merlin, 1 Percival, 2 LoyalServant, 3 Assassin, 4 Morgana.
    Canonical (first leader = seat 0).
    """
    missions = (
        Mission(0, 2, (
            proposal(0, [0, 1], [A, A, A, R, R], True),
        ), 0, True),
        Mission(1, 3, (
            proposal(1, [1, 2, 3], [R, A, A, A, R], True),
        ), 1, False),
        Mission(2, 2, (
            proposal(2, [2, 4], [R, R, A, R, A], False),
            proposal(3, [3, 4], [R, R, R, A, A], False),
            proposal(4, [0, 4], [R, A, R, R, A], False),
            proposal(0, [0, 2], [A, A, A, R, R], True),
        ), 0, True),
        Mission(3, 3, (
            proposal(1, [0, 1, 2], [A, A, A, R, R], True),
        ), 0, True),
    )
    return GameLog(
        game_id="G1",
        num_players=5,
        first_leader=0,
        roles=("Merlin", "Percival", "LoyalServant", "Assassin", "Morgana"),
        missions=missions,
        winner="Resistance",
        assassination=Assassination(shooter=3, target=1, correct=False),
    )


# Hand-traced engineered statistics for G1 (seat-major rows, f1..f9 columns;
# spy seats 3 and 4 zeroed). Derivation: see docs/fixture_g1.md.
G1_STATS = [
    [7, 2, 1, 1, 3, 3, 6, 2, 1],  # seat 0 (Merlin)
    [5, 1, 0, 0, 3, 2, 6, 2, 0],  # seat 1 (Percival)
    [5, 0, 0, 0, 3, 2, 6, 1, 0],  # seat 2 (LoyalServant)
    [0, 0, 0, 0, 0, 0, 0, 0, 0],  # seat 3 (Assassin)
    [0, 0, 0, 0, 0, 0, 0, 0, 0],  # seat 4 (Morgana)
]


@pytest.fixture
def g1():
    return make_g1()

"""Independent, deliberately naive recomputation of both feature encodings.

Kept free of any code from avalon_assassin.features: plain dicts and loops
over the raw log structure, used to freeze expected fixture values and to
cross-check the production path.
"""

STATS = ["f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "f9"]


def flat_proposals(log):
    out = []
    for mission in log.missions:
        for prop in mission.proposals:
            out.append((mission, prop))
    return out


def oracle_stats(log):
    """{seat: {stat: value}} with spy seats zeroed."""
    spies = {s for s, r in enumerate(log.roles) if r in ("Assassin", "Morgana")}
    stats = {seat: {s: 0 for s in STATS} for seat in range(5)}
    props = flat_proposals(log)

    def clean(prop):
        return all(s not in spies for s in prop.team)

    for seat in range(5):
        first_led = None
        for _, prop in props:
            vote = prop.votes[seat]
            if (clean(prop) and vote == "Approve") or (not clean(prop) and vote == "Reject"):
                stats[seat]["f1"] += 1
            if prop.leader == seat and clean(prop):
                stats[seat]["f2"] += 1
            if prop.leader == seat and first_led is None:
                first_led = prop
            if prop.approved and seat in prop.team:
                stats[seat]["f5"] += 1
            if (prop.approved and vote == "Approve") or (not prop.approved and vote == "Reject"):
                stats[seat]["f7"] += 1
            if prop.leader == seat:
                stats[seat]["f8"] += 1
            if prop.approved and vote == "Reject":
                stats[seat]["f9"] += 1
        if first_led is not None and clean(first_led):
            stats[seat]["f4"] = 1
    for _, prop in props:
        if clean(prop):
            stats[prop.leader]["f3"] = 1
            break
    for mission in log.missions:
        if mission.succeeded:
            for seat in mission.proposals[-1].team:
                stats[seat]["f6"] += 1
    for seat in spies:
        stats[seat] = {s: 0 for s in STATS}
    return stats


def oracle_engineered_vector(log, subset):
    stats = oracle_stats(log)
    return [stats[seat][s] for seat in range(5) for s in subset]


def oracle_general_vector(log):
    spies = {s for s, r in enumerate(log.roles) if r in ("Assassin", "Morgana")}
    values = []
    lookup = {}
    for mission in log.missions:
        for j, prop in enumerate(mission.proposals):
            lookup[(mission.index, j)] = prop
    for p in range(5):
        for m in range(5):
            for j in range(5):
                prop = lookup.get((m, j))
                if prop is None:
                    values += [0, 0, 0, 0]
                    continue
                values.append(1 if prop.leader == p else -1)
                values.append(1 if p in prop.team else -1)
                values.append(1 if prop.votes[p] == "Approve" else -1)
                values.append(-1 if p in spies else 1)
    return values

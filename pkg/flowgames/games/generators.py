"""
Seeded random instances for dynamics, demonstrations and property checks.

Every generator takes an explicit ``random.Random`` so results depend only on
the caller's seed.
"""

import random
from fractions import Fraction
from typing import Sequence

from flowgames.games.bbc import BBCInstance
from flowgames.games.bgp import BGPAssignment, BGPInstance, proper_suffixes
from flowgames.games.personalized import MatrixGame, MixProfile
from flowgames.games.prefgame import PreferenceGame, PrefProfile


def random_fraction(rng: random.Random, max_den: int, low=0, high=1) -> Fraction:
    """Uniform choice among ``p/q`` in ``[low, high]`` with ``q <= max_den``."""
    den = rng.randint(1, max_den)
    lo = int(Fraction(low) * den)
    hi = int(Fraction(high) * den)
    return Fraction(rng.randint(lo, hi), den)


def random_tie_classes(rng: random.Random, items: Sequence) -> list[list]:
    items = list(items)
    rng.shuffle(items)
    classes: list[list] = []
    for item in items:
        if classes and rng.random() < 0.3:
            classes[-1].append(item)
        else:
            classes.append([item])
    return classes


def random_preference_game(rng: random.Random, n_players: int) -> PreferenceGame:
    players = [f"p{k}" for k in range(1, n_players + 1)]
    prefs = {}
    for i in players:
        others = [j for j in players if j != i and rng.random() < 0.7]
        prefs[i] = random_tie_classes(rng, others + [i])
    return PreferenceGame(
        players=tuple(players),
        prefs={i: tuple(map(tuple, c)) for i, c in prefs.items()},
    )


def random_feasible_profile(
    rng: random.Random, game: PreferenceGame, max_den: int = 8
) -> PrefProfile:
    """Random profile that satisfies the sum and cap conditions."""
    selfs = {i: random_fraction(rng, max_den) for i in game.players}
    profile: PrefProfile = {}
    for i in game.players:
        remaining = 1 - selfs[i]
        dist = {}
        others = [j for j in game.players if j != i]
        rng.shuffle(others)
        for j in others:
            amount = min(selfs[j], remaining, random_fraction(rng, max_den))
            if amount > 0:
                dist[j] = amount
                remaining -= amount
        # leftover goes back to self, which only loosens the caps of others
        selfs[i] += remaining
        dist[i] = selfs[i]
        profile[i] = {j: w for j, w in dist.items() if w != 0}
    return profile


def random_bgp_instance(
    rng: random.Random, n_nodes: int, max_paths: int = 4, orphan_rate: float = 0.2
) -> BGPInstance:
    """
    DAG-shaped instance: node ``v_k`` only extends paths of ``v_j`` with ``j < k``.

    With probability ``orphan_rate`` a node also gets a two-hop path whose suffix
    is not listed by its start node.
    """
    nodes = [f"v{k}" for k in range(1, n_nodes + 1)]
    paths: dict[str, list[tuple[str, ...]]] = {}
    for k, v in enumerate(nodes):
        candidates: list[tuple[str, ...]] = [(v, "d")]
        for u in nodes[:k]:
            candidates.extend((v,) + path for path in paths[u])
            if rng.random() < orphan_rate and (u, "d") not in paths[u]:
                candidates.append((v, u, "d"))
        candidates = list(dict.fromkeys(candidates))
        rng.shuffle(candidates)
        paths[v] = candidates[: rng.randint(1, max_paths)]
    prefs = {
        v: random_tie_classes(rng, range(len(listed))) for v, listed in paths.items()
    }
    return BGPInstance(
        dest="d",
        paths={v: tuple(listed) for v, listed in paths.items()},
        prefs={v: tuple(map(tuple, c)) for v, c in prefs.items()},
    )


def random_bgp_assignment(
    rng: random.Random, inst: BGPInstance, max_den: int = 8
) -> BGPAssignment:
    """Random assignment clipped to the unity and tree conditions, node by node."""
    w: BGPAssignment = {}
    for v in inst.nodes:
        w[v] = {}
        budget = Fraction(1)
        used: dict[tuple[str, ...], Fraction] = {}
        order = list(range(len(inst.paths[v])))
        rng.shuffle(order)
        for k in order:
            room = min(budget, random_fraction(rng, max_den))
            for suffix in proper_suffixes(inst.paths[v][k]):
                u = suffix[0]
                index = inst.path_index(u, suffix)
                if index is None:
                    cap = Fraction(0)
                else:
                    cap = w.get(u, {}).get(index, Fraction(0))
                room = min(room, cap - used.get(suffix, Fraction(0)))
            if room <= 0:
                continue
            w[v][k] = room
            budget -= room
            for suffix in proper_suffixes(inst.paths[v][k]):
                used[suffix] = used.get(suffix, Fraction(0)) + room
    return w


def random_bbc_instance(
    rng: random.Random, n_players: int, link_rate: float = 0.6
) -> BBCInstance:
    players = [f"u{k}" for k in range(1, n_players + 1)]
    nodes = players + ["d"]
    cost: dict[str, dict[str, int]] = {}
    lengths: dict[str, dict[tuple[str, str], int]] = {}
    for u in players:
        links = {
            v: rng.randint(1, 2) for v in nodes if v != u and rng.random() < link_rate
        }
        links.setdefault("d", rng.randint(1, 2))
        cost[u] = links
    for u in players:
        table = {}
        for x in players:
            for y in cost[x]:
                table[(x, y)] = rng.randint(1, 5)
        lengths[u] = table
    budget = {u: rng.randint(0, 2) for u in players}
    largest = max((v for t in lengths.values() for v in t.values()), default=0)
    return BBCInstance(
        nodes=tuple(nodes),
        dest="d",
        cost=cost,
        budget=budget,
        lengths=lengths,
        M=len(nodes) * largest + 1,
    )


def random_matrix_game(
    rng: random.Random, sizes: Sequence[int], max_den: int = 4, high: int = 3
) -> MatrixGame:
    players = [f"P{k}" for k in range(1, len(sizes) + 1)]
    strategies = {
        i: tuple(f"s{k}_{m}" for m in range(1, size + 1))
        for k, (i, size) in enumerate(zip(players, sizes), start=1)
    }
    game = MatrixGame(players=tuple(players), strategies=strategies)
    utilities = {
        i: {e: random_fraction(rng, max_den, 0, high) for e in game.hyperedges()}
        for i in players
    }
    return MatrixGame(
        players=tuple(players), strategies=strategies, utilities=utilities
    )


def random_mix_profile(
    rng: random.Random, game: MatrixGame, max_den: int = 6
) -> MixProfile:
    profile: MixProfile = {}
    for i in game.players:
        raw = [Fraction(rng.randint(0, max_den)) for _ in game.strategies[i]]
        if sum(raw) == 0:
            raw[rng.randrange(len(raw))] = Fraction(1)
        total = sum(raw)
        profile[i] = {
            s: r / total for s, r in zip(game.strategies[i], raw) if r != 0
        }
    return profile

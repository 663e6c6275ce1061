"""Reductions out of preference games: to fractional BGP and to fractional BBC."""

import logging

from flowgames.games.bbc import BBCInstance
from flowgames.games.bgp import BGPInstance
from flowgames.games.prefgame import PlayerId, PreferenceGame
from flowgames.reductions.artifact import ReductionArtifact

logger = logging.getLogger(__name__)


def fresh_name(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "'"
    return name


def eligible_targets(game: PreferenceGame, i: PlayerId) -> list[PlayerId]:
    """Players ``j`` with ``j >=_i i`` in preference order, ``i`` last in its class."""
    own = game.rank(i, i)
    ordered: list[PlayerId] = []
    for cls in game.classes(i)[: own + 1]:
        ordered.extend(j for j in cls if j != i)
    ordered.append(i)
    return ordered


def preference_count(game: PreferenceGame, i: PlayerId, k: PlayerId) -> int:
    """Number of players ``j`` with ``j >=_i k``."""
    level = game.rank(i, k)
    return sum(1 for j in game.players if game.rank(i, j) <= level)


def pref_to_bgp(game: PreferenceGame) -> ReductionArtifact:
    """
    One BGP node per player and a fresh destination.

    Player ``i`` may route over ``(i, j, d)`` for every ``j`` it likes at least
    as much as itself and over the direct path ``(i, d)``, ranked like the players.
    """
    dest = fresh_name("d", set(game.players))
    paths: dict[str, tuple[tuple[str, ...], ...]] = {}
    prefs: dict[str, tuple[tuple[int, ...], ...]] = {}
    table: dict[tuple[str, str], tuple[str, int]] = {}
    for i in game.players:
        targets = eligible_targets(game, i)
        listed = tuple((i, dest) if j == i else (i, j, dest) for j in targets)
        classes: dict[int, list[int]] = {}
        for index, j in enumerate(targets):
            classes.setdefault(game.rank(i, j), []).append(index)
            table[(i, j)] = (i, index)
        paths[i] = listed
        prefs[i] = tuple(tuple(members) for _, members in sorted(classes.items()))

    inst = BGPInstance(dest=dest, paths=paths, prefs=prefs)
    logger.debug(
        "Preference game with %s players reduced to BGP with %s paths",
        len(game.players),
        sum(len(p) for p in paths.values()),
    )
    return ReductionArtifact(
        source_kind="preference",
        source=game,
        target_kind="bgp",
        target=inst,
        forward_table=table,
        source_owners=game.players,
        target_owners=inst.nodes,
    )


def pref_to_bbc(game: PreferenceGame) -> ReductionArtifact:
    """
    Unit costs and budgets; player ``i`` measures ``(i, j)`` by how many players
    it likes at least as much as ``j``, so cheap flows follow its preferences.
    """
    players = game.players
    dest = fresh_name("d", set(players))
    nodes = players + (dest,)
    far = len(players) + 1
    cost = {i: {v: 1 for v in nodes if v != i} for i in players}
    budget = {i: 1 for i in players}
    lengths: dict[str, dict[tuple[str, str], int]] = {}
    for i in players:
        table: dict[tuple[str, str], int] = {}
        for x in players:
            for y in nodes:
                if y == x:
                    continue
                if x == i and y == dest:
                    table[(x, y)] = 1 + preference_count(game, i, i)
                elif x == i:
                    table[(x, y)] = preference_count(game, i, y)
                elif y == dest:
                    table[(x, y)] = 1
                else:
                    table[(x, y)] = far
        lengths[i] = table
    largest = max((v for t in lengths.values() for v in t.values()), default=1)
    inst = BBCInstance(
        nodes=nodes,
        dest=dest,
        cost=cost,
        budget=budget,
        lengths=lengths,
        M=len(nodes) * largest + 1,
    )

    forward: dict[tuple[str, str], tuple[str, str]] = {}
    for i in players:
        for j in players:
            forward[(i, j)] = (i, dest if j == i else j)
    return ReductionArtifact(
        source_kind="preference",
        source=game,
        target_kind="bbc",
        target=inst,
        forward_table=forward,
        source_owners=players,
        target_owners=players,
    )

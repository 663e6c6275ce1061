"""Reductions of fractional BGP and fractional BBC to personalized matrix games."""

import itertools
import logging
from fractions import Fraction
from typing import Sequence

import networkx as nx

from flowgames.errors.exceptions import PreconditionError
from flowgames.games.bbc import BBCInstance
from flowgames.games.bgp import BGPInstance, proper_suffixes
from flowgames.games.personalized import Hyperedge, MatrixGame
from flowgames.reductions.artifact import ReductionArtifact
from flowgames.reductions.pref_reductions import fresh_name

logger = logging.getLogger(__name__)

NO_PATH = "none"
PAD_STRATEGY = "idle"
MATRIX_SIZE_LIMIT = 4096


def path_id(path: Sequence[str]) -> str:
    return ">".join(path)


def _check_size(strategies: dict[str, tuple[str, ...]]) -> None:
    size = 1
    for listed in strategies.values():
        size *= len(listed)
    if size > MATRIX_SIZE_LIMIT:
        raise PreconditionError(
            "Instance too large for an explicit matrix game",
            details={"hyperedges": size, "limit": MATRIX_SIZE_LIMIT},
        )


def _pad(players: list[str], strategies: dict[str, tuple[str, ...]]) -> str | None:
    """A one-strategy bystander keeps single-node instances at two players."""
    if len(players) >= 2:
        return None
    pad = fresh_name("pad", set(players))
    players.append(pad)
    strategies[pad] = (PAD_STRATEGY,)
    return pad


def bgp_to_matrix(inst: BGPInstance) -> ReductionArtifact:
    """
    One player per BGP node with one strategy per permitted path plus ``none``.

    A hyperedge pays ``v`` the amount ``q + 1`` for path ``P`` when every proper
    suffix of ``P`` is chosen by its start node in the same hyperedge, where
    ``q`` counts the paths ``v`` ranks no higher than ``P``. Everything else pays 0.
    """
    players = list(inst.nodes)
    strategies = {
        v: tuple(path_id(p) for p in inst.paths[v]) + (NO_PATH,) for v in inst.nodes
    }
    pad = _pad(players, strategies)
    _check_size(strategies)

    utilities: dict[str, dict[Hyperedge, Fraction]] = {v: {} for v in players}
    for v in inst.nodes:
        listed = inst.paths[v]
        for k, path in enumerate(listed):
            required = {v: path_id(path)}
            reachable = True
            for suffix in proper_suffixes(path):
                if inst.path_index(suffix[0], suffix) is None:
                    reachable = False
                    break
                required[suffix[0]] = path_id(suffix)
            if not reachable:
                continue
            level = inst.rank(v, k)
            q = sum(1 for m in range(len(listed)) if inst.rank(v, m) >= level)
            choices = [
                (required[u],) if u in required else strategies[u] for u in players
            ]
            for edge in itertools.product(*choices):
                utilities[v][edge] = Fraction(q + 1)

    game = MatrixGame(
        players=tuple(players), strategies=strategies, utilities=utilities
    )
    forward = {
        (v, k): (v, path_id(path))
        for v in inst.nodes
        for k, path in enumerate(inst.paths[v])
    }
    logger.debug("BGP instance reduced to a matrix game of size %s", game.size())
    return ReductionArtifact(
        source_kind="bgp",
        source=inst,
        target_kind="matrix",
        target=game,
        forward_table=forward,
        source_owners=inst.nodes,
        target_owners=game.players,
        slack={v: NO_PATH for v in inst.nodes},
        constants={pad: {PAD_STRATEGY: Fraction(1)}} if pad else {},
    )


def link_id(u: str, v: str) -> str:
    return f"{u}>{v}"


def _route_payoff(inst: BBCInstance, u: str, links: list[tuple[str, str]]) -> Fraction:
    graph = nx.DiGraph()
    graph.add_nodes_from(inst.nodes)
    for x, y in links:
        graph.add_edge(x, y, length=inst.length(u, x, y))
    try:
        distance = nx.shortest_path_length(graph, u, inst.dest, weight="length")
        return -Fraction(distance)
    except nx.NetworkXNoPath:
        return Fraction(-inst.M)


def bbc_to_matrix(inst: BBCInstance) -> ReductionArtifact:
    """
    One player per BBC node with one strategy per available link plus ``none``.

    A hyperedge pays ``u`` the negated length, under ``u``'s own lengths, of the
    shortest ``u``-to-destination path made of the links the hyperedge names,
    or ``-M`` when there is none.
    """
    players = list(inst.players)
    strategies = {
        u: tuple(link_id(u, v) for v in inst.links(u)) + (NO_PATH,)
        for u in inst.players
    }
    pad = _pad(players, strategies)
    _check_size(strategies)
    heads = {
        link_id(u, v): (u, v) for u in inst.players for v in inst.links(u)
    }

    utilities: dict[str, dict[Hyperedge, Fraction]] = {u: {} for u in players}
    for edge in itertools.product(*(strategies[u] for u in players)):
        links = [heads[s] for s in edge if s in heads]
        for u in inst.players:
            utilities[u][edge] = _route_payoff(inst, u, links)

    game = MatrixGame(
        players=tuple(players), strategies=strategies, utilities=utilities
    )
    forward = {
        (u, v): (u, link_id(u, v)) for u in inst.players for v in inst.links(u)
    }
    logger.debug("BBC instance reduced to a matrix game of size %s", game.size())
    return ReductionArtifact(
        source_kind="bbc",
        source=inst,
        target_kind="matrix",
        target=game,
        forward_table=forward,
        source_owners=inst.players,
        target_owners=game.players,
        slack={u: NO_PATH for u in inst.players},
        constants={pad: {PAD_STRATEGY: Fraction(1)}} if pad else {},
    )

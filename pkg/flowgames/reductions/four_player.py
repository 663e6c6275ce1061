"""
Graphical two-strategy games as four-player matrix games.

Nodes are first rewired so that every node has at most three neighbours and any
two nodes feeding the same node are adjacent; COPY nodes absorb the extra edges.
A proper 3-colouring then turns each colour class into one player holding two
strategies per node. A fourth player with one strategy per node index is paid
to synchronize the per-node masses of the first three players.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from flowgames.errors.exceptions import InputError, PreconditionError
from flowgames.games.personalized import Hyperedge, MatrixGame, MixProfile
from flowgames.reductions.pref_reductions import fresh_name

logger = logging.getLogger(__name__)

NodeId = str
Bits = tuple[int, ...]
PayoffTable = dict[tuple[int, Bits], Fraction]

COLOR_PLAYERS = ("P1", "P2", "P3")
SYNC_PLAYER = "P4"
MAX_DEGREE = 3
FOUR_PLAYER_SIZE_LIMIT = 50_000


@dataclass(frozen=True)
class GraphicalGame:
    """
    Two-strategy nodes, each paid by its own bit and the bits of at most two
    input nodes. ``payoffs[X][(own, inputs)]`` defaults to 0.
    """

    nodes: tuple[NodeId, ...]
    inputs: Mapping[NodeId, tuple[NodeId, ...]]
    payoffs: Mapping[NodeId, Mapping[tuple[int, Bits], Fraction]] = field(
        default_factory=dict
    )

    def __post_init__(self):
        nodes = tuple(self.nodes)
        known = set(nodes)
        if len(known) != len(nodes):
            raise InputError("Duplicate node id in graphical game")
        inputs: dict[NodeId, tuple[NodeId, ...]] = {}
        for x in nodes:
            listed = tuple(self.inputs.get(x, ()))
            if len(listed) > 2 or len(set(listed)) != len(listed):
                raise InputError(
                    "A node reads at most two distinct inputs", details={"node": x}
                )
            for y in listed:
                if y not in known or y == x:
                    raise InputError(
                        "Bad input reference", details={"node": x, "input": y}
                    )
            inputs[x] = listed
        payoffs: dict[NodeId, PayoffTable] = {x: {} for x in nodes}
        for x, table in self.payoffs.items():
            if x not in known:
                raise InputError("Payoffs for an unknown node", details={"node": x})
            for (own, bits), value in table.items():
                bits = tuple(bits)
                if own not in (0, 1) or len(bits) != len(inputs[x]) or any(
                    b not in (0, 1) for b in bits
                ):
                    raise InputError(
                        "Payoff entry does not match the node's inputs",
                        details={"node": x, "own": own, "inputs": list(bits)},
                    )
                payoffs[x][(own, bits)] = Fraction(value)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "payoffs", payoffs)

    def payoff(self, x: NodeId, own: int, bits: Bits) -> Fraction:
        return self.payoffs[x].get((own, bits), Fraction(0))


def _mass(profile: Mapping, player: str, strategies) -> Fraction:
    return sum((Fraction(profile[player].get(s, 0)) for s in strategies), Fraction(0))


@dataclass(frozen=True)
class SyncEquation:
    """``left`` player's mass on ``left_strategies`` equals ``right``'s on its own."""

    left: str
    left_strategies: tuple[str, ...]
    right: str
    right_strategies: tuple[str, ...]

    def residual(self, profile: Mapping[str, Mapping[str, Fraction]]) -> Fraction:
        return _mass(profile, self.left, self.left_strategies) - _mass(
            profile, self.right, self.right_strategies
        )


@dataclass(frozen=True)
class FourPlayerReduction:
    game: MatrixGame
    graph: GraphicalGame
    copies: dict[NodeId, NodeId]
    coloring: dict[NodeId, int]
    pairs: dict[str, tuple[NodeId, ...]]
    M: Fraction
    equations: tuple[SyncEquation, ...]

    @property
    def k(self) -> int:
        return len(self.pairs[COLOR_PLAYERS[0]])


def strategy_id(node: NodeId, bit: int) -> str:
    return f"{node}/{bit}"


def sync_id(s: int) -> str:
    return f"d{s}"


def _copy_payoffs() -> PayoffTable:
    return {(0, (0,)): Fraction(1), (1, (1,)): Fraction(1)}


class _Rewiring:
    """Mutable node graph used while inserting COPY nodes."""

    def __init__(self, game: GraphicalGame):
        self.order: list[NodeId] = list(game.nodes)
        self.inputs: dict[NodeId, list[NodeId]] = {
            x: list(game.inputs[x]) for x in game.nodes
        }
        self.payoffs: dict[NodeId, PayoffTable] = {
            x: dict(game.payoffs[x]) for x in game.nodes
        }
        self.copies: dict[NodeId, NodeId] = {}
        self.co_edges: set[frozenset[NodeId]] = set()

    def outputs(self, y: NodeId) -> list[NodeId]:
        return [x for x in self.order if y in self.inputs[x]]

    def degree(self, x: NodeId) -> int:
        co = sum(1 for e in self.co_edges if x in e)
        return len(self.inputs[x]) + len(self.outputs(x)) + co

    def adjacent(self, x: NodeId, y: NodeId) -> bool:
        return (
            x in self.inputs[y]
            or y in self.inputs[x]
            or frozenset((x, y)) in self.co_edges
        )

    def add_copy(self, source: NodeId) -> NodeId:
        name = fresh_name(f"{source}#copy", set(self.order))
        self.order.append(name)
        self.inputs[name] = [source]
        self.payoffs[name] = _copy_payoffs()
        self.copies[name] = self.copies.get(source, source)
        return name

    def redirect(self, reader: NodeId, old: NodeId, new: NodeId) -> None:
        self.inputs[reader] = [new if y == old else y for y in self.inputs[reader]]

    def split_outputs(self) -> None:
        for y in list(self.order):
            readers = self.outputs(y)
            if len(self.inputs[y]) + len(readers) <= MAX_DEGREE:
                continue
            feeder = y
            while readers:
                copy = self.add_copy(feeder)
                take = readers if len(readers) <= 2 else readers[:1]
                for x in take:
                    self.redirect(x, y, copy)
                readers = readers[len(take):]
                feeder = copy
            logger.debug("Node %s fans out through copies", y)

    def link_co_inputs(self) -> None:
        for z in list(self.order):
            if len(self.inputs[z]) != 2:
                continue
            x, y = self.inputs[z]
            if self.adjacent(x, y):
                continue
            for source in (x, y):
                if self.degree(source) >= MAX_DEGREE:
                    copy = self.add_copy(source)
                    self.redirect(z, source, copy)
            x, y = self.inputs[z]
            self.co_edges.add(frozenset((x, y)))

    def neighbours(self) -> dict[NodeId, set[NodeId]]:
        adj: dict[NodeId, set[NodeId]] = {x: set() for x in self.order}
        for x in self.order:
            for y in self.inputs[x]:
                adj[x].add(y)
                adj[y].add(x)
        for edge in self.co_edges:
            x, y = tuple(edge)
            adj[x].add(y)
            adj[y].add(x)
        return adj


def three_coloring(
    order: list[NodeId], adj: Mapping[NodeId, set[NodeId]]
) -> dict[NodeId, int]:
    """
    Backtracking proper colouring with three colours, first fit in ``order``.

    Raises:
        InputError: the graph is not 3-colourable.
    """
    colors: dict[NodeId, int] = {}

    def place(k: int) -> bool:
        if k == len(order):
            return True
        x = order[k]
        for c in range(len(COLOR_PLAYERS)):
            if all(colors.get(y) != c for y in adj[x]):
                colors[x] = c
                if place(k + 1):
                    return True
                del colors[x]
        return False

    if not place(0):
        raise InputError("Rewired graph is not 3-colourable")
    return colors


def _location(
    pairs: Mapping[str, tuple[NodeId, ...]],
) -> dict[str, tuple[int, NodeId, int]]:
    """Strategy id to (pair index, node, bit)."""
    found = {}
    for nodes in pairs.values():
        for s, node in enumerate(nodes):
            for bit in (0, 1):
                found[strategy_id(node, bit)] = (s, node, bit)
    return found


def graphical_to_four_player(game: GraphicalGame) -> FourPlayerReduction:
    """
    Build the four-player game.

    Each of P1..P3 keeps the graphical payoff of the node it plays, read off the
    nodes the other colour players play. On top of that P1..P3 earn ``M`` when
    their node index equals P4's index, and P4 earns ``M`` when its index is one
    past P1's node index, cyclically.

    Raises:
        InputError: empty game or a rewired graph that is not 3-colourable.
        PreconditionError: the resulting game is too large to tabulate.
    """
    if not game.nodes:
        raise InputError("Graphical game has no nodes")
    wiring = _Rewiring(game)
    wiring.split_outputs()
    wiring.link_co_inputs()
    rewired = GraphicalGame(
        nodes=tuple(wiring.order),
        inputs={x: tuple(wiring.inputs[x]) for x in wiring.order},
        payoffs=wiring.payoffs,
    )
    coloring = three_coloring(wiring.order, wiring.neighbours())

    classes = [
        [x for x in rewired.nodes if coloring[x] == c]
        for c in range(len(COLOR_PLAYERS))
    ]
    k = max(len(members) for members in classes)
    taken = set(rewired.nodes)
    pairs: dict[str, tuple[NodeId, ...]] = {}
    for player, members in zip(COLOR_PLAYERS, classes):
        padded = list(members)
        while len(padded) < k:
            pad = fresh_name(f"_pad{len(taken)}", taken)
            taken.add(pad)
            padded.append(pad)
        pairs[player] = tuple(padded)

    size = (2 * k) ** 3 * k
    if size > FOUR_PLAYER_SIZE_LIMIT:
        raise PreconditionError(
            "Four-player game too large to tabulate",
            details={"hyperedges": size, "limit": FOUR_PLAYER_SIZE_LIMIT},
        )
    strategies = {
        player: tuple(strategy_id(x, b) for x in nodes for b in (0, 1))
        for player, nodes in pairs.items()
    }
    strategies[SYNC_PLAYER] = tuple(sync_id(s) for s in range(k))
    values = [abs(v) for table in rewired.payoffs.values() for v in table.values()]
    M = 1 + max(values, default=Fraction(0))

    where = _location(pairs)
    players = COLOR_PLAYERS + (SYNC_PLAYER,)
    utilities: dict[str, dict[Hyperedge, Fraction]] = {p: {} for p in players}
    for edge in itertools.product(*(strategies[p] for p in players)):
        chosen = [where[s] for s in edge[:3]]
        played = {node: bit for _, node, bit in chosen}
        index = strategies[SYNC_PLAYER].index(edge[3])
        for c, (s, node, bit) in enumerate(chosen):
            value = Fraction(0)
            if node in coloring and all(y in played for y in rewired.inputs[node]):
                bits = tuple(played[y] for y in rewired.inputs[node])
                value = rewired.payoff(node, bit, bits)
            if s == index:
                value += M
            if value:
                utilities[COLOR_PLAYERS[c]][edge] = value
        if index == (chosen[0][0] + 1) % k:
            utilities[SYNC_PLAYER][edge] = M
    matrix = MatrixGame(players=players, strategies=strategies, utilities=utilities)

    equations: list[SyncEquation] = []
    for s in range(k):
        for player in COLOR_PLAYERS:
            equations.append(
                SyncEquation(
                    player,
                    strategies[player][2 * s : 2 * s + 2],
                    SYNC_PLAYER,
                    (sync_id(s),),
                )
            )
        equations.append(
            SyncEquation(
                SYNC_PLAYER,
                (sync_id((s + 1) % k),),
                COLOR_PLAYERS[0],
                strategies[COLOR_PLAYERS[0]][2 * s : 2 * s + 2],
            )
        )
    logger.info(
        "Graphical game with %s nodes became a 4-player game with k=%s and M=%s",
        len(game.nodes),
        k,
        M,
    )
    return FourPlayerReduction(
        game=matrix,
        graph=rewired,
        copies=dict(wiring.copies),
        coloring=coloring,
        pairs=pairs,
        M=M,
        equations=tuple(equations),
    )


def check_synchronizer(
    result: FourPlayerReduction, profile: Mapping[str, Mapping[str, Fraction]]
) -> list[SyncEquation]:
    """Equal-mass equations the profile violates."""
    return [eq for eq in result.equations if eq.residual(profile) != 0]


def project_to_graphical(
    result: FourPlayerReduction, profile: Mapping[str, Mapping[str, Fraction]]
) -> MixProfile:
    """
    Per-node mixed strategies of the rewired graph: a node's two masses scaled
    by the number of node pairs each player holds.
    """
    projected: MixProfile = {}
    for x in result.graph.nodes:
        player = COLOR_PLAYERS[result.coloring[x]]
        projected[x] = {
            str(b): result.k * Fraction(profile[player].get(strategy_id(x, b), 0))
            for b in (0, 1)
        }
    return projected

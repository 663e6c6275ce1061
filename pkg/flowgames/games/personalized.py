"""
Personalized equilibria of k-player matrix games.

A player's personalized payoff is the value of its best fractional hypergraph
matching whose marginals equal everyone's mixed strategies. A profile is a
personalized equilibrium when no player can raise that value by changing its
own marginal. For two players the best-response graph yields equilibria
directly from its cycles.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping

import networkx as nx

from flowgames.errors.exceptions import (
    InputError,
    InvariantViolation,
    PreconditionError,
)
from flowgames.numerics.flow import Arc, FlowNetwork
from flowgames.numerics.lp import LPBuilder, LPResult, Relation, Sense, solve_lp
from flowgames.numerics.rational import UNBOUNDED
from flowgames.text_utils import profile_key

logger = logging.getLogger(__name__)

PlayerId = str
StrategyId = str
Hyperedge = tuple[StrategyId, ...]
MixProfile = dict[PlayerId, dict[StrategyId, Fraction]]

ENUMERATION_SIZE_LIMIT = 64


@dataclass(frozen=True)
class MatrixGame:
    """
    Strategy sets and sparse per-player utilities over hyperedges.

    A hyperedge lists one strategy per player, in the order of ``players``.
    Missing utilities are 0.
    """

    players: tuple[PlayerId, ...]
    strategies: Mapping[PlayerId, tuple[StrategyId, ...]]
    utilities: Mapping[PlayerId, Mapping[Hyperedge, Fraction]] = field(
        default_factory=dict
    )

    def __post_init__(self):
        players = tuple(self.players)
        if len(players) < 2:
            raise InputError("A matrix game needs at least two players")
        if len(set(players)) != len(players):
            raise InputError("Duplicate player id in matrix game")
        strategies: dict[PlayerId, tuple[StrategyId, ...]] = {}
        for i in players:
            listed = tuple(self.strategies.get(i, ()))
            if not listed:
                raise InputError("Player has no strategies", details={"player": i})
            if len(set(listed)) != len(listed):
                raise InputError("Duplicate strategy id", details={"player": i})
            strategies[i] = listed
        utilities: dict[PlayerId, dict[Hyperedge, Fraction]] = {i: {} for i in players}
        for i, table in self.utilities.items():
            if i not in strategies:
                raise InputError(
                    "Utilities for an unknown player", details={"player": i}
                )
            for edge, value in table.items():
                edge = tuple(edge)
                self._validate_edge(edge, players, strategies)
                if value != 0:
                    utilities[i][edge] = Fraction(value)
        object.__setattr__(self, "players", players)
        object.__setattr__(self, "strategies", strategies)
        object.__setattr__(self, "utilities", utilities)

    @staticmethod
    def _validate_edge(edge: Hyperedge, players, strategies) -> None:
        if len(edge) != len(players):
            raise InputError(
                "Hyperedge must name one strategy per player",
                details={"edge": list(edge)},
            )
        for j, s in zip(players, edge):
            if s not in strategies[j]:
                raise InputError(
                    "Hyperedge names an unknown strategy",
                    details={"player": j, "strategy": s},
                )

    @property
    def k(self) -> int:
        return len(self.players)

    def size(self) -> int:
        total = 1
        for i in self.players:
            total *= len(self.strategies[i])
        return total

    def hyperedges(self) -> Iterator[Hyperedge]:
        return itertools.product(*(self.strategies[i] for i in self.players))

    def utility(self, i: PlayerId, edge: Hyperedge) -> Fraction:
        return self.utilities[i].get(edge, Fraction(0))

    def index(self, i: PlayerId) -> int:
        return self.players.index(i)


@dataclass(frozen=True)
class MatchingWeights:
    owner: PlayerId
    weights: dict[Hyperedge, Fraction]


@dataclass(frozen=True)
class PayoffResult:
    value: Fraction
    matching: MatchingWeights


@dataclass(frozen=True)
class PersonalizedReport:
    ok: bool
    witness: PlayerId | None = None
    payoff: Fraction | None = None
    best: Fraction | None = None


@dataclass(frozen=True)
class BestResponseGraph:
    rows: tuple[StrategyId, ...]
    cols: tuple[StrategyId, ...]
    graph: nx.DiGraph

    @property
    def edges(self) -> set[tuple[tuple[str, StrategyId], tuple[str, StrategyId]]]:
        return set(self.graph.edges())


@dataclass(frozen=True)
class CycleSolution:
    cycle: tuple[tuple[str, StrategyId], ...]
    profile: MixProfile


@dataclass(frozen=True)
class EnumerationResult:
    profiles: list[MixProfile]
    incomplete: bool
    lp_count: int


def check_mix_profile(game: MatrixGame, profile: Mapping) -> None:
    """Raise ``InputError`` unless each player has a distribution on its strategies."""
    for i in game.players:
        if i not in profile:
            raise InputError("Profile is missing a player", details={"player": i})
        total = Fraction(0)
        for s, p in profile[i].items():
            if s not in game.strategies[i]:
                raise InputError(
                    "Probability on an unknown strategy",
                    details={"player": i, "strategy": s},
                )
            if p < 0:
                raise InputError(
                    "Negative probability", details={"player": i, "strategy": s}
                )
            total += Fraction(p)
        if total != 1:
            raise InputError(
                "Probabilities must sum to 1",
                details={"player": i, "sum": str(total)},
            )
    for i in profile:
        if i not in game.strategies:
            raise InputError("Profile names an unknown player", details={"player": i})


def _prob(profile: Mapping, j: PlayerId, s: StrategyId) -> Fraction:
    return Fraction(profile[j].get(s, 0))


def _support_edges(
    game: MatrixGame, profile: Mapping, free: PlayerId | None = None
) -> list[Hyperedge]:
    """Hyperedges whose strategies all have positive probability, except ``free``'s."""
    choices = []
    for j in game.players:
        if j == free:
            choices.append(game.strategies[j])
        else:
            choices.append(
                tuple(s for s in game.strategies[j] if _prob(profile, j, s) > 0)
            )
    return list(itertools.product(*choices))


def _matching_lp(
    game: MatrixGame, profile: Mapping, i: PlayerId, release_own: bool
) -> tuple[LPResult, list[Hyperedge]]:
    edges = _support_edges(game, profile, free=i if release_own else None)
    builder = LPBuilder(sense=Sense.MAXIMIZE)
    builder.add_variables(edges)
    for position, j in enumerate(game.players):
        if release_own and j == i:
            continue
        for s in game.strategies[j]:
            p = _prob(profile, j, s)
            if p == 0:
                continue
            builder.add_constraint(
                {e: 1 for e in edges if e[position] == s}, Relation.EQ, p
            )
    builder.set_objective({e: game.utility(i, e) for e in edges})
    return solve_lp(builder.build()), edges


def personalized_payoff(
    game: MatrixGame, profile: Mapping, i: PlayerId
) -> PayoffResult:
    """
    Value of ``i``'s best hypergraph matching with all marginals fixed.

    Returns:
        PayoffResult with the LP optimum and the matching that attains it.
    """
    check_mix_profile(game, profile)
    result, edges = _matching_lp(game, profile, i, release_own=False)
    if not result.optimal or result.solution is None or result.value is None:
        raise InvariantViolation(
            "Product distribution must make the payoff LP feasible",
            details={"player": i},
        )
    weights = {e: result.solution[e] for e in edges if result.solution[e] > 0}
    return PayoffResult(result.value, MatchingWeights(i, weights))


def _best_response_plan(
    game: MatrixGame, profile: Mapping, i: PlayerId
) -> tuple[Fraction, dict[Hyperedge, Fraction]]:
    result, edges = _matching_lp(game, profile, i, release_own=True)
    if not result.optimal or result.solution is None or result.value is None:
        raise InvariantViolation(
            "Best-response LP must be feasible", details={"player": i}
        )
    plan = {e: result.solution[e] for e in edges if result.solution[e] > 0}
    return result.value, plan


def best_response_value(game: MatrixGame, profile: Mapping, i: PlayerId) -> Fraction:
    """Best matching value for ``i`` when only the other players' marginals bind."""
    check_mix_profile(game, profile)
    value, _ = _best_response_plan(game, profile, i)
    return value


def is_personalized_equilibrium(
    game: MatrixGame, profile: Mapping
) -> PersonalizedReport:
    check_mix_profile(game, profile)
    for i in game.players:
        payoff = personalized_payoff(game, profile, i).value
        best = best_response_value(game, profile, i)
        if payoff != best:
            logger.debug("Player %s payoff %s below best response %s", i, payoff, best)
            return PersonalizedReport(ok=False, witness=i, payoff=payoff, best=best)
    return PersonalizedReport(ok=True)


def _require_two_players(game: MatrixGame) -> None:
    if game.k != 2:
        raise InputError(
            "Operation is defined for two-player games only", details={"k": game.k}
        )


def _cell(game: MatrixGame, i: PlayerId, r: StrategyId, c: StrategyId) -> Fraction:
    return game.utility(i, (r, c))


def payoff_flow_network(game: MatrixGame, profile: Mapping, i: PlayerId) -> FlowNetwork:
    """
    Two-player payoff graph: a unit flow from ``r`` to ``c`` through row and
    column strategy nodes, with row and column capacities from the profile and
    negated rewards of ``i`` on the middle arcs.
    """
    _require_two_players(game)
    check_mix_profile(game, profile)
    row_player, col_player = game.players
    arcs: list[Arc] = []
    for r in game.strategies[row_player]:
        arcs.append(Arc("r", ("row", r), _prob(profile, row_player, r), Fraction(0)))
    for r in game.strategies[row_player]:
        for c in game.strategies[col_player]:
            arcs.append(Arc(("row", r), ("col", c), UNBOUNDED, -_cell(game, i, r, c)))
    for c in game.strategies[col_player]:
        arcs.append(Arc(("col", c), "c", _prob(profile, col_player, c), Fraction(0)))
    nodes = {"r", "c"}
    nodes |= {("row", r) for r in game.strategies[row_player]}
    nodes |= {("col", c) for c in game.strategies[col_player]}
    return FlowNetwork(
        nodes=frozenset(nodes),
        arcs=tuple(arcs),
        source="r",
        sink="c",
        demand=Fraction(1),
    )


def two_player_closed_form(game: MatrixGame, profile: Mapping, i: PlayerId) -> Fraction:
    """Best-response value of a two-player game: opponent mass times best reply."""
    _require_two_players(game)
    check_mix_profile(game, profile)
    row_player, col_player = game.players
    rows, cols = game.strategies[row_player], game.strategies[col_player]
    if i == row_player:
        return sum(
            (
                _prob(profile, col_player, c) * max(_cell(game, i, r, c) for r in rows)
                for c in cols
            ),
            Fraction(0),
        )
    return sum(
        (
            _prob(profile, row_player, r) * max(_cell(game, i, r, c) for c in cols)
            for r in rows
        ),
        Fraction(0),
    )


def build_best_response_graph(game: MatrixGame) -> BestResponseGraph:
    """
    Row ``r`` points to column ``c`` when ``r`` is a best reply of the row player
    to ``c``; column ``c`` points to row ``r`` when ``c`` is a best reply of the
    column player to ``r``. Ties keep every maximizer.
    """
    _require_two_players(game)
    row_player, col_player = game.players
    rows, cols = game.strategies[row_player], game.strategies[col_player]
    graph = nx.DiGraph()
    graph.add_nodes_from(("r", r) for r in rows)
    graph.add_nodes_from(("c", c) for c in cols)
    for c in cols:
        best = max(_cell(game, row_player, r, c) for r in rows)
        for r in rows:
            if _cell(game, row_player, r, c) == best:
                graph.add_edge(("r", r), ("c", c))
    for r in rows:
        best = max(_cell(game, col_player, r, c) for c in cols)
        for c in cols:
            if _cell(game, col_player, r, c) == best:
                graph.add_edge(("c", c), ("r", r))
    return BestResponseGraph(rows=rows, cols=cols, graph=graph)


def _node_order(brg: BestResponseGraph):
    order = {("r", r): (0, k) for k, r in enumerate(brg.rows)}
    order.update({("c", c): (1, k) for k, c in enumerate(brg.cols)})
    return order.__getitem__


def _cycle_solution(
    game: MatrixGame, brg: BestResponseGraph, cycle: list[tuple[str, StrategyId]]
) -> CycleSolution:
    key = _node_order(brg)
    start = min(range(len(cycle)), key=lambda k: key(cycle[k]))
    cycle = cycle[start:] + cycle[:start]
    row_player, col_player = game.players
    length = Fraction(len(cycle) // 2)
    profile: MixProfile = {
        row_player: {s: 1 / length for side, s in cycle if side == "r"},
        col_player: {s: 1 / length for side, s in cycle if side == "c"},
    }
    return CycleSolution(cycle=tuple(cycle), profile=profile)


def find_cycle_equilibrium(game: MatrixGame) -> CycleSolution:
    """
    Trim best-response-graph nodes without in- or out-edges, then walk the rest
    along the first successor until a node repeats.

    Raises:
        InvariantViolation: If trimming leaves nothing.
    """
    brg = build_best_response_graph(game)
    key = _node_order(brg)
    graph = brg.graph.copy()
    while True:
        dead = [v for v in graph if graph.in_degree(v) == 0 or graph.out_degree(v) == 0]
        if not dead:
            break
        graph.remove_nodes_from(dead)
    if graph.number_of_nodes() == 0:
        raise InvariantViolation("Trimmed best-response graph is empty")
    node = min(graph, key=key)
    walk: list[tuple[str, StrategyId]] = []
    seen: dict[tuple[str, StrategyId], int] = {}
    while node not in seen:
        seen[node] = len(walk)
        walk.append(node)
        node = min(graph.successors(node), key=key)
    solution = _cycle_solution(game, brg, walk[seen[node] :])
    logger.info("Found best-response cycle of length %s", len(solution.cycle))
    return solution


def decompose_into_cycles(
    game: MatrixGame, profile: Mapping
) -> list[tuple[CycleSolution, Fraction]]:
    """
    Write a two-player equilibrium as a convex combination of cycle profiles.

    Transportation plans supported on best-response edges are found for both
    players; together they form a circulation that is peeled cycle by cycle.

    Raises:
        PreconditionError: If no plan supported on best-response edges exists.
    """
    brg = build_best_response_graph(game)
    check_mix_profile(game, profile)
    row_player, col_player = game.players
    builder = LPBuilder()
    row_arcs = [(u, v) for u, v in brg.graph.edges() if u[0] == "r"]
    col_arcs = [(u, v) for u, v in brg.graph.edges() if u[0] == "c"]
    builder.add_variables(row_arcs + col_arcs)
    for r in brg.rows:
        mass = _prob(profile, row_player, r)
        for arcs, end in ((row_arcs, 0), (col_arcs, 1)):
            row = {a: 1 for a in arcs if a[end] == ("r", r)}
            builder.add_constraint(row, Relation.EQ, mass)
    for c in brg.cols:
        mass = _prob(profile, col_player, c)
        for arcs, end in ((row_arcs, 1), (col_arcs, 0)):
            row = {a: 1 for a in arcs if a[end] == ("c", c)}
            builder.add_constraint(row, Relation.EQ, mass)
    result = solve_lp(builder.build())
    if not result.optimal or result.solution is None:
        raise PreconditionError(
            "Profile has no transportation plan on best-response edges"
        )

    key = _node_order(brg)
    circulation = nx.DiGraph()
    for arc in sorted(row_arcs + col_arcs, key=lambda a: (key(a[0]), key(a[1]))):
        if result.solution[arc] > 0:
            circulation.add_edge(*arc, flow=result.solution[arc])

    parts: list[tuple[CycleSolution, Fraction]] = []
    while circulation.number_of_edges():
        source = min(circulation, key=key)
        edges = nx.find_cycle(circulation, source=source)
        amount = min(circulation.edges[u, v]["flow"] for u, v in edges)
        for u, v in edges:
            remaining = circulation.edges[u, v]["flow"] - amount
            if remaining == 0:
                circulation.remove_edge(u, v)
            else:
                circulation.edges[u, v]["flow"] = remaining
        circulation.remove_nodes_from(
            [v for v in list(circulation) if circulation.degree(v) == 0]
        )
        solution = _cycle_solution(game, brg, [u for u, _ in edges])
        parts.append((solution, amount * (len(edges) // 2)))
    logger.debug("Profile decomposed into %s cycles", len(parts))
    return parts


def _lp3_feasible(
    game: MatrixGame, player: PlayerId, negative: frozenset[Hyperedge]
) -> bool:
    """
    Is there an improving direction for ``player`` that may only decrease
    weight on ``negative``?

    The strict objective is decided by maximizing under a unit L1 budget.
    """
    builder = LPBuilder()
    coefficient: dict[Hyperedge, dict] = {}
    for e in game.hyperedges():
        if e in negative:
            builder.add_variables([("up", e), ("down", e)])
            coefficient[e] = {("up", e): 1, ("down", e): -1}
        else:
            builder.add_variable(("up", e))
            coefficient[e] = {("up", e): 1}
    own = game.index(player)
    for position, j in enumerate(game.players):
        if position == own:
            continue
        for s in game.strategies[j]:
            row: dict = {}
            for e, terms in coefficient.items():
                if e[position] == s:
                    for var, c in terms.items():
                        row[var] = row.get(var, 0) + c
            builder.add_constraint(row, Relation.EQ, 0)
    normalization = {var: 1 for terms in coefficient.values() for var in terms}
    builder.add_constraint(normalization, Relation.LE, 1)
    objective: dict = {}
    for e, terms in coefficient.items():
        u = game.utility(player, e)
        for var, c in terms.items():
            objective[var] = objective.get(var, 0) + c * u
    builder.set_objective(objective)
    result = solve_lp(builder.build())
    return result.optimal and result.value is not None and result.value > 0


@dataclass
class _Search:
    game: MatrixGame
    budget: int
    lp_count: int = 0
    incomplete: bool = False
    found: dict[tuple, MixProfile] = field(default_factory=dict)
    visited: set[frozenset] = field(default_factory=set)

    def spend(self) -> bool:
        if self.lp_count >= self.budget:
            self.incomplete = True
            return False
        self.lp_count += 1
        return True

    def probes(self) -> list[dict]:
        objectives: list[dict] = [{}]
        for edge in self.game.hyperedges():
            objectives.append(
                {("p", j, s): 1 for j, s in zip(self.game.players, edge)}
            )
        return objectives

    def solve_pinned(self, pins: frozenset, objective: dict) -> LPResult:
        game = self.game
        builder = LPBuilder()
        for j in game.players:
            builder.add_variables(("p", j, s) for s in game.strategies[j])
            builder.add_constraint(
                {("p", j, s): 1 for s in game.strategies[j]}, Relation.EQ, 1
            )
        edges = list(game.hyperedges())
        for owner in game.players:
            owned = [e for e in edges if (owner, e) not in pins]
            builder.add_variables(("w", owner, e) for e in owned)
            for position, j in enumerate(game.players):
                for s in game.strategies[j]:
                    row: dict = {("w", owner, e): 1 for e in owned if e[position] == s}
                    row[("p", j, s)] = -1
                    builder.add_constraint(row, Relation.EQ, 0)
        builder.set_objective(objective)
        return solve_lp(builder.build())

    def shrink(self, player: PlayerId, negative: frozenset) -> frozenset | None:
        if not self.spend():
            return None
        if not _lp3_feasible(self.game, player, negative):
            return None
        for e in sorted(negative):
            smaller = negative - {e}
            if not smaller or not self.spend():
                continue
            if _lp3_feasible(self.game, player, smaller):
                negative = smaller
        return negative

    def explore(self, pins: frozenset) -> None:
        if pins in self.visited:
            return
        self.visited.add(pins)
        game = self.game
        branches: set[frozenset] = set()
        vertices: dict[tuple, LPResult] = {}
        for objective in self.probes():
            if not self.spend():
                return
            result = self.solve_pinned(pins, objective)
            if not result.optimal or result.solution is None:
                return
            profile = _profile_from(game, result.solution)
            vertices.setdefault(profile_key(profile), result)
        for key, result in vertices.items():
            assert result.solution is not None
            profile = _profile_from(game, result.solution)
            report = is_personalized_equilibrium(game, profile)
            if report.ok:
                self.found.setdefault(key, profile)
                continue
            player = report.witness
            assert player is not None
            _, plan = _best_response_plan(game, profile, player)
            current = {
                e: result.solution.get(("w", player, e), Fraction(0))
                for e in game.hyperedges()
            }
            negative = frozenset(
                e for e in game.hyperedges() if plan.get(e, Fraction(0)) < current[e]
            )
            shrunk = self.shrink(player, negative)
            if shrunk is None:
                continue
            for e in sorted(shrunk):
                branches.add(pins | {(player, e)})
        for child in sorted(branches, key=lambda p: sorted(p)):
            self.explore(child)


def _profile_from(game: MatrixGame, solution: Mapping) -> MixProfile:
    return {
        j: {
            s: solution[("p", j, s)]
            for s in game.strategies[j]
            if solution[("p", j, s)] > 0
        }
        for j in game.players
    }


def enumerate_rational_equilibria(game: MatrixGame, budget: int) -> EnumerationResult:
    """
    Search pinned versions of the equilibrium system for rational equilibria.

    Each pinned system forces some owner's weight on some hyperedge to zero.
    Vertices of a system are probed with a zero objective and one objective per
    pure profile. A vertex that fails verification yields an improving direction
    for some player; its decreasing hyperedges are shrunk to a minimal set that
    still admits an improving direction, and the search branches on pinning
    each of them.

    Raises:
        PreconditionError: If the game has more than 64 hyperedges.
    """
    if game.size() > ENUMERATION_SIZE_LIMIT:
        raise PreconditionError(
            "Enumeration is limited to games with at most 64 hyperedges",
            details={"hyperedges": game.size()},
        )
    if budget < 1:
        raise InputError("Enumeration budget must be at least 1")
    search = _Search(game=game, budget=budget)
    search.explore(frozenset())
    profiles = [search.found[key] for key in sorted(search.found)]
    logger.info(
        "Enumerated %s equilibria with %s LP solves (incomplete=%s)",
        len(profiles),
        search.lp_count,
        search.incomplete,
    )
    return EnumerationResult(
        profiles=profiles, incomplete=search.incomplete, lp_count=search.lp_count
    )

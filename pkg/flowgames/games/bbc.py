"""
Fractional bounded budget connection (BBC) games.

Node ``u`` buys fractional capacities ``w_u(v)`` on its available links within
its budget. Its cost is a one-unit minimum-cost flow to the destination over
all bought capacities, measured with its own length function, where unrouted
demand pays the disconnection penalty ``M`` per unit.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Mapping

from flowgames.errors.exceptions import InputError, InvariantViolation
from flowgames.errors.handlers import run_rounds
from flowgames.numerics.flow import Arc, FlowNetwork, min_cost_flow
from flowgames.numerics.lp import LPBuilder, Relation, Sense, solve_lp
from flowgames.numerics.rational import UNBOUNDED

logger = logging.getLogger(__name__)

NodeId = str
Link = tuple[NodeId, NodeId]
BBCProfile = dict[NodeId, dict[NodeId, Fraction]]
PenaltyEdges = Literal["source", "all"]


@dataclass(frozen=True)
class BBCInstance:
    """
    Nodes, destination, link costs, budgets, per-node lengths and the penalty.

    A link ``(u, v)`` is available exactly when ``cost[u]`` lists ``v``. Missing
    lengths default to ``M``.
    """

    nodes: tuple[NodeId, ...]
    dest: NodeId
    cost: Mapping[NodeId, Mapping[NodeId, int]]
    budget: Mapping[NodeId, int]
    lengths: Mapping[NodeId, Mapping[Link, int]]
    M: int
    _max_length: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        nodes = tuple(self.nodes)
        known = set(nodes)
        if len(known) != len(nodes):
            raise InputError("Duplicate node id in BBC instance")
        if self.dest not in known:
            raise InputError("Destination is not a node", details={"dest": self.dest})
        for u, links in self.cost.items():
            if u not in known or u == self.dest:
                raise InputError("Link owner is not a player", details={"node": u})
            for v, c in links.items():
                if v not in known or v == u:
                    raise InputError(
                        "Link to an unknown node", details={"link": [u, v]}
                    )
                if int(c) != c or c < 0:
                    raise InputError(
                        "Link costs must be non-negative integers",
                        details={"link": [u, v], "cost": c},
                    )
        for u, b in self.budget.items():
            if u not in known:
                raise InputError("Budget for an unknown node", details={"node": u})
            if int(b) != b or b < 0:
                raise InputError(
                    "Budgets must be non-negative integers", details={"node": u}
                )
        largest = 0
        for u, table in self.lengths.items():
            if u not in known:
                raise InputError("Lengths for an unknown node", details={"node": u})
            for (x, y), length in table.items():
                if x not in known or y not in known:
                    raise InputError(
                        "Length for an unknown edge",
                        details={"node": u, "edge": [x, y]},
                    )
                if int(length) != length or length < 0:
                    raise InputError(
                        "Lengths must be non-negative integers",
                        details={"node": u, "edge": [x, y]},
                    )
                largest = max(largest, int(length))
        if self.M <= len(nodes) * largest:
            raise InputError(
                "Disconnection penalty must exceed n times the largest length",
                details={"M": self.M, "bound": len(nodes) * largest},
            )
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "_max_length", largest)

    @property
    def players(self) -> tuple[NodeId, ...]:
        return tuple(v for v in self.nodes if v != self.dest)

    def links(self, u: NodeId) -> tuple[NodeId, ...]:
        """Heads of the links available to ``u``, in node order."""
        available = self.cost.get(u, {})
        return tuple(v for v in self.nodes if v in available)

    def link_cost(self, u: NodeId, v: NodeId) -> int:
        return int(self.cost[u][v])

    def length(self, u: NodeId, x: NodeId, y: NodeId) -> int:
        return int(self.lengths.get(u, {}).get((x, y), self.M))


@dataclass(frozen=True)
class BudgetViolation:
    node: NodeId
    kind: str
    amount: Fraction


@dataclass(frozen=True)
class FlowOutcome:
    routed: Fraction
    routed_cost: Fraction
    penalty: Fraction
    arc_flows: dict[tuple[NodeId, NodeId], Fraction]

    @property
    def cost(self) -> Fraction:
        return self.routed_cost + self.penalty


@dataclass(frozen=True)
class BBCEquilibriumReport:
    ok: bool
    witness: NodeId | None = None
    current: Fraction | None = None
    best: Fraction | None = None
    violations: tuple[BudgetViolation, ...] = ()


@dataclass(frozen=True)
class BBCDynamicsResult:
    converged: bool
    profile: BBCProfile
    rounds: int


def _require_profile(inst: BBCInstance, profile: Mapping) -> None:
    for u, weights in profile.items():
        if u not in inst.players:
            raise InputError("Profile names an unknown node", details={"node": u})
        for v in weights:
            if v not in inst.cost.get(u, {}):
                raise InputError(
                    "Weight on an unavailable link", details={"link": [u, v]}
                )


def check_budgets(
    inst: BBCInstance, profile: Mapping[NodeId, Mapping[NodeId, Fraction]]
) -> list[BudgetViolation]:
    """Budget rows and the ``[0, 1]`` range of every bought capacity."""
    _require_profile(inst, profile)
    violations: list[BudgetViolation] = []
    for u in inst.players:
        weights = profile.get(u, {})
        spent = Fraction(0)
        for v, w in weights.items():
            w = Fraction(w)
            if w < 0:
                violations.append(BudgetViolation(u, "range", -w))
            elif w > 1:
                violations.append(BudgetViolation(u, "range", w - 1))
            spent += inst.link_cost(u, v) * w
        budget = inst.budget.get(u, 0)
        if spent > budget:
            violations.append(BudgetViolation(u, "budget", spent - budget))
    return violations


def _penalty_owners(inst: BBCInstance, u: NodeId, mode: PenaltyEdges) -> list[NodeId]:
    if mode == "all":
        return list(inst.players)
    return [u]


def flow_outcome(
    inst: BBCInstance,
    profile: Mapping[NodeId, Mapping[NodeId, Fraction]],
    u: NodeId,
    penalty_edges: PenaltyEdges = "source",
) -> FlowOutcome:
    """Min-cost unit flow from ``u`` split into routed part and penalty part."""
    if u == inst.dest:
        return FlowOutcome(Fraction(1), Fraction(0), Fraction(0), {})
    arcs: list[Arc] = []
    keys: list[tuple[NodeId, NodeId] | None] = []
    for x in inst.players:
        for y, w in sorted(profile.get(x, {}).items()):
            if w > 0:
                arcs.append(Arc(x, y, Fraction(w), Fraction(inst.length(u, x, y))))
                keys.append((x, y))
    for x in _penalty_owners(inst, u, penalty_edges):
        arcs.append(Arc(x, inst.dest, UNBOUNDED, Fraction(inst.M)))
        keys.append(None)
    net = FlowNetwork(
        nodes=frozenset(inst.nodes),
        arcs=tuple(arcs),
        source=u,
        sink=inst.dest,
        demand=Fraction(1),
    )
    result = min_cost_flow(net)
    if not result.feasible or result.flow is None:
        raise InvariantViolation(
            "Penalty edge must make every unit flow feasible", details={"node": u}
        )
    arc_flows: dict[tuple[NodeId, NodeId], Fraction] = {}
    penalty_flow = Fraction(0)
    routed_cost = Fraction(0)
    for index, key in enumerate(keys):
        f = result.flow[index]
        if key is None:
            penalty_flow += f
        elif f:
            arc_flows[key] = arc_flows.get(key, Fraction(0)) + f
            routed_cost += f * arcs[index].cost
    return FlowOutcome(
        routed=1 - penalty_flow,
        routed_cost=routed_cost,
        penalty=penalty_flow * inst.M,
        arc_flows=arc_flows,
    )


def utility(
    inst: BBCInstance,
    profile: Mapping[NodeId, Mapping[NodeId, Fraction]],
    u: NodeId,
    penalty_edges: PenaltyEdges = "source",
) -> Fraction:
    """Negated cost of ``u``'s one-unit min-cost flow to the destination."""
    return -flow_outcome(inst, profile, u, penalty_edges).cost


def best_response(
    inst: BBCInstance,
    profile: Mapping[NodeId, Mapping[NodeId, Fraction]],
    u: NodeId,
    penalty_edges: PenaltyEdges = "source",
) -> dict[NodeId, Fraction]:
    """
    Utility-maximizing capacities for ``u`` with everyone else fixed.

    One LP chooses the flow and ``u``'s capacities together under the budget
    row. The returned capacities are trimmed to the flow ``u`` actually sends on
    each of its links.
    """
    _require_profile(inst, profile)
    if u == inst.dest:
        return {}
    builder = LPBuilder(sense=Sense.MINIMIZE)
    objective: dict = {}
    out_arcs: dict[NodeId, list] = {v: [] for v in inst.nodes}
    in_arcs: dict[NodeId, list] = {v: [] for v in inst.nodes}

    def add_arc(var, x: NodeId, y: NodeId, cost: Fraction) -> None:
        builder.add_variable(var)
        out_arcs[x].append(var)
        in_arcs[y].append(var)
        objective[var] = cost

    for x in inst.players:
        if x == u:
            continue
        for y, w in sorted(profile.get(x, {}).items()):
            if w > 0:
                var = ("f", x, y)
                add_arc(var, x, y, Fraction(inst.length(u, x, y)))
                builder.add_constraint({var: 1}, Relation.LE, Fraction(w))
    budget_row: dict = {}
    for y in inst.links(u):
        flow_var, cap_var = ("f", u, y), ("w", y)
        add_arc(flow_var, u, y, Fraction(inst.length(u, u, y)))
        builder.add_variable(cap_var)
        builder.add_constraint({flow_var: 1, cap_var: -1}, Relation.LE, 0)
        builder.add_constraint({cap_var: 1}, Relation.LE, 1)
        budget_row[cap_var] = inst.link_cost(u, y)
    builder.add_constraint(budget_row, Relation.LE, inst.budget.get(u, 0))
    for x in _penalty_owners(inst, u, penalty_edges):
        add_arc(("g", x), x, inst.dest, Fraction(inst.M))
    for v in inst.nodes:
        balance: dict = {}
        for var in out_arcs[v]:
            balance[var] = balance.get(var, 0) + 1
        for var in in_arcs[v]:
            balance[var] = balance.get(var, 0) - 1
        rhs = 1 if v == u else (-1 if v == inst.dest else 0)
        builder.add_constraint(balance, Relation.EQ, rhs)
    builder.set_objective(objective)
    result = solve_lp(builder.build())
    if not result.optimal or result.solution is None:
        raise InvariantViolation(
            "Best-response LP must be solvable", details={"node": u}
        )
    response = {
        y: result.solution[("f", u, y)]
        for y in inst.links(u)
        if result.solution[("f", u, y)] > 0
    }
    logger.debug("BBC best response of %s has cost %s", u, result.value)
    return response


def with_strategy(
    profile: Mapping[NodeId, Mapping[NodeId, Fraction]],
    u: NodeId,
    strategy: Mapping[NodeId, Fraction],
) -> BBCProfile:
    updated = {x: dict(ws) for x, ws in profile.items()}
    updated[u] = dict(strategy)
    return updated


def is_equilibrium(
    inst: BBCInstance,
    profile: Mapping[NodeId, Mapping[NodeId, Fraction]],
    penalty_edges: PenaltyEdges = "source",
) -> BBCEquilibriumReport:
    violations = check_budgets(inst, profile)
    if violations:
        return BBCEquilibriumReport(
            ok=False, witness=violations[0].node, violations=tuple(violations)
        )
    for u in inst.players:
        current = utility(inst, profile, u, penalty_edges)
        response = best_response(inst, profile, u, penalty_edges)
        best = utility(inst, with_strategy(profile, u, response), u, penalty_edges)
        if best != current:
            logger.debug("Node %s improves from %s to %s", u, current, best)
            return BBCEquilibriumReport(ok=False, witness=u, current=current, best=best)
    return BBCEquilibriumReport(ok=True)


def connection_dynamics(
    inst: BBCInstance,
    init: Mapping[NodeId, Mapping[NodeId, Fraction]] | None = None,
    max_rounds: int = 200,
    penalty_edges: PenaltyEdges = "source",
) -> BBCDynamicsResult:
    """Round-robin dynamics where a node moves only on a strict utility gain."""
    profile: BBCProfile = {
        u: {v: Fraction(w) for v, w in (init or {}).get(u, {}).items() if w != 0}
        for u in inst.players
    }
    _require_profile(inst, profile)

    def play_round(round_number: int) -> bool:
        changed = False
        for u in inst.players:
            response = best_response(inst, profile, u, penalty_edges)
            candidate = with_strategy(profile, u, response)
            if utility(inst, candidate, u, penalty_edges) > utility(
                inst, profile, u, penalty_edges
            ):
                profile[u] = response
                changed = True
        return changed

    outcome = run_rounds(play_round, max_rounds)
    logger.info(
        "Connection dynamics converged=%s after %s rounds",
        outcome.converged,
        outcome.rounds,
    )
    return BBCDynamicsResult(outcome.converged, profile, outcome.rounds)

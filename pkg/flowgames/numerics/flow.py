"""
Exact minimum-cost flow by successive shortest paths.

Shortest paths are computed with Bellman-Ford on the residual graph, so arc
costs may be negative as long as the network has no negative cycle with spare
capacity. Capacities may be ``UNBOUNDED``.
"""

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable

from flowgames.errors.exceptions import InputError, InvariantViolation
from flowgames.numerics.lp import LinearProgram, LPBuilder, Relation, Sense
from flowgames.numerics.rational import UNBOUNDED, Capacity

logger = logging.getLogger(__name__)

NodeId = Hashable


class FlowStatus(str, enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class Arc:
    tail: NodeId
    head: NodeId
    capacity: Capacity
    cost: Fraction

    def residual(self, flow: Fraction) -> Capacity:
        if self.capacity is UNBOUNDED:
            return UNBOUNDED
        return self.capacity - flow


@dataclass(frozen=True)
class FlowNetwork:
    nodes: frozenset[NodeId]
    arcs: tuple[Arc, ...]
    source: NodeId
    sink: NodeId
    demand: Fraction

    def __post_init__(self):
        if self.source == self.sink:
            raise InputError(
                "Flow network source and sink must differ",
                details={"node": self.source},
            )
        for end in (self.source, self.sink):
            if end not in self.nodes:
                raise InputError("Unknown terminal node", details={"node": end})
        if self.demand < 0:
            raise InputError("Demand must be non-negative")
        for index, arc in enumerate(self.arcs):
            if arc.tail not in self.nodes or arc.head not in self.nodes:
                raise InputError(
                    "Arc references an unknown node", details={"arc": index}
                )
            if arc.capacity is not UNBOUNDED and arc.capacity < 0:
                raise InputError(
                    "Arc capacity must be non-negative",
                    details={"arc": index, "capacity": str(arc.capacity)},
                )


@dataclass(frozen=True)
class FlowResult:
    status: FlowStatus
    cost: Fraction | None = None
    flow: dict[int, Fraction] | None = None

    @property
    def feasible(self) -> bool:
        return self.status is FlowStatus.FEASIBLE


def _shortest_path(
    net: FlowNetwork, flow: list[Fraction]
) -> tuple[dict[NodeId, Fraction], dict[NodeId, tuple[int, int]]] | None:
    """
    Bellman-Ford over the residual graph.

    Returns distances and predecessor steps ``(arc index, +1 | -1)``, or None if
    a negative cycle is reachable from the source.
    """
    dist: dict[NodeId, Fraction] = {net.source: Fraction(0)}
    pred: dict[NodeId, tuple[int, int]] = {}

    def relax() -> bool:
        changed = False
        for index, arc in enumerate(net.arcs):
            residual = arc.residual(flow[index])
            if (residual is UNBOUNDED or residual > 0) and arc.tail in dist:
                candidate = dist[arc.tail] + arc.cost
                if arc.head not in dist or candidate < dist[arc.head]:
                    dist[arc.head] = candidate
                    pred[arc.head] = (index, 1)
                    changed = True
            if flow[index] > 0 and arc.head in dist:
                candidate = dist[arc.head] - arc.cost
                if arc.tail not in dist or candidate < dist[arc.tail]:
                    dist[arc.tail] = candidate
                    pred[arc.tail] = (index, -1)
                    changed = True
        return changed

    for _stage in range(len(net.nodes) - 1):
        if not relax():
            break
    else:
        if relax():
            return None
    return dist, pred


def min_cost_flow(net: FlowNetwork) -> FlowResult:
    """
    Ship ``net.demand`` units from source to sink at minimum cost.

    Returns an infeasible result when the demand exceeds the maximum flow.

    Raises:
        InputError: If a negative-cost cycle with spare capacity is reachable.
    """
    flow = [Fraction(0)] * len(net.arcs)
    remaining = net.demand
    augmentations = 0
    while remaining > 0:
        found = _shortest_path(net, flow)
        if found is None:
            if augmentations == 0:
                raise InputError(
                    "Flow network has a negative-cost cycle with spare capacity"
                )
            raise InvariantViolation("Negative residual cycle after augmentation")
        dist, pred = found
        if net.sink not in dist:
            logger.debug(
                "Flow infeasible: %s of %s units shipped",
                net.demand - remaining,
                net.demand,
            )
            return FlowResult(status=FlowStatus.INFEASIBLE)

        path: list[tuple[int, int]] = []
        node = net.sink
        while node != net.source:
            index, direction = pred[node]
            path.append((index, direction))
            arc = net.arcs[index]
            node = arc.tail if direction == 1 else arc.head

        amount = remaining
        for index, direction in path:
            if direction == 1:
                residual = net.arcs[index].residual(flow[index])
                if residual is not UNBOUNDED:
                    amount = min(amount, residual)
            else:
                amount = min(amount, flow[index])
        for index, direction in path:
            flow[index] += amount * direction
        remaining -= amount
        augmentations += 1

    cost = sum((arc.cost * flow[i] for i, arc in enumerate(net.arcs)), Fraction(0))
    logger.debug("Min-cost flow %s after %s augmentations", cost, augmentations)
    return FlowResult(
        status=FlowStatus.FEASIBLE,
        cost=cost,
        flow={i: f for i, f in enumerate(flow)},
    )


def flow_network_to_lp(net: FlowNetwork) -> LinearProgram:
    """Encode the min-cost flow problem as an LP over variables ``("f", arc)``."""
    builder = LPBuilder(sense=Sense.MINIMIZE)
    for index in range(len(net.arcs)):
        builder.add_variable(("f", index))
    for index, arc in enumerate(net.arcs):
        if arc.capacity is not UNBOUNDED:
            builder.add_constraint({("f", index): 1}, Relation.LE, arc.capacity)
    for node in sorted(net.nodes, key=repr):
        balance: dict[tuple[str, int], Fraction] = {}
        for index, arc in enumerate(net.arcs):
            if arc.tail == arc.head:
                continue
            if arc.tail == node:
                balance[("f", index)] = balance.get(("f", index), Fraction(0)) + 1
            if arc.head == node:
                balance[("f", index)] = balance.get(("f", index), Fraction(0)) - 1
        if node == net.source:
            rhs = net.demand
        elif node == net.sink:
            rhs = -net.demand
        else:
            rhs = Fraction(0)
        builder.add_constraint(balance, Relation.EQ, rhs)
    builder.set_objective({("f", i): arc.cost for i, arc in enumerate(net.arcs)})
    return builder.build()

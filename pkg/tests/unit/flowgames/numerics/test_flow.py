from fractions import Fraction

import pytest

from flowgames.errors.exceptions import InputError
from flowgames.numerics.flow import (
    Arc,
    FlowNetwork,
    FlowStatus,
    flow_network_to_lp,
    min_cost_flow,
)
from flowgames.numerics.lp import solve_lp
from flowgames.numerics.rational import UNBOUNDED


def _network(demand) -> FlowNetwork:
    return FlowNetwork(
        nodes=frozenset({"s", "a", "t"}),
        arcs=(
            Arc("s", "a", Fraction(2), Fraction(1)),
            Arc("a", "t", Fraction(2), Fraction(1)),
            Arc("s", "t", Fraction(1), Fraction(5)),
        ),
        source="s",
        sink="t",
        demand=Fraction(demand),
    )


def test_min_cost_flow_uses_cheap_path_first():
    result = min_cost_flow(_network(3))

    assert result.feasible
    assert result.cost == 9
    assert result.flow == {0: 2, 1: 2, 2: 1}


def test_min_cost_flow_fractional_demand():
    result = min_cost_flow(_network(Fraction(1, 2)))

    assert result.cost == 1
    assert result.flow[2] == 0


def test_min_cost_flow_reports_excess_demand():
    assert min_cost_flow(_network(4)).status is FlowStatus.INFEASIBLE


def test_min_cost_flow_matches_lp_encoding():
    net = _network(Fraction(5, 2))

    assert solve_lp(flow_network_to_lp(net)).value == min_cost_flow(net).cost


def test_unbounded_arc_carries_all_demand():
    net = FlowNetwork(
        nodes=frozenset({"s", "t"}),
        arcs=(Arc("s", "t", UNBOUNDED, Fraction(3)),),
        source="s",
        sink="t",
        demand=Fraction(7),
    )

    assert min_cost_flow(net).cost == 21


@pytest.mark.parametrize(
    "kwargs",
    [
        {"source": "s", "sink": "s"},
        {"source": "s", "sink": "missing"},
        {"source": "s", "sink": "t", "demand": Fraction(-1)},
    ],
)
def test_flow_network_rejects_bad_terminals(kwargs):
    params = {"demand": Fraction(1), **kwargs}
    with pytest.raises(InputError):
        FlowNetwork(nodes=frozenset({"s", "t"}), arcs=(), **params)

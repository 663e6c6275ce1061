from fractions import Fraction

import pytest

from flowgames.errors.exceptions import PreconditionError
from flowgames.games.bbc import BBCInstance
from flowgames.games.bgp import BGPInstance
from flowgames.reductions.artifact import Direction, map_solution
from flowgames.reductions.matrix_reductions import (
    NO_PATH,
    PAD_STRATEGY,
    bbc_to_matrix,
    bgp_to_matrix,
)


def test_bgp_matrix_pays_rank_when_suffix_is_chosen(two_hop_bgp):
    game = bgp_to_matrix(two_hop_bgp).target

    assert game.strategies["a"] == ("a>b>d", "a>d", NO_PATH)
    assert game.utility("a", ("a>b>d", "b>d")) == 3
    assert game.utility("a", ("a>b>d", NO_PATH)) == 0
    assert game.utility("a", ("a>d", NO_PATH)) == 2
    assert game.utility("b", (NO_PATH, "b>d")) == 2


def test_bgp_assignment_maps_with_slack(two_hop_bgp):
    red = bgp_to_matrix(two_hop_bgp)

    mapped = map_solution(
        red, Direction.FORWARD, {"a": {1: Fraction(1, 2)}, "b": {0: Fraction(1)}}
    )

    assert mapped == {
        "a": {"a>d": Fraction(1, 2), NO_PATH: Fraction(1, 2)},
        "b": {"b>d": 1},
    }
    assert map_solution(red, Direction.BACKWARD, mapped) == {
        "a": {1: Fraction(1, 2)},
        "b": {0: 1},
    }


def test_bbc_matrix_pays_negated_route_length(relay_bbc):
    game = bbc_to_matrix(relay_bbc).target

    assert game.strategies == {"u": ("u>v", "u>t", NO_PATH), "v": ("v>t", NO_PATH)}
    assert game.utility("u", ("u>v", "v>t")) == -2
    assert game.utility("u", ("u>t", NO_PATH)) == -1
    assert game.utility("u", (NO_PATH, "v>t")) == -10
    assert game.utility("v", ("u>v", "v>t")) == -1


def test_single_node_instance_gets_a_bystander():
    inst = BBCInstance(
        nodes=("u", "t"),
        dest="t",
        cost={"u": {"t": 1}},
        budget={"u": 1},
        lengths={"u": {("u", "t"): 1}},
        M=3,
    )

    red = bbc_to_matrix(inst)

    assert red.target.players == ("u", "pad")
    assert red.target.strategies["pad"] == (PAD_STRATEGY,)
    mapped = map_solution(red, Direction.FORWARD, {"u": {"t": Fraction(1)}})
    assert mapped["pad"] == {PAD_STRATEGY: 1}


def test_large_instances_are_refused():
    nodes = [f"v{k}" for k in range(7)]
    paths = {
        v: ((v, "d"),) + tuple((v, u, "d") for u in nodes if u != v) for v in nodes
    }

    with pytest.raises(PreconditionError):
        bgp_to_matrix(BGPInstance(dest="d", paths=paths))

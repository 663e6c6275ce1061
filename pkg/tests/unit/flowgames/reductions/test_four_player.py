from fractions import Fraction

import pytest

from flowgames.errors.exceptions import InputError
from flowgames.reductions.four_player import (
    SYNC_PLAYER,
    GraphicalGame,
    check_synchronizer,
    graphical_to_four_player,
    project_to_graphical,
)

HALF = Fraction(1, 2)
COPY = {(0, (0,)): Fraction(1), (1, (1,)): Fraction(1)}


@pytest.fixture
def copy_ring():
    return GraphicalGame(
        nodes=("A", "B", "C"),
        inputs={"A": ("C",), "B": ("A",), "C": ("B",)},
        payoffs={"A": COPY, "B": COPY, "C": COPY},
    )


def test_ring_of_copies_needs_one_pair_per_player(copy_ring):
    result = graphical_to_four_player(copy_ring)

    assert result.k == 1
    assert result.M == 2
    assert result.game.size() == 8
    assert result.pairs == {"P1": ("A",), "P2": ("B",), "P3": ("C",)}
    assert result.copies == {}


def test_uniform_profile_satisfies_synchronizer(copy_ring):
    result = graphical_to_four_player(copy_ring)
    profile = {
        "P1": {"A/0": HALF, "A/1": HALF},
        "P2": {"B/0": HALF, "B/1": HALF},
        "P3": {"C/0": HALF, "C/1": HALF},
        SYNC_PLAYER: {"d0": Fraction(1)},
    }

    assert check_synchronizer(result, profile) == []
    assert project_to_graphical(result, profile)["A"] == {"0": HALF, "1": HALF}


def test_color_player_is_paid_by_its_node_and_the_synchronizer(copy_ring):
    game = graphical_to_four_player(copy_ring).game

    assert game.utility("P2", ("A/1", "B/1", "C/0", "d0")) == 3
    assert game.utility("P2", ("A/1", "B/0", "C/0", "d0")) == 2
    assert game.utility(SYNC_PLAYER, ("A/1", "B/0", "C/0", "d0")) == 2


def test_fan_out_is_split_through_copies():
    readers = {f"X{k}": ("H",) for k in range(1, 5)}
    game = GraphicalGame(nodes=("H", *readers), inputs=readers)

    result = graphical_to_four_player(game)

    assert len(result.copies) == 3
    assert set(result.copies.values()) == {"H"}
    degree = {x: len(result.graph.inputs[x]) for x in result.graph.nodes}
    for x in result.graph.nodes:
        degree[x] += sum(1 for y in result.graph.nodes if x in result.graph.inputs[y])
    assert max(degree.values()) <= 3


def test_four_clique_cannot_be_colored():
    game = GraphicalGame(
        nodes=("A", "B", "C", "D"),
        inputs={"A": ("B", "C"), "B": ("C", "D"), "D": ("A", "C")},
    )
    with pytest.raises(InputError):
        graphical_to_four_player(game)


@pytest.mark.parametrize(
    "inputs",
    [{"A": ("A",)}, {"A": ("Z",)}, {"A": ("B", "B")}],
)
def test_graphical_game_rejects_bad_inputs(inputs):
    with pytest.raises(InputError):
        GraphicalGame(nodes=("A", "B"), inputs=inputs)

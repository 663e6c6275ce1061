"""Root test configuration: the bundled fixtures and small hand-checked games."""

from fractions import Fraction

import pytest

from flowgames.config import load_fixtures
from flowgames.games.bbc import BBCInstance
from flowgames.games.bgp import BGPInstance
from flowgames.games.personalized import MatrixGame
from flowgames.models.games import GameDocument, ProfileFile


@pytest.fixture(scope="session")
def fixtures():
    return load_fixtures()


@pytest.fixture
def non_convex_preference(fixtures):
    """The preference fixture as (game, first equilibrium, second equilibrium)."""
    fixture = fixtures["non_convex_preference"]
    game = GameDocument.model_validate(fixture["game"]).to_domain()
    w, w_prime = (
        ProfileFile.model_validate(p).to_domain()
        for p in fixture["equilibria"].values()
    )
    return game, w, w_prime


@pytest.fixture
def non_convex_matrix(fixtures):
    fixture = fixtures["non_convex_matrix"]
    game = GameDocument.model_validate(fixture["game"]).to_domain()
    pure_a, pure_b = (
        ProfileFile.model_validate(p).to_domain()
        for p in fixture["equilibria"].values()
    )
    return game, pure_a, pure_b


@pytest.fixture
def two_hop_bgp():
    """Node a prefers going through b over its direct path."""
    return BGPInstance(
        dest="d",
        paths={"a": (("a", "b", "d"), ("a", "d")), "b": (("b", "d"),)},
        prefs={"a": ((0,), (1,))},
    )


@pytest.fixture
def relay_bbc():
    """Node u reaches t cheaply only by buying capacity towards v."""
    return BBCInstance(
        nodes=("u", "v", "t"),
        dest="t",
        cost={"u": {"v": 1, "t": 2}, "v": {"t": 1}},
        budget={"u": 1, "v": 1},
        lengths={
            "u": {("u", "v"): 1, ("v", "t"): 1, ("u", "t"): 1},
            "v": {("v", "t"): 1},
        },
        M=10,
    )


@pytest.fixture
def matching_pennies():
    one = Fraction(1)
    return MatrixGame(
        players=("P1", "P2"),
        strategies={"P1": ("H", "T"), "P2": ("H", "T")},
        utilities={
            "P1": {("H", "H"): one, ("T", "T"): one},
            "P2": {("H", "T"): one, ("T", "H"): one},
        },
    )

from fractions import Fraction

import pytest

from flowgames.config import FlowgamesSettings
from flowgames.errors.exceptions import InputError, UnsupportedMethodError
from flowgames.services.solve_service import SolveService

HALF = Fraction(1, 2)


@pytest.fixture
def solver(settings):
    return SolveService(settings)


def test_preference_dynamics_reach_an_equilibrium(
    solver, verifier, non_convex_preference
):
    game, _, _ = non_convex_preference

    report, profiles = solver.solve("preference", game, "dynamics", seed=3)

    assert report.converged
    assert sorted(report.details["order"]) == sorted(game.players)
    assert verifier.verify("preference", game, profiles[0], 3).ok


def test_dynamics_order_depends_only_on_seed(solver, non_convex_preference):
    game, _, _ = non_convex_preference

    first, _ = solver.solve("preference", game, "dynamics", seed=11)
    second, _ = solver.solve("preference", game, "dynamics", seed=11)

    assert first.details["order"] == second.details["order"]


def test_bbc_dynamics_connect_the_relay(solver, relay_bbc):
    report, profiles = solver.solve("bbc", relay_bbc, "dynamics", seed=0)

    assert report.converged
    assert report.profiles == [{"u": {"v": "1"}, "v": {"t": "1"}}]


def test_round_limit_overrides_settings(solver, relay_bbc):
    report, _ = solver.solve("bbc", relay_bbc, "dynamics", seed=0, max_rounds=1)

    assert not report.converged
    assert report.rounds == 1


def test_cycle_method_solves_matching_pennies(solver, matching_pennies):
    report, profiles = solver.solve("matrix", matching_pennies, "cycle", seed=0)

    assert profiles == [{"P1": {"H": HALF, "T": HALF}, "P2": {"H": HALF, "T": HALF}}]
    assert report.details["cycle"] == ["r:H", "c:H", "r:T", "c:T"]


def test_enumeration_budget_comes_from_settings(matching_pennies):
    solver = SolveService(FlowgamesSettings(enumeration_budget=1))

    report, _ = solver.solve("matrix", matching_pennies, "enumerate", seed=0)

    assert report.incomplete
    assert report.lp_count == 1


@pytest.mark.parametrize(
    "kind, method", [("bgp", "cycle"), ("matrix", "dynamics"), ("bgp", "annealing")]
)
def test_unsupported_routes(solver, two_hop_bgp, kind, method):
    with pytest.raises(UnsupportedMethodError):
        solver.solve(kind, two_hop_bgp, method, seed=0)


def test_bbc_best_response_reports_new_utility(solver, relay_bbc):
    report = solver.best_response("bbc", relay_bbc, {}, "u", seed=0)

    assert report.profiles == [{"u": {"t": "1/2"}}]
    assert report.details["utility"] == "-11/2"


def test_matrix_best_response_reports_values(solver, matching_pennies):
    profile = {"P1": {"H": Fraction(1)}, "P2": {"H": Fraction(1)}}

    report = solver.best_response("matrix", matching_pennies, profile, "P2", 0)

    assert report.profiles == []
    assert report.details == {"player": "P2", "value": "1", "payoff": "0"}


def test_best_response_needs_known_player(solver, two_hop_bgp):
    with pytest.raises(InputError):
        solver.best_response("bgp", two_hop_bgp, {}, "z", seed=0)

import random
from fractions import Fraction

import pytest

from flowgames.errors.exceptions import InputError
from flowgames.games.generators import random_feasible_profile, random_preference_game
from flowgames.games.prefgame import (
    PreferenceGame,
    best_response,
    best_response_dynamics,
    check_feasible,
    is_equilibrium,
    is_eps_equilibrium,
    mix_profiles,
    self_profile,
)

HALF = Fraction(1, 2)


@pytest.fixture
def follower_game():
    """Player a wants to put weight on b; b only cares about itself."""
    return PreferenceGame.from_lists(["a", "b"], {"a": ["b", "a"], "b": ["b"]})


def test_unlisted_players_form_a_final_class():
    game = PreferenceGame.from_lists(["a", "b", "c"], {"a": [["c", "b"]]})

    assert game.classes("a") == (("b", "c"), ("a",))
    assert game.classes("b") == (("a", "b", "c"),)
    assert game.rank("a", "a") == 1


@pytest.mark.parametrize(
    "prefs",
    [
        {"z": ["a"]},
        {"a": ["z"]},
        {"a": ["b", "b"]},
        {"a": [[]]},
    ],
)
def test_malformed_preferences_are_rejected(prefs):
    with pytest.raises(InputError):
        PreferenceGame.from_lists(["a", "b"], prefs)


def test_check_feasible_reports_sum_and_cap_violations(follower_game):
    profile = {"a": {"b": Fraction(3, 4)}, "b": {"b": HALF}}

    report = check_feasible(follower_game, profile)

    assert not report.ok
    kinds = {(v.player, v.target): v.excess for v in report.violations}
    assert kinds[("a", None)] == Fraction(-1, 4)
    assert kinds[("a", "b")] == Fraction(1, 4)
    assert kinds[("b", None)] == -HALF


def test_best_response_is_proportional_to_caps():
    game = PreferenceGame.from_lists(
        ["a", "b", "c"], {"c": [["a", "b"]], "b": ["a", "b"]}
    )
    profile = {"a": {"a": 1}, "b": {"a": HALF, "b": HALF}, "c": {"c": 1}}

    assert best_response(game, profile, "c") == {
        "a": Fraction(2, 3),
        "b": Fraction(1, 3),
    }


def test_best_response_keeps_the_rest_on_itself(follower_game):
    profile = {"a": {"a": 1}, "b": {"b": Fraction(1, 3)}}

    assert best_response(follower_game, profile, "a") == {
        "b": Fraction(1, 3),
        "a": Fraction(2, 3),
    }


def test_fixture_equilibria_verify(non_convex_preference):
    game, w, w_prime = non_convex_preference

    assert is_equilibrium(game, w).ok
    assert is_equilibrium(game, w_prime).ok


def test_midpoint_of_fixture_equilibria_is_not_an_equilibrium(non_convex_preference):
    game, w, w_prime = non_convex_preference

    report = is_equilibrium(game, mix_profiles(w, w_prime, HALF))

    assert not report.ok
    assert report.witness.player == "x"
    assert report.witness.level == 1


def test_infeasible_profile_gets_witness_without_level(follower_game):
    report = is_equilibrium(follower_game, {"a": {"b": 1}, "b": {"b": HALF}})

    assert not report.ok
    assert report.witness.level is None
    assert report.violations


def test_eps_equilibrium_tolerates_small_shortfall(follower_game):
    profile = {
        "a": {"b": Fraction(99, 100), "a": Fraction(1, 100)},
        "b": {"b": 1},
    }

    assert not is_equilibrium(follower_game, profile).ok
    assert is_eps_equilibrium(follower_game, profile, Fraction(1, 10)).ok
    exact = is_eps_equilibrium(follower_game, profile, Fraction(0))
    assert [(v.player, v.target, v.condition) for v in exact.violations] == [
        ("a", "b", "c")
    ]


def test_eps_must_be_non_negative(follower_game):
    with pytest.raises(InputError):
        is_eps_equilibrium(follower_game, self_profile(follower_game), Fraction(-1))


@pytest.mark.parametrize("lam", [Fraction(-1), Fraction(3, 2)])
def test_mix_profiles_rejects_weights_outside_unit_interval(lam):
    profile = {"a": {"a": 1}}
    with pytest.raises(InputError):
        mix_profiles(profile, profile, lam)


def test_dynamics_on_fixture_converge_to_an_equilibrium(non_convex_preference):
    game, _, _ = non_convex_preference

    result = best_response_dynamics(game, self_profile(game))

    assert result.converged
    assert result.rounds == 2
    assert result.profile["a1"] == {"a2": 1}
    assert result.profile["x"] == {"x": 1}
    assert is_equilibrium(game, result.profile).ok


def test_dynamics_stop_at_round_limit(non_convex_preference):
    game, _, _ = non_convex_preference

    result = best_response_dynamics(game, self_profile(game), max_rounds=1)

    assert not result.converged
    assert result.rounds == 1


def test_dynamics_order_must_cover_every_player(follower_game):
    with pytest.raises(InputError):
        best_response_dynamics(follower_game, self_profile(follower_game), order=["a"])


@pytest.mark.parametrize("seed", range(5))
def test_best_response_against_feasible_profile_respects_caps(seed):
    rng = random.Random(seed)
    game = random_preference_game(rng, 4)
    profile = random_feasible_profile(rng, game)
    assert check_feasible(game, profile).ok

    for i in game.players:
        response = best_response(game, profile, i)
        assert sum(response.values()) == 1
        for j, w in response.items():
            if j != i:
                assert w <= profile[j].get(j, 0)


@pytest.mark.parametrize("eps", [Fraction(0), Fraction(1, 100), Fraction(1, 10)])
def test_exact_equilibria_are_eps_equilibria(non_convex_preference, eps):
    game, w, w_prime = non_convex_preference

    assert is_eps_equilibrium(game, w, eps).ok
    assert is_eps_equilibrium(game, w_prime, eps).ok


@pytest.mark.parametrize("eps", [Fraction(1, 100), Fraction(1, 10)])
@pytest.mark.parametrize(
    "delta",
    [Fraction(1, 200), Fraction(1, 100), Fraction(1, 20), Fraction(1, 10)],
)
def test_self_weight_shift_passes_iff_within_eps(non_convex_preference, eps, delta):
    game, w, _ = non_convex_preference
    shifted = dict(w)
    shifted["x"] = {"a1": HALF - delta, "b1": HALF, "x": delta}

    assert is_eps_equilibrium(game, shifted, eps).ok == (delta <= eps)

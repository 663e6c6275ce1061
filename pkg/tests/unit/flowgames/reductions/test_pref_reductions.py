import random
from fractions import Fraction

import pytest

from flowgames.errors.exceptions import InputError
from flowgames.games.bgp import check_feasible, check_stable
from flowgames.games.prefgame import (
    PreferenceGame,
    best_response_dynamics,
    self_profile,
)
from flowgames.reductions.artifact import Direction, ReductionArtifact, map_solution
from flowgames.reductions.pref_reductions import (
    eligible_targets,
    fresh_name,
    pref_to_bbc,
    pref_to_bgp,
)

HALF = Fraction(1, 2)


def test_fresh_name_avoids_taken_ids():
    assert fresh_name("d", {"a"}) == "d"
    assert fresh_name("d", {"d", "d'"}) == "d''"


def test_eligible_targets_stop_at_own_class(non_convex_preference):
    game, _, _ = non_convex_preference

    assert eligible_targets(game, "x") == ["a1", "b1", "c1", "x"]
    assert eligible_targets(game, "a1") == ["a2", "a1"]


def test_pref_to_bgp_paths_follow_preferences(non_convex_preference):
    game, _, _ = non_convex_preference

    red = pref_to_bgp(game)

    inst = red.target
    assert inst.dest == "d"
    assert inst.paths["x"] == (
        ("x", "a1", "d"),
        ("x", "b1", "d"),
        ("x", "c1", "d"),
        ("x", "d"),
    )
    assert inst.prefs["x"] == ((0,), (1,), (2,), (3,))
    assert red.forward_table[("x", "x")] == ("x", 3)


def test_equilibrium_maps_to_stable_assignment(non_convex_preference):
    game, w, _ = non_convex_preference
    red = pref_to_bgp(game)

    mapped = map_solution(red, Direction.FORWARD, w)

    assert mapped["x"] == {0: HALF, 1: HALF}
    assert check_feasible(red.target, mapped).ok
    assert check_stable(red.target, mapped).ok
    assert map_solution(red, Direction.BACKWARD, mapped) == w


def test_pref_to_bbc_lengths_count_preferred_players(non_convex_preference):
    game, _, _ = non_convex_preference

    inst = pref_to_bbc(game).target

    lengths = inst.lengths["x"]
    assert [lengths[("x", y)] for y in ("a1", "b1", "c1", "d")] == [1, 2, 3, 5]
    assert lengths[("a1", "d")] == 1
    assert lengths[("a1", "b1")] == len(game.players) + 1
    assert inst.budget == {i: 1 for i in game.players}


def test_pref_to_bbc_sends_self_weight_to_destination(non_convex_preference):
    game, w, _ = non_convex_preference

    mapped = map_solution(pref_to_bbc(game), Direction.FORWARD, w)

    assert mapped["a1"] == {"d": HALF, "a2": HALF}
    assert mapped["x"] == {"a1": HALF, "b1": HALF}


def test_non_injective_table_is_rejected():
    game = PreferenceGame.from_lists(["a"], {})
    with pytest.raises(InputError):
        ReductionArtifact(
            source_kind="preference",
            source=game,
            target_kind="preference",
            target=game,
            forward_table={("a", "a"): ("a", "x"), ("a", "b"): ("a", "x")},
            source_owners=("a",),
            target_owners=("a",),
        )


def test_unknown_strategy_cannot_be_mapped(non_convex_preference):
    game, _, _ = non_convex_preference
    with pytest.raises(InputError):
        map_solution(pref_to_bgp(game), Direction.FORWARD, {"x": {"b2": HALF}})


@pytest.mark.parametrize("seed", range(20))
def test_random_strict_equilibria_map_to_stable_assignments(seed):
    rng = random.Random(seed)
    players = [f"p{k}" for k in range(rng.randint(2, 5))]
    orders = {i: rng.sample(players, len(players)) for i in players}
    game = PreferenceGame.from_lists(players, orders)
    result = best_response_dynamics(game, self_profile(game))
    if not result.converged:
        pytest.skip("dynamics did not settle")
    red = pref_to_bgp(game)

    mapped = map_solution(red, Direction.FORWARD, result.profile)

    assert check_stable(red.target, mapped).ok
    assert map_solution(red, Direction.BACKWARD, mapped) == result.profile

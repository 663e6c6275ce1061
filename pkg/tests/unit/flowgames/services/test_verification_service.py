from fractions import Fraction

import pytest

from flowgames.errors.exceptions import DataError, UnsupportedMethodError
from flowgames.games.prefgame import mix_profiles

HALF = Fraction(1, 2)


def test_preference_equilibrium_verifies(verifier, non_convex_preference):
    game, w, _ = non_convex_preference

    report = verifier.verify("preference", game, w, seed=7)

    assert report.ok
    assert report.witnesses == []
    assert report.seed == 7


def test_preference_mixture_names_its_witness(verifier, non_convex_preference):
    game, w, w_prime = non_convex_preference

    report = verifier.verify("preference", game, mix_profiles(w, w_prime, HALF), 0)

    assert report.verdict == "not_equilibrium"
    assert [x.player for x in report.witnesses] == ["x"]


def test_eps_check_reports_conditions(verifier, non_convex_preference):
    game, w, _ = non_convex_preference

    assert verifier.verify("preference", game, w, 0, eps=Fraction(1, 100)).ok


def test_bgp_assignment_through_b_is_stable(verifier, two_hop_bgp):
    report = verifier.verify("bgp", two_hop_bgp, {"a": {0: 1}, "b": {0: 1}}, 0)

    assert report.ok


def test_bgp_infeasible_assignment_lists_conditions(verifier, two_hop_bgp):
    report = verifier.verify("bgp", two_hop_bgp, {"a": {0: 1}, "b": {}}, 0)

    assert not report.ok
    assert report.witnesses[0].player == "a"


def test_bbc_relay_profile_is_an_equilibrium(verifier, relay_bbc):
    profile = {"u": {"v": Fraction(1)}, "v": {"t": Fraction(1)}}

    assert verifier.verify("bbc", relay_bbc, profile, 0).ok


def test_bbc_empty_profile_reports_utilities(verifier, relay_bbc):
    report = verifier.verify("bbc", relay_bbc, {}, 0)

    assert report.witnesses[0].player == "u"
    assert report.witnesses[0].detail == "utility -10, best -11/2"


def test_matrix_uniform_profile_verifies(verifier, matching_pennies):
    profile = {"P1": {"H": HALF, "T": HALF}, "P2": {"H": HALF, "T": HALF}}

    assert verifier.verify("matrix", matching_pennies, profile, 0).ok


def test_graphical_games_have_no_check(verifier):
    with pytest.raises(UnsupportedMethodError):
        verifier.verify("graphical", None, {}, 0)


def test_verify_files_records_source(verifier, write_json, fixtures):
    fixture = fixtures["non_convex_matrix"]
    game = write_json("m.game.json", fixture["game"])
    profile = write_json("m.profile.json", fixture["equilibria"]["pure_a"])

    report = verifier.verify_files(game, profile, seed=0)

    assert report.ok
    assert report.source == str(game)


def test_batch_keeps_sorted_order(verifier, write_json, fixtures, tmp_path):
    fixture = fixtures["non_convex_preference"]
    write_json("b.game.json", fixture["game"])
    write_json("b.profile.json", fixture["equilibria"]["w"])
    write_json("a.game.json", fixture["game"])
    weights = {**fixture["equilibria"]["w"]["weights"], "x": {"c1": "1"}}
    write_json("a.profile.json", {"weights": weights})

    batch = verifier.verify_batch(tmp_path, seed=0)

    assert [r.source.rsplit("/", 1)[-1] for r in batch.results] == [
        "a.game.json",
        "b.game.json",
    ]
    assert [r.ok for r in batch.results] == [False, True]
    assert not batch.ok


def test_batch_needs_matching_profiles(verifier, write_json, fixtures, tmp_path):
    write_json("a.game.json", fixtures["non_convex_preference"]["game"])

    with pytest.raises(DataError):
        verifier.verify_batch(tmp_path, seed=0)


def test_batch_needs_game_files(verifier, tmp_path):
    with pytest.raises(DataError):
        verifier.verify_batch(tmp_path, seed=0)

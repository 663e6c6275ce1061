import random
from fractions import Fraction

import networkx as nx
import pytest

from flowgames.errors.exceptions import AnalysisError, InputError
from flowgames.gadgets.fixpoint import (
    dependency_graph,
    evaluate_fixpoint,
    sample_eps_profile,
)
from flowgames.gadgets.intervals import Interval, interval_propagate
from flowgames.gadgets.library import GadgetKind, GameFragment, build_gadget
from flowgames.games.prefgame import is_eps_equilibrium, is_equilibrium

F = Fraction
EPS_L = F(1, 16)
EPS = EPS_L**3


def test_half_gadget_ring_is_the_only_cycle():
    fragment = build_gadget(GadgetKind.HALF, ("x",))

    cycles = list(nx.simple_cycles(dependency_graph(fragment)))

    assert len(cycles) == 1
    assert set(cycles[0]) == {"half/H", "half/H2", "half/H3"}


def test_fixpoint_is_an_equilibrium_of_the_whole_fragment():
    fragment = build_gadget(GadgetKind.AVERAGE, ("x", "y"))

    result = evaluate_fixpoint(fragment, {"x": F(1, 5), "y": F(3, 5)})

    assert result.output == F(2, 5)
    assert is_equilibrium(result.game, result.profile, only=fragment.players).ok


def test_even_ring_has_no_closed_form():
    fragment = GameFragment(
        players=("a", "b"),
        prefs={"a": ("b", "a"), "b": ("a", "b")},
        inputs=(),
        output="a",
    )
    with pytest.raises(AnalysisError):
        evaluate_fixpoint(fragment, {})


@pytest.mark.parametrize("pinned", [{}, {"x": F(3, 2)}, {"x": F(-1, 2)}])
def test_inputs_must_be_pinned_inside_unit_interval(pinned):
    fragment = build_gadget(GadgetKind.COPY, ("x",))
    with pytest.raises(InputError):
        evaluate_fixpoint(fragment, pinned)


def test_zero_eps_sample_is_exact():
    fragment = build_gadget(GadgetKind.SUM, ("x", "y"))
    pins = {"x": F(1, 4), "y": F(1, 3)}

    sampled = sample_eps_profile(fragment, pins, 0, random.Random(0))

    assert sampled.output == evaluate_fixpoint(fragment, pins).output


def test_sampler_rejects_negative_eps():
    fragment = build_gadget(GadgetKind.COPY, ("x",))
    with pytest.raises(InputError):
        sample_eps_profile(fragment, {"x": F(1, 2)}, F(-1), random.Random(0))


SAMPLES = 100


def _sampled_outputs(kind, values):
    """Outputs of the samples that pass the eps check, with the rule interval."""
    inputs = tuple(f"in{k}" for k in range(len(values)))
    fragment = build_gadget(kind, inputs, eps_l=EPS_L)
    pins = dict(zip(inputs, values))
    outputs = []
    for seed in range(SAMPLES):
        sampled = sample_eps_profile(fragment, pins, EPS, random.Random(seed))
        report = is_eps_equilibrium(
            sampled.game, sampled.profile, EPS, only=fragment.players
        )
        if report.ok:
            outputs.append(sampled.output)
    bounds = {p: Interval.point(v) for p, v in pins.items()}
    return outputs, interval_propagate(fragment, bounds, EPS, EPS_L)


@pytest.mark.parametrize(
    "kind, values",
    [
        (GadgetKind.NOT, (F(1, 3),)),
        (GadgetKind.OR, (F(1, 4), F(1, 2))),
        (GadgetKind.AND, (F(1), F(0))),
        (GadgetKind.SUM, (F(1, 4), F(1, 3))),
        (GadgetKind.COPY, (F(2, 3),)),
        (GadgetKind.HALF, (F(3, 5),)),
        (GadgetKind.DOUBLE, (F(1, 4),)),
    ],
)
def test_every_sample_is_an_eps_equilibrium_inside_the_interval(kind, values):
    outputs, interval = _sampled_outputs(kind, values)

    assert len(outputs) == SAMPLES
    assert all(interval.contains(v) for v in outputs)


@pytest.mark.parametrize(
    "kind, values",
    [
        (GadgetKind.DIFF, (F(3, 4), F(1, 3))),
        (GadgetKind.LESS, (F(3, 4), F(1, 4))),
        (GadgetKind.LESS, (F(1, 4), F(3, 4))),
        (GadgetKind.CORRECTION, (F(1, 16),)),
        (GadgetKind.CORRECTION, (F(15, 16),)),
    ],
)
def test_eps_equilibrium_samples_stay_inside_the_interval(kind, values):
    outputs, interval = _sampled_outputs(kind, values)

    assert all(interval.contains(v) for v in outputs)


@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("value, target", [(F(1, 16), 0), (F(15, 16), 1)])
def test_sampled_correction_stays_near_boolean(seed, value, target):
    fragment = build_gadget(GadgetKind.CORRECTION, ("x",), eps_l=EPS_L)

    sampled = sample_eps_profile(fragment, {"x": value}, EPS, random.Random(seed))

    assert abs(sampled.output - target) <= 2 * EPS_L

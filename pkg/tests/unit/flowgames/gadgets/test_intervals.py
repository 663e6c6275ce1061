from fractions import Fraction

import pytest

from flowgames.errors.exceptions import InputError
from flowgames.gadgets.compiler import (
    CircuitDescription,
    Gate,
    compile_circuit,
    reference_values,
)
from flowgames.gadgets.intervals import (
    Interval,
    apply_rule,
    interval_propagate,
    propagate_circuit,
)
from flowgames.gadgets.library import GadgetKind, build_gadget

F = Fraction
EPS_L = F(1, 16)
EPS = F(1, 4096)


def test_interval_rejects_reversed_bounds():
    with pytest.raises(InputError):
        Interval(F(1, 2), F(1, 4))


def test_not_rule_is_clamped_to_unit_interval():
    assert apply_rule(GadgetKind.NOT, (Interval.point(0),), EPS, EPS_L) == Interval(
        1 - EPS, 1
    )


def test_circuit_intervals_contain_exact_values():
    circuit = CircuitDescription(
        inputs=("x", "y"),
        gates=(Gate("s", "SUM", ("x", "y")), Gate("h", "HALF", ("s",))),
    )
    pins = {"x": F(1, 4), "y": F(1, 3)}

    wires = propagate_circuit(
        compile_circuit(circuit),
        {w: Interval.point(v) for w, v in pins.items()},
        EPS,
        EPS_L,
    )

    assert wires["s"] == Interval(F(7, 12) - 3 * EPS, F(7, 12) + 3 * EPS)
    for wire, value in reference_values(circuit, pins).items():
        assert wires[wire].contains(value)


@pytest.mark.parametrize(
    "a, b, expected",
    [
        (Interval(F(1, 4), F(1, 2)), Interval(F(1, 2), 1), Interval(0, EPS_L)),
        (Interval(F(3, 4), 1), Interval(0, F(1, 2)), Interval(1 - EPS_L, 1)),
        (Interval(F(1, 2), F(9, 16)), Interval(F(1, 2), F(1, 2)), Interval(0, 1)),
    ],
)
def test_less_threshold_rule(a, b, expected):
    assert apply_rule(GadgetKind.LESS, (a, b), EPS, EPS_L) == expected


@pytest.mark.parametrize(
    "a, expected",
    [
        (Interval(0, F(1, 4)), Interval(0, F(1, 8))),
        (Interval(F(3, 4), 1), Interval(F(7, 8), 1)),
        (Interval(F(1, 4), F(3, 4)), Interval(0, 1)),
    ],
)
def test_correction_threshold_rule(a, expected):
    assert apply_rule(GadgetKind.CORRECTION, (a,), EPS, EPS_L) == expected


def test_eps_must_not_exceed_eps_l_cubed():
    fragment = build_gadget(GadgetKind.COPY, ("x",))
    with pytest.raises(InputError):
        interval_propagate(fragment, {"x": Interval.point(0)}, EPS * 2, EPS_L)


def test_interval_rules_need_a_single_gadget():
    compiled = compile_circuit(
        CircuitDescription(inputs=("x",), gates=(Gate("n", "NOT", ("x",)),))
    )
    with pytest.raises(InputError):
        interval_propagate(compiled.fragment, {"x": Interval.point(0)}, EPS, EPS_L)


def test_every_input_needs_an_interval():
    fragment = build_gadget(GadgetKind.SUM, ("x", "y"))
    with pytest.raises(InputError):
        interval_propagate(fragment, {"x": Interval.point(0)}, EPS, EPS_L)

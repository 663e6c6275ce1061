from fractions import Fraction

import pytest

from flowgames.errors.exceptions import AnalysisError, InputError
from flowgames.gadgets.compiler import (
    BitSpec,
    CircuitDescription,
    FeedbackSpec,
    Gate,
    bit_port,
    compile_circuit,
    gate_order,
    reference_values,
)
from flowgames.gadgets.fixpoint import evaluate_fixpoint

F = Fraction


@pytest.fixture
def sum_then_half():
    return CircuitDescription(
        inputs=("x", "y"),
        gates=(Gate("h", "HALF", ("s",)), Gate("s", "SUM", ("x", "y"))),
        outputs=("h",),
    )


def test_gates_are_ordered_by_dependency(sum_then_half):
    assert [g.id for g in gate_order(sum_then_half)] == ["s", "h"]


def test_compiled_wires_match_reference_values(sum_then_half):
    compiled = compile_circuit(sum_then_half)
    pins = {"x": F(1, 4), "y": F(1, 3)}

    result = evaluate_fixpoint(compiled.fragment, pins)

    expected = reference_values(sum_then_half, pins)
    assert expected["h"] == F(7, 24)
    for wire, value in expected.items():
        assert result.value(compiled.ports[wire]) == value
    assert result.output == F(7, 24)


def test_empty_circuit_compiles_to_its_inputs():
    compiled = compile_circuit(CircuitDescription(inputs=("x",)))

    assert compiled.fragment.players == ()
    assert compiled.game.players == ("x",)
    assert compiled.fragment.output is None


@pytest.mark.parametrize("k", range(8))
def test_bit_extraction_reads_top_three_bits(k):
    circuit = CircuitDescription(inputs=("x",), bits=BitSpec("x", 3))
    compiled = compile_circuit(circuit, eps_l=F(1, 16))

    result = evaluate_fixpoint(compiled.fragment, {"x": F(k, 8) + F(1, 16)})

    bits = tuple(result.value(compiled.ports[bit_port("x", i)]) for i in (1, 2, 3))
    assert bits == ((k >> 2) & 1, (k >> 1) & 1, k & 1)


def test_bit_extraction_needs_eps_l():
    with pytest.raises(InputError):
        compile_circuit(CircuitDescription(inputs=("x",), bits=BitSpec("x", 2)))


@pytest.mark.parametrize(
    "gates",
    [
        (Gate("a", "NOT", ("b",)), Gate("b", "NOT", ("a",))),
        (Gate("a", "NOT", ("z",)),),
        (Gate("a", "NOT", ("x", "x")),),
        (Gate("x", "NOT", ("x",)),),
        (Gate("a/b", "NOT", ("x",)),),
    ],
)
def test_malformed_circuits_are_rejected(gates):
    with pytest.raises(InputError):
        gate_order(CircuitDescription(inputs=("x",), gates=gates))


def test_unknown_output_is_rejected():
    with pytest.raises(InputError):
        compile_circuit(CircuitDescription(inputs=("x",), outputs=("y",)))


def test_feedback_promotes_coordinates_to_players():
    circuit = CircuitDescription(
        inputs=("a", "b", "c"),
        feedback=FeedbackSpec(
            coordinates=("a", "b", "c"), vertices=(("a", "a", "b", "b", "c", "c"),)
        ),
    )

    compiled = compile_circuit(circuit)

    assert compiled.fragment.inputs == ()
    assert {"a", "b", "c"} <= set(compiled.fragment.players)
    with pytest.raises(AnalysisError):
        evaluate_fixpoint(compiled.fragment, {})


def test_feedback_needs_three_coordinates():
    circuit = CircuitDescription(
        inputs=("a", "b"),
        feedback=FeedbackSpec(coordinates=("a", "b"), vertices=(("a",) * 6,)),
    )
    with pytest.raises(InputError):
        compile_circuit(circuit)

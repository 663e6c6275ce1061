from fractions import Fraction

import pytest

from flowgames.errors.exceptions import InputError
from flowgames.numerics.lp import (
    LPBuilder,
    LPStatus,
    Relation,
    Sense,
    solve_lexicographic,
    solve_lp,
)


def _production_lp():
    builder = LPBuilder(sense=Sense.MAXIMIZE)
    builder.add_variables(["x", "y"])
    builder.add_constraint({"x": 1, "y": 1}, Relation.LE, 4)
    builder.add_constraint({"x": 1, "y": 3}, Relation.LE, 6)
    builder.add_constraint({"x": 1}, Relation.LE, 3)
    builder.set_objective({"x": 3, "y": 2})
    return builder.build()


def test_solve_lp_finds_exact_optimum():
    result = solve_lp(_production_lp())

    assert result.optimal
    assert result.value == 11
    assert result.solution == {"x": Fraction(3), "y": Fraction(1)}


def test_solve_lp_reports_infeasible():
    builder = LPBuilder()
    builder.add_variable("x")
    builder.add_constraint({"x": 1}, Relation.GE, 2)
    builder.add_constraint({"x": 1}, Relation.LE, 1)

    assert solve_lp(builder.build()).status is LPStatus.INFEASIBLE


def test_solve_lp_reports_unbounded():
    builder = LPBuilder()
    builder.add_variable("x")
    builder.set_objective({"x": 1})

    assert solve_lp(builder.build()).status is LPStatus.UNBOUNDED


def test_free_variable_can_go_negative():
    builder = LPBuilder(sense=Sense.MINIMIZE)
    builder.add_variable("x", nonneg=False)
    builder.add_constraint({"x": 1}, Relation.GE, -3)
    builder.set_objective({"x": 1})

    result = solve_lp(builder.build())

    assert result.value == -3
    assert result.solution["x"] == -3


def test_equality_rows_and_fractional_optimum():
    builder = LPBuilder()
    builder.add_variables(["x", "y"])
    builder.add_constraint({"x": 2, "y": 1}, Relation.EQ, 1)
    builder.add_constraint({"x": 1, "y": 2}, Relation.EQ, 1)
    builder.set_objective({"x": 1})

    result = solve_lp(builder.build())

    assert result.solution == {"x": Fraction(1, 3), "y": Fraction(1, 3)}


def test_redundant_equality_rows_are_dropped():
    builder = LPBuilder()
    builder.add_variables(["x", "y"])
    builder.add_constraint({"x": 1, "y": 1}, Relation.EQ, 1)
    builder.add_constraint({"x": 2, "y": 2}, Relation.EQ, 2)
    builder.set_objective({"x": 1, "y": -1})

    assert solve_lp(builder.build()).value == 1


def test_solve_lexicographic_fixes_earlier_objectives():
    builder = LPBuilder()
    builder.add_variables(["x", "y"])
    builder.add_constraint({"x": 1, "y": 1}, Relation.LE, 2)
    lp = builder.build()

    result = solve_lexicographic(lp, [{"x": 1}, {"y": 1}])

    assert result.solution["x"] == 2
    assert result.value == 0


def test_builder_rejects_duplicate_variables():
    builder = LPBuilder()
    builder.add_variable("x")
    with pytest.raises(InputError):
        builder.add_variable("x")


def test_builder_rejects_undeclared_variables():
    builder = LPBuilder()
    builder.add_variable("x")
    builder.add_constraint({"z": 1}, Relation.LE, 1)
    with pytest.raises(InputError):
        builder.build()

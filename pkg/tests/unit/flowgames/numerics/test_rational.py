from fractions import Fraction

import pytest
from pydantic import BaseModel, ValidationError

from flowgames.errors.exceptions import InputError
from flowgames.numerics.rational import (
    UNBOUNDED,
    RationalStr,
    format_capacity,
    format_rational,
    parse_rational,
)


class _Weighted(BaseModel):
    value: RationalStr


@pytest.mark.parametrize(
    "text, expected",
    [("1/2", Fraction(1, 2)), ("2/4", Fraction(1, 2)), ("3", Fraction(3)), (5, 5)],
)
def test_parse_rational_accepts_exact_forms(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize("text", ["0.5", "1e3", "1/0", "half", True, None, ""])
def test_parse_rational_rejects_inexact_or_malformed(text):
    with pytest.raises(InputError):
        parse_rational(text)


def test_format_rational_drops_unit_denominator():
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-3, 6)) == "-1/2"


def test_format_capacity_marks_unbounded():
    assert format_capacity(UNBOUNDED) == "inf"
    assert format_capacity(Fraction(1, 3)) == "1/3"


def test_rational_field_serializes_as_string():
    model = _Weighted.model_validate({"value": "6/8"})

    assert model.value == Fraction(3, 4)
    assert model.model_dump(mode="json") == {"value": "3/4"}


def test_rational_field_rejects_floats_in_text():
    with pytest.raises(ValidationError):
        _Weighted.model_validate({"value": "0.75"})

"""
Exact rational values and their text form.

Every weight, payoff and tolerance in the package is a ``Fraction``. Files carry
them as ``"p/q"`` strings, or ``"p"`` when the denominator is 1.
"""

import enum
from fractions import Fraction
from typing import Annotated, Any

from pydantic import BeforeValidator, PlainSerializer

from flowgames.errors.exceptions import InputError

ZERO = Fraction(0)
ONE = Fraction(1)


class Unbounded(enum.Enum):
    """Marker for an arc capacity with no upper bound."""

    UNBOUNDED = "inf"

    def __repr__(self) -> str:
        return "UNBOUNDED"


UNBOUNDED = Unbounded.UNBOUNDED

Capacity = Fraction | Unbounded


def _to_fraction(value: Any) -> Fraction | None:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        # decimals and exponents are rejected, only p/q and integers are exact
        if text and "." not in text and "e" not in text.lower():
            try:
                return Fraction(text)
            except (ValueError, ZeroDivisionError):
                return None
    return None


def parse_rational(value: Any) -> Fraction:
    """Parse ``"p/q"``, ``"p"``, an int or a Fraction into a canonical Fraction."""
    parsed = _to_fraction(value)
    if parsed is None:
        raise InputError(
            f"Not a rational value: {value!r}",
            details={"expected": "p/q or integer"},
        )
    return parsed


def format_rational(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_capacity(value: Capacity) -> str:
    if value is UNBOUNDED:
        return "inf"
    return format_rational(value)


def _validate_rational(value: Any) -> Fraction:
    parsed = _to_fraction(value)
    if parsed is None:
        raise ValueError(f"expected a rational 'p/q' string, got {value!r}")
    return parsed


RationalStr = Annotated[
    Fraction,
    BeforeValidator(_validate_rational),
    PlainSerializer(format_rational, return_type=str),
]

"""Text utilities for the flowgames package."""

from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from tabulate import tabulate

from flowgames.numerics.rational import format_rational


def profile_key(profile: Mapping[Any, Mapping[Any, Fraction]]) -> tuple:
    """Canonical sortable key of a sparse profile; zero entries are ignored."""
    return tuple(
        (str(owner), tuple(sorted((str(k), v) for k, v in dist.items() if v != 0)))
        for owner, dist in sorted(profile.items(), key=lambda item: str(item[0]))
    )


def format_profile(
    profile: Mapping[Any, Mapping[Any, Fraction]],
) -> dict[str, dict[str, str]]:
    """Render a profile with string keys and ``p/q`` values, dropping zeros."""
    return {
        str(owner): {
            str(k): format_rational(v)
            for k, v in sorted(dist.items(), key=lambda item: str(item[0]))
            if v != 0
        }
        for owner, dist in sorted(profile.items(), key=lambda item: str(item[0]))
    }


def render_table(rows: Iterable[Sequence[Any]], headers: Sequence[str]) -> str:
    return tabulate(list(rows), headers=list(headers), tablefmt="grid")


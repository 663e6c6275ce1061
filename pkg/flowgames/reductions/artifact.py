"""
Reduction results with explicit solution correspondence tables.

A solution on either side is a sparse profile ``{owner: {key: weight}}``. The
forward table sends each source ``(owner, key)`` to one target ``(owner, key)``.
Target owners listed in ``slack`` receive ``1 - sum`` of their mapped weight on
the slack key, and ``constants`` fixes target entries that have no source
counterpart. Backward mapping ignores slack and constant entries.
"""

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Hashable, Mapping

from flowgames.errors.exceptions import InputError

logger = logging.getLogger(__name__)

Owner = str
Key = Hashable
Solution = dict[Owner, dict[Key, Fraction]]


class Direction(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class ReductionArtifact:
    source_kind: str
    source: Any
    target_kind: str
    target: Any
    forward_table: Mapping[tuple[Owner, Key], tuple[Owner, Key]]
    source_owners: tuple[Owner, ...]
    target_owners: tuple[Owner, ...]
    slack: Mapping[Owner, Key] = field(default_factory=dict)
    constants: Mapping[Owner, Mapping[Key, Fraction]] = field(default_factory=dict)
    extras: Mapping[str, Any] = field(default_factory=dict)
    _backward: dict[tuple[Owner, Key], tuple[Owner, Key]] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        backward: dict[tuple[Owner, Key], tuple[Owner, Key]] = {}
        for src, dst in self.forward_table.items():
            if dst in backward:
                raise InputError(
                    "Correspondence table is not injective",
                    details={"target": [str(dst[0]), str(dst[1])]},
                )
            backward[dst] = src
        object.__setattr__(self, "_backward", backward)

    @property
    def backward_table(self) -> dict[tuple[Owner, Key], tuple[Owner, Key]]:
        return dict(self._backward)

    def is_auxiliary(self, owner: Owner, key: Key) -> bool:
        """Slack and constant entries of the target side."""
        return self.slack.get(owner) == key or key in self.constants.get(owner, {})


def _translate(
    solution: Mapping[Owner, Mapping[Key, Fraction]],
    table: Mapping[tuple[Owner, Key], tuple[Owner, Key]],
    owners: tuple[Owner, ...],
    skip=lambda owner, key: False,
) -> Solution:
    mapped: Solution = {owner: {} for owner in owners}
    for owner, dist in solution.items():
        for key, weight in dist.items():
            weight = Fraction(weight)
            if weight == 0 or skip(owner, key):
                continue
            entry = table.get((owner, key))
            if entry is None:
                raise InputError(
                    "Solution references a strategy with no counterpart",
                    details={"owner": str(owner), "key": str(key)},
                )
            target_owner, target_key = entry
            row = mapped.setdefault(target_owner, {})
            row[target_key] = row.get(target_key, Fraction(0)) + weight
    return mapped


def map_solution(
    red: ReductionArtifact,
    direction: Direction | str,
    solution: Mapping[Owner, Mapping[Key, Fraction]],
) -> Solution:
    """
    Apply the correspondence tables of ``red`` in the given direction.

    Raises:
        InputError: a positive weight on a strategy without counterpart, or a
            forward image whose mapped weight exceeds one on a slack owner.
    """
    direction = Direction(direction)
    if direction is Direction.BACKWARD:
        return _translate(
            solution, red._backward, red.source_owners, skip=red.is_auxiliary
        )

    mapped = _translate(solution, red.forward_table, red.target_owners)
    for owner, key in red.slack.items():
        row = mapped.setdefault(owner, {})
        rest = 1 - sum(row.values(), Fraction(0))
        if rest < 0:
            raise InputError(
                "Mapped weight exceeds one unit", details={"owner": str(owner)}
            )
        if rest > 0:
            row[key] = rest
    for owner, fixed in red.constants.items():
        row = mapped.setdefault(owner, {})
        for key, value in fixed.items():
            if value != 0:
                row[key] = Fraction(value)
    logger.debug(
        "Mapped %s solution onto %s owners", red.source_kind, len(red.target_owners)
    )
    return mapped

"""
Error intervals for gadget outputs in approximate equilibria.

Arithmetic gadgets map their input intervals through the exact monotone
function and widen the result by a fixed multiple of ``eps``. LESS and
CORRECTION use threshold rules in ``eps_l``. Every bound assumes
``eps <= eps_l ** 3``.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from flowgames.errors.exceptions import InputError
from flowgames.gadgets.compiler import CompiledCircuit
from flowgames.gadgets.library import GadgetKind, GameFragment, check_eps_l

logger = logging.getLogger(__name__)

ONE, ZERO = Fraction(1), Fraction(0)

# Slack per gadget, in multiples of eps.
SLACK = {
    GadgetKind.NOT: 1,
    GadgetKind.OR: 3,
    GadgetKind.SUM: 3,
    GadgetKind.DIFF: 3,
    GadgetKind.COPY: 2,
    GadgetKind.HALF: 4,
    GadgetKind.DOUBLE: 5,
}


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise InputError(
                "Empty interval", details={"lo": str(self.lo), "hi": str(self.hi)}
            )

    @classmethod
    def point(cls, value) -> "Interval":
        return cls(value, value)

    def contains(self, value) -> bool:
        return self.lo <= Fraction(value) <= self.hi

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


def _widen(lo: Fraction, hi: Fraction, slack: Fraction) -> Interval:
    return Interval(max(Fraction(0), lo - slack), min(Fraction(1), hi + slack))


def _check_eps(eps, eps_l) -> tuple[Fraction, Fraction]:
    eps = Fraction(eps)
    eps_l = check_eps_l(eps_l)
    if eps < 0:
        raise InputError("eps must be non-negative", details={"eps": str(eps)})
    if eps > eps_l**3:
        raise InputError(
            "Interval rules need eps <= eps_l ** 3",
            details={"eps": str(eps), "eps_l": str(eps_l)},
        )
    return eps, eps_l


def apply_rule(
    kind: GadgetKind,
    args: Sequence[Interval],
    eps: Fraction,
    eps_l: Fraction,
) -> Interval:
    """Output interval of one gadget from the intervals of its inputs."""
    kind = GadgetKind(kind)
    s = SLACK.get(kind, 0) * eps
    match kind:
        case GadgetKind.NOT:
            (a,) = args
            return _widen(1 - a.hi, 1 - a.lo, s)
        case GadgetKind.OR | GadgetKind.SUM:
            a, b = args
            return _widen(min(ONE, a.lo + b.lo), min(ONE, a.hi + b.hi), s)
        case GadgetKind.DIFF:
            a, b = args
            return _widen(max(ZERO, a.lo - b.hi), max(ZERO, a.hi - b.lo), s)
        case GadgetKind.COPY:
            (a,) = args
            return _widen(a.lo, a.hi, s)
        case GadgetKind.HALF:
            (a,) = args
            return _widen(a.lo / 2, a.hi / 2, s)
        case GadgetKind.DOUBLE:
            (a,) = args
            return _widen(min(ONE, 2 * a.lo), min(ONE, 2 * a.hi), s)
        case GadgetKind.AND:
            a, b = args
            not_a = apply_rule(GadgetKind.NOT, (a,), eps, eps_l)
            not_b = apply_rule(GadgetKind.NOT, (b,), eps, eps_l)
            either = apply_rule(GadgetKind.OR, (not_a, not_b), eps, eps_l)
            return apply_rule(GadgetKind.NOT, (either,), eps, eps_l)
        case GadgetKind.VALUE:
            return apply_rule(GadgetKind.HALF, (Interval.point(1),), eps, eps_l)
        case GadgetKind.AVERAGE:
            a, b = args
            halves = [apply_rule(GadgetKind.HALF, (x,), eps, eps_l) for x in (a, b)]
            return apply_rule(GadgetKind.SUM, halves, eps, eps_l)
        case GadgetKind.LESS:
            a, b = args
            if a.hi <= b.lo:
                return Interval(0, eps_l)
            if a.lo - b.hi >= eps_l:
                return Interval(1 - eps_l, 1)
            return Interval(0, 1)
        case GadgetKind.CORRECTION:
            (a,) = args
            if a.hi <= 5 * eps_l:
                return Interval(0, 2 * eps_l)
            if a.lo >= 1 - 5 * eps_l:
                return Interval(1 - 2 * eps_l, 1)
            return Interval(0, 1)
    raise InputError("No interval rule for gadget", details={"kind": str(kind)})


def interval_propagate(
    fragment: GameFragment,
    inputs: Mapping[str, Interval],
    eps,
    eps_l,
) -> Interval:
    """
    Interval holding the output of a single gadget in every ``eps``-equilibrium
    whose inputs lie in the given intervals.

    Raises:
        InputError: the fragment is not a single gadget, an input interval is
            missing, or ``eps > eps_l ** 3``.
    """
    eps, eps_l = _check_eps(eps, eps_l)
    if fragment.kind is None:
        raise InputError("Interval rules apply to single gadgets")
    missing = [p for p in fragment.inputs if p not in inputs]
    if missing:
        raise InputError("Every input needs an interval", details={"missing": missing})
    args = tuple(inputs[p] for p in fragment.inputs)
    return apply_rule(fragment.kind, args, eps, eps_l)


def propagate_circuit(
    compiled: CompiledCircuit,
    inputs: Mapping[str, Interval],
    eps,
    eps_l,
) -> dict[str, Interval]:
    """Intervals for every wire of a compiled circuit, gate by gate."""
    eps, eps_l = _check_eps(eps, eps_l)
    wires: dict[str, Interval] = {}
    for name in compiled.circuit.inputs:
        if name not in inputs:
            raise InputError("Every input needs an interval", details={"missing": name})
        wires[name] = inputs[name]
    for gate in compiled.order:
        args = tuple(wires[a] for a in gate.args)
        wires[gate.id] = apply_rule(gate.kind, args, eps, eps_l)
    logger.debug("Propagated intervals over %s wires", len(wires))
    return wires

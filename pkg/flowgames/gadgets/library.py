"""
Preference-game gadgets.

A gadget reads the self-weights of its input players and, at any equilibrium,
keeps a function of them as the self-weight of its output player. Internal
players are named ``<instance>/<role>``. Every preference list is strict and
ends with the player itself.
"""

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from flowgames.errors.exceptions import InputError
from flowgames.games.prefgame import PlayerId, PreferenceGame

logger = logging.getLogger(__name__)


class GadgetKind(str, enum.Enum):
    OR = "OR"
    NOT = "NOT"
    AND = "AND"
    SUM = "SUM"
    DIFF = "DIFF"
    COPY = "COPY"
    DOUBLE = "DOUBLE"
    HALF = "HALF"
    VALUE = "VALUE"
    LESS = "LESS"
    CORRECTION = "CORRECTION"
    AVERAGE = "AVERAGE"


ARITY: dict[GadgetKind, int] = {
    GadgetKind.OR: 2,
    GadgetKind.NOT: 1,
    GadgetKind.AND: 2,
    GadgetKind.SUM: 2,
    GadgetKind.DIFF: 2,
    GadgetKind.COPY: 1,
    GadgetKind.DOUBLE: 1,
    GadgetKind.HALF: 1,
    GadgetKind.VALUE: 0,
    GadgetKind.LESS: 2,
    GadgetKind.CORRECTION: 1,
    GadgetKind.AVERAGE: 2,
}

BOOLEAN_KINDS = frozenset({GadgetKind.OR, GadgetKind.NOT, GadgetKind.AND})
NEEDS_EPS_L = frozenset({GadgetKind.LESS, GadgetKind.CORRECTION})


@dataclass(frozen=True)
class GameFragment:
    """
    Internal players with their preference lists, the external input players
    whose self-weights they read, and the output player.

    ``ports`` names further internal players of interest, for example the
    complement strategy of a LESS gadget or the bits of a compiled circuit.
    """

    players: tuple[PlayerId, ...]
    prefs: Mapping[PlayerId, tuple[PlayerId, ...]]
    inputs: tuple[PlayerId, ...]
    output: PlayerId | None
    kind: GadgetKind | None = None
    ports: Mapping[str, PlayerId] = field(default_factory=dict)

    def __post_init__(self):
        internal = set(self.players)
        known = internal | set(self.inputs)
        if internal & set(self.inputs):
            raise InputError("Input ports must be external players")
        if self.output is not None and self.output not in internal:
            raise InputError(
                "Output port must be an internal player",
                details={"output": self.output},
            )
        for p in self.players:
            listed = self.prefs.get(p, ())
            if not listed or listed[-1] != p:
                raise InputError(
                    "Gadget preference lists end with the player itself",
                    details={"player": p},
                )
            for t in listed:
                if t not in known:
                    raise InputError(
                        "Gadget references an unknown player",
                        details={"player": p, "target": t},
                    )

    def before_self(self, p: PlayerId) -> tuple[PlayerId, ...]:
        return self.prefs[p][:-1]

    def game(self) -> PreferenceGame:
        """The fragment as a preference game; inputs only rank themselves."""
        prefs = {i: ((i,),) for i in self.inputs}
        prefs.update({p: tuple((t,) for t in self.prefs[p]) for p in self.players})
        return PreferenceGame(players=self.inputs + self.players, prefs=prefs)


class FragmentBuilder:
    """Collects players while gadgets are wired together."""

    def __init__(self, inputs: Sequence[PlayerId] = ()):
        self.inputs: list[PlayerId] = list(inputs)
        self.players: list[PlayerId] = []
        self.prefs: dict[PlayerId, tuple[PlayerId, ...]] = {}

    def player(self, pid: PlayerId, before_self: Sequence[PlayerId]) -> PlayerId:
        if pid in self.prefs or pid in self.inputs:
            raise InputError("Duplicate gadget player id", details={"player": pid})
        self.players.append(pid)
        self.prefs[pid] = tuple(before_self) + (pid,)
        return pid

    def promote(self, pid: PlayerId, before_self: Sequence[PlayerId]) -> PlayerId:
        """Turn an input into an internal player with the given preferences."""
        self.inputs.remove(pid)
        return self.player(pid, before_self)

    def fragment(
        self,
        output: PlayerId | None,
        kind: GadgetKind | None = None,
        ports: Mapping[str, PlayerId] | None = None,
    ) -> GameFragment:
        return GameFragment(
            players=tuple(self.players),
            prefs=dict(self.prefs),
            inputs=tuple(self.inputs),
            output=output,
            kind=kind,
            ports=dict(ports or {}),
        )


def check_eps_l(eps_l) -> Fraction:
    if eps_l is None:
        raise InputError("This gadget needs eps_l")
    eps_l = Fraction(eps_l)
    if not 0 < eps_l <= Fraction(1, 2):
        raise InputError("eps_l must lie in (0, 1/2]", details={"eps_l": str(eps_l)})
    return eps_l


def doublings(eps_l: Fraction) -> int:
    """Smallest ``t`` with ``2**t * eps_l >= 1``."""
    t = 0
    while (1 << t) * eps_l < 1:
        t += 1
    return t


def or_gate(b: FragmentBuilder, name: str, x: PlayerId, y: PlayerId) -> PlayerId:
    r1 = b.player(f"{name}/R1", (x, y))
    return b.player(f"{name}/R", (r1,))


def not_gate(b: FragmentBuilder, name: str, x: PlayerId) -> PlayerId:
    return b.player(f"{name}/N", (x,))


def and_gate(b: FragmentBuilder, name: str, x: PlayerId, y: PlayerId) -> PlayerId:
    nx_ = not_gate(b, f"{name}/not_x", x)
    ny = not_gate(b, f"{name}/not_y", y)
    either = or_gate(b, f"{name}/or", nx_, ny)
    return not_gate(b, f"{name}/not", either)


def sum_gate(
    b: FragmentBuilder, name: str, x: PlayerId, y: PlayerId, first: Sequence = ()
) -> PlayerId:
    s1 = b.player(f"{name}/S1", (x, y))
    return b.player(f"{name}/S", (*first, s1))


def diff_gate(b: FragmentBuilder, name: str, x: PlayerId, y: PlayerId) -> PlayerId:
    d1 = b.player(f"{name}/D1", (x,))
    return b.player(f"{name}/D", (d1, y))


def copy_gate(
    b: FragmentBuilder, name: str, x: PlayerId, first: Sequence = ()
) -> PlayerId:
    c1 = b.player(f"{name}/C1", (x,))
    return b.player(f"{name}/C", (*first, c1))


def double_gate(
    b: FragmentBuilder, name: str, x: PlayerId, first: Sequence = ()
) -> PlayerId:
    """``SUM(X, COPY(X))``; ``first`` is ranked on top by the COPY and SUM outputs."""
    c = copy_gate(b, f"{name}/copy", x, first)
    return sum_gate(b, f"{name}/sum", x, c, first)


def half_gate(
    b: FragmentBuilder, name: str, x: PlayerId, first: Sequence = ()
) -> PlayerId:
    """
    ``H1`` keeps ``1 - v``; the ring ``H -> H2 -> H3 -> H`` splits the rest evenly.
    ``first`` is ranked on top by the three ring players.
    """
    h1 = b.player(f"{name}/H1", (x,))
    h, h2, h3 = f"{name}/H", f"{name}/H2", f"{name}/H3"
    b.player(h2, (*first, h1, h3))
    b.player(h3, (*first, h1, h))
    return b.player(h, (*first, h1, h2))


def value_gate(b: FragmentBuilder, name: str) -> PlayerId:
    """Constant 1/2: a player that only ranks itself, halved."""
    one = b.player(f"{name}/O", ())
    return half_gate(b, f"{name}/half", one)


def less_gate(
    b: FragmentBuilder, name: str, x: PlayerId, y: PlayerId, eps_l: Fraction
) -> tuple[PlayerId, PlayerId]:
    """
    Output 1 when ``v_x - v_y >= eps_l`` and 0 when ``v_x <= v_y``.

    Returns the output player and the helper of its final SUM, whose self-weight
    is the complement of the output.
    """
    current = diff_gate(b, f"{name}/diff", x, y)
    for k in range(1, doublings(eps_l) + 2):
        current = double_gate(b, f"{name}/double{k}", current)
    return current, b.prefs[current][0]


def correction_gate(
    b: FragmentBuilder, name: str, x: PlayerId, eps_l: Fraction
) -> PlayerId:
    """
    Snap a near-boolean value back towards 0 or 1.

    A LESS against 1/2 selects the branch: its output (high when the value is
    small) is ranked first by the COPY and SUM of a DOUBLE, and its complement
    (high when the value is large) is ranked first by the ring players of three
    chained HALF gadgets. The result is the SUM of both branches.
    """
    middle = value_gate(b, f"{name}/half_const")
    small, large = less_gate(b, f"{name}/less", middle, x, eps_l)
    halved = x
    for k in range(1, 4):
        halved = half_gate(b, f"{name}/half{k}", halved, first=(large,))
    doubled = double_gate(b, f"{name}/double", x, first=(small,))
    return sum_gate(b, f"{name}/out", halved, doubled)


def average_gate(b: FragmentBuilder, name: str, x: PlayerId, y: PlayerId) -> PlayerId:
    hx = half_gate(b, f"{name}/half_x", x)
    hy = half_gate(b, f"{name}/half_y", y)
    return sum_gate(b, f"{name}/sum", hx, hy)


def add_gadget(
    b: FragmentBuilder,
    kind: GadgetKind,
    name: str,
    args: Sequence[PlayerId],
    eps_l: Fraction | None = None,
) -> PlayerId:
    """Wire one gadget into ``b`` and return its output player."""
    kind = GadgetKind(kind)
    if len(args) != ARITY[kind]:
        raise InputError(
            "Wrong number of gadget inputs",
            details={"kind": kind.value, "expected": ARITY[kind], "got": len(args)},
        )
    if kind in NEEDS_EPS_L:
        eps_l = check_eps_l(eps_l)
    match kind:
        case GadgetKind.OR:
            return or_gate(b, name, *args)
        case GadgetKind.NOT:
            return not_gate(b, name, *args)
        case GadgetKind.AND:
            return and_gate(b, name, *args)
        case GadgetKind.SUM:
            return sum_gate(b, name, *args)
        case GadgetKind.DIFF:
            return diff_gate(b, name, *args)
        case GadgetKind.COPY:
            return copy_gate(b, name, *args)
        case GadgetKind.DOUBLE:
            return double_gate(b, name, *args)
        case GadgetKind.HALF:
            return half_gate(b, name, *args)
        case GadgetKind.VALUE:
            return value_gate(b, name)
        case GadgetKind.LESS:
            return less_gate(b, name, args[0], args[1], eps_l)[0]
        case GadgetKind.CORRECTION:
            return correction_gate(b, name, args[0], eps_l)
        case GadgetKind.AVERAGE:
            return average_gate(b, name, *args)
    raise InputError("Unknown gadget kind", details={"kind": str(kind)})


def build_gadget(
    kind: GadgetKind | str,
    inputs: Sequence[PlayerId],
    name: str | None = None,
    eps_l: Fraction | None = None,
) -> GameFragment:
    """
    One gadget over external input players.

    Raises:
        InputError: wrong arity, a missing or out-of-range ``eps_l`` for LESS
            and CORRECTION, or an instance name that collides with an input.
    """
    kind = GadgetKind(kind)
    name = name or kind.value.lower()
    builder = FragmentBuilder(inputs)
    output = add_gadget(builder, kind, name, tuple(inputs), eps_l)
    ports = {}
    if kind is GadgetKind.LESS:
        ports["complement"] = builder.prefs[output][0]
    logger.debug("Built %s gadget with %s players", kind.value, len(builder.players))
    return builder.fragment(output, kind=kind, ports=ports)

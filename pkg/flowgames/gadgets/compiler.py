"""
Compile arithmetic/boolean circuits into preference games.

Input wires become input players named after the wire. Each gate becomes one
gadget instance whose players are named ``<gate id>/<role>``. Optional bit
extraction reads the top ``n`` binary digits of a wire, and an optional feedback
assembly wires three coordinate inputs back into the circuit.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import networkx as nx

from flowgames.errors.exceptions import AnalysisError, InputError
from flowgames.gadgets.library import (
    ARITY,
    FragmentBuilder,
    GadgetKind,
    GameFragment,
    add_gadget,
    and_gate,
    check_eps_l,
    copy_gate,
    diff_gate,
    doublings,
    half_gate,
    less_gate,
    not_gate,
    or_gate,
    value_gate,
)
from flowgames.games.prefgame import PlayerId, PreferenceGame

logger = logging.getLogger(__name__)

FEEDBACK_COORDINATES = 3
FEEDBACK_BITS = 2 * FEEDBACK_COORDINATES


@dataclass(frozen=True)
class Gate:
    id: str
    kind: GadgetKind
    args: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", GadgetKind(self.kind))
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class BitSpec:
    of: str
    n: int


@dataclass(frozen=True)
class FeedbackSpec:
    """
    Three coordinate inputs and, per grid vertex, six wires flagging the
    ``+x, -x, +y, -y, +z, -z`` directions.
    """

    coordinates: tuple[str, ...]
    vertices: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class CircuitDescription:
    inputs: tuple[str, ...] = ()
    gates: tuple[Gate, ...] = ()
    outputs: tuple[str, ...] = ()
    bits: BitSpec | None = None
    feedback: FeedbackSpec | None = None
    eps_l: Fraction | None = None


@dataclass(frozen=True)
class CompiledCircuit:
    circuit: CircuitDescription
    fragment: GameFragment
    ports: Mapping[str, PlayerId]
    order: tuple[Gate, ...] = field(default=())

    @property
    def game(self) -> PreferenceGame:
        return self.fragment.game()


def bit_port(wire: str, i: int) -> str:
    return f"{wire}.bit{i}"


def _check_wire_name(name: str) -> None:
    if not name or "/" in name:
        raise InputError(
            "Wire names must be non-empty without '/'", details={"wire": name}
        )


def gate_order(circuit: CircuitDescription) -> tuple[Gate, ...]:
    """
    Gates in evaluation order.

    Raises:
        InputError: duplicate or malformed wire names, unknown arguments, wrong
            arity, or a cycle among the gates.
    """
    known = set()
    for name in circuit.inputs:
        _check_wire_name(name)
        if name in known:
            raise InputError("Duplicate input wire", details={"wire": name})
        known.add(name)
    position = {}
    for n, gate in enumerate(circuit.gates):
        _check_wire_name(gate.id)
        if gate.id in known:
            raise InputError("Duplicate wire", details={"wire": gate.id})
        if len(gate.args) != ARITY[gate.kind]:
            raise InputError(
                "Wrong number of gate arguments",
                details={"gate": gate.id, "kind": gate.kind.value},
            )
        known.add(gate.id)
        position[gate.id] = n
    graph = nx.DiGraph()
    graph.add_nodes_from(position)
    for gate in circuit.gates:
        for arg in gate.args:
            if arg not in known:
                raise InputError(
                    "Gate reads an unknown wire", details={"gate": gate.id, "wire": arg}
                )
            if arg in position:
                graph.add_edge(arg, gate.id)
    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        cycle = None
    if cycle:
        raise InputError(
            "Circuit wiring is cyclic", details={"cycle": [u for u, _ in cycle]}
        )
    by_id = {gate.id: gate for gate in circuit.gates}
    ordered = nx.lexicographical_topological_sort(graph, key=position.__getitem__)
    return tuple(by_id[g] for g in ordered)


def _extract_bits(
    b: FragmentBuilder, source: PlayerId, spec: BitSpec, eps_l: Fraction
) -> dict[str, PlayerId]:
    """
    Bit ``i`` compares the remainder with ``2 ** -i`` and subtracts the matching
    power of two before the next comparison.
    """
    if spec.n < 1:
        raise InputError("Bit count must be positive", details={"n": spec.n})
    base = f"bits.{spec.of}"
    remainder = copy_gate(b, f"{base}/copy", source)
    threshold = value_gate(b, f"{base}/const1")
    ports: dict[str, PlayerId] = {}
    for i in range(1, spec.n + 1):
        if i > 1:
            threshold = half_gate(b, f"{base}/const{i}", threshold)
        bit, _ = less_gate(b, f"{base}/less{i}", remainder, threshold, eps_l)
        ports[bit_port(spec.of, i)] = bit
        if i == spec.n:
            break
        scaled = bit
        for k in range(1, i + 1):
            scaled = half_gate(b, f"{base}/scale{i}_{k}", scaled)
        remainder = diff_gate(b, f"{base}/rest{i}", remainder, scaled)
    return ports


def _add_feedback(
    b: FragmentBuilder, spec: FeedbackSpec, wires: Mapping[str, PlayerId]
) -> None:
    """
    OR each direction flag over all vertices, AND the two flags of a coordinate,
    negate, and make the coordinate the SUM of its own copy and that negation.
    """
    if len(spec.coordinates) != FEEDBACK_COORDINATES:
        raise InputError("Feedback needs exactly three coordinates")
    if not spec.vertices or any(len(v) != FEEDBACK_BITS for v in spec.vertices):
        raise InputError("Each feedback vertex lists six direction wires")
    for wire in {w for v in spec.vertices for w in v}:
        if wire not in wires:
            raise InputError("Feedback reads an unknown wire", details={"wire": wire})
    for c in spec.coordinates:
        if c not in b.inputs:
            raise InputError("Feedback coordinates must be inputs", details={"wire": c})

    flags: list[PlayerId] = []
    for d in range(FEEDBACK_BITS):
        acc = wires[spec.vertices[0][d]]
        for k, vertex in enumerate(spec.vertices[1:], start=1):
            acc = or_gate(b, f"feedback/or{d}_{k}", acc, wires[vertex[d]])
        flags.append(acc)
    for n, c in enumerate(spec.coordinates):
        both = and_gate(b, f"feedback/and_{c}", flags[2 * n], flags[2 * n + 1])
        off = not_gate(b, f"feedback/not_{c}", both)
        kept = copy_gate(b, f"feedback/copy_{c}", c)
        s1 = b.player(f"feedback/{c}/S1", (kept, off))
        b.promote(c, (s1,))


def compile_circuit(
    circuit: CircuitDescription, eps_l: Fraction | None = None
) -> CompiledCircuit:
    """
    Build the preference game of a circuit and its port map.

    ``circuit.eps_l`` takes precedence over ``eps_l``; either is only required
    when the circuit uses LESS, CORRECTION or bit extraction.
    """
    order = gate_order(circuit)
    eps_l = circuit.eps_l if circuit.eps_l is not None else eps_l
    b = FragmentBuilder(circuit.inputs)
    wires: dict[str, PlayerId] = {name: name for name in circuit.inputs}
    for gate in order:
        args = tuple(wires[a] for a in gate.args)
        wires[gate.id] = add_gadget(b, gate.kind, gate.id, args, eps_l)

    ports = dict(wires)
    if circuit.bits is not None:
        if circuit.bits.of not in wires:
            raise InputError(
                "Bit extraction reads an unknown wire",
                details={"wire": circuit.bits.of},
            )
        ports.update(
            _extract_bits(b, wires[circuit.bits.of], circuit.bits, check_eps_l(eps_l))
        )
    if circuit.feedback is not None:
        _add_feedback(b, circuit.feedback, wires)

    for name in circuit.outputs:
        if name not in ports:
            raise InputError("Unknown output wire", details={"wire": name})
    output = ports[circuit.outputs[0]] if circuit.outputs else None
    if output is not None and output not in b.prefs:
        output = None
    fragment = b.fragment(output, ports=ports)
    logger.info(
        "Compiled %s gates into %s players",
        len(order),
        len(fragment.inputs) + len(fragment.players),
    )
    return CompiledCircuit(circuit=circuit, fragment=fragment, ports=ports, order=order)


def gate_value(kind: GadgetKind, args: Sequence[Fraction], eps_l=None) -> Fraction:
    """
    Exact equilibrium output of a gadget on exact inputs.

    Raises:
        AnalysisError: CORRECTION on an input its comparator cannot decide.
    """
    kind = GadgetKind(kind)
    one, zero = Fraction(1), Fraction(0)
    match kind:
        case GadgetKind.OR | GadgetKind.SUM:
            return min(one, args[0] + args[1])
        case GadgetKind.NOT:
            return 1 - args[0]
        case GadgetKind.AND:
            return max(zero, args[0] + args[1] - 1)
        case GadgetKind.DIFF:
            return max(zero, args[0] - args[1])
        case GadgetKind.COPY:
            return args[0]
        case GadgetKind.DOUBLE:
            return min(one, 2 * args[0])
        case GadgetKind.HALF:
            return args[0] / 2
        case GadgetKind.VALUE:
            return Fraction(1, 2)
        case GadgetKind.AVERAGE:
            return (args[0] + args[1]) / 2
        case GadgetKind.LESS:
            scale = 2 ** (doublings(check_eps_l(eps_l)) + 1)
            return min(one, max(zero, args[0] - args[1]) * scale)
        case GadgetKind.CORRECTION:
            small = gate_value(GadgetKind.LESS, (Fraction(1, 2), args[0]), eps_l)
            if small == 1:
                return args[0] / 8
            if small == 0:
                return min(one, 2 * args[0])
            raise AnalysisError(
                "Correction input is too close to 1/2", details={"value": str(args[0])}
            )
    raise InputError("Unknown gadget kind", details={"kind": str(kind)})


def reference_values(
    circuit: CircuitDescription,
    values: Mapping[str, Fraction],
    eps_l: Fraction | None = None,
) -> dict[str, Fraction]:
    """Evaluate every wire directly, without building a game."""
    eps_l = circuit.eps_l if circuit.eps_l is not None else eps_l
    wires = {name: Fraction(values[name]) for name in circuit.inputs}
    for gate in gate_order(circuit):
        wires[gate.id] = gate_value(gate.kind, [wires[a] for a in gate.args], eps_l)
    return wires

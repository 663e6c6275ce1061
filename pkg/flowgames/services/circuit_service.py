import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from flowgames.config import FlowgamesSettings
from flowgames.errors.exceptions import InputError
from flowgames.gadgets.compiler import CompiledCircuit, compile_circuit
from flowgames.gadgets.fixpoint import evaluate_fixpoint
from flowgames.gadgets.intervals import Interval, propagate_circuit
from flowgames.models.games import PreferenceGameFile
from flowgames.numerics.rational import format_rational, parse_rational
from flowgames.services.documents import DocumentStore

logger = logging.getLogger(__name__)


def parse_pins(pins: list[str]) -> dict[str, Fraction]:
    """Read ``wire=p/q`` assignments."""
    parsed: dict[str, Fraction] = {}
    for pin in pins:
        wire, sep, value = pin.partition("=")
        if not sep or not wire:
            raise InputError("Pins look like 'wire=p/q'", details={"pin": pin})
        parsed[wire.strip()] = parse_rational(value.strip())
    return parsed


class CircuitService:
    def __init__(self, settings: FlowgamesSettings, store: DocumentStore):
        self.settings = settings
        self.store = store

    def compile(
        self, path: str | Path, eps_l: Fraction | None = None
    ) -> CompiledCircuit:
        circuit = self.store.load_circuit(path)
        # A circuit's own epsilon_l wins over the flag and the setting.
        fallback = eps_l if eps_l is not None else self.settings.eps_l_value
        return compile_circuit(circuit, fallback)

    def game_file(self, compiled: CompiledCircuit) -> PreferenceGameFile:
        return PreferenceGameFile.from_domain(compiled.game)

    def port_map(self, compiled: CompiledCircuit) -> dict[str, Any]:
        return {"ports": dict(compiled.ports)}

    def evaluate(
        self,
        compiled: CompiledCircuit,
        pins: Mapping[str, Fraction],
        eps: Fraction | None = None,
        eps_l: Fraction | None = None,
    ) -> dict[str, Any]:
        """
        Solve the compiled game with its inputs pinned and read every port.

        With ``eps`` the interval of every wire is reported as well.
        """
        unknown = sorted(set(pins) - set(compiled.circuit.inputs))
        if unknown:
            raise InputError("Pins name unknown inputs", details={"wires": unknown})
        result = evaluate_fixpoint(compiled.fragment, pins)
        values = {
            port: format_rational(result.value(player))
            for port, player in compiled.ports.items()
        }
        evaluation: dict[str, Any] = {"values": values}
        if eps is not None:
            threshold = compiled.circuit.eps_l or eps_l or self.settings.eps_l_value
            intervals = propagate_circuit(
                compiled,
                {wire: Interval.point(v) for wire, v in pins.items()},
                eps,
                threshold,
            )
            evaluation["intervals"] = {w: str(i) for w, i in intervals.items()}
        logger.info("Evaluated %s ports", len(values))
        return evaluation

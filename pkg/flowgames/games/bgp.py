"""
Fractional stable paths (fractional BGP).

Each node ``v`` other than the destination assigns weights to its permitted
paths ``pi(v)``. An assignment is feasible when every node routes at most one
unit (unity) and no node routes more through a suffix than the suffix's start
node placed on it (tree). A suffix that its start node does not list has
capacity 0.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from flowgames.errors.exceptions import InputError, PreconditionError
from flowgames.errors.handlers import run_rounds

logger = logging.getLogger(__name__)

NodeId = str
Path = tuple[NodeId, ...]
BGPAssignment = dict[NodeId, dict[int, Fraction]]


def proper_suffixes(path: Sequence[NodeId]) -> list[Path]:
    """Suffixes strictly shorter than ``path``, excluding the bare destination."""
    return [tuple(path[k:]) for k in range(1, len(path) - 1)]


@dataclass(frozen=True)
class BGPInstance:
    """
    Permitted paths and tie-classed path preferences per node.

    ``prefs[v]`` lists tie-classes of indices into ``paths[v]``; indices left out
    form one final class. It is normalized on construction.
    """

    dest: NodeId
    paths: Mapping[NodeId, tuple[Path, ...]]
    prefs: Mapping[NodeId, tuple[tuple[int, ...], ...]] = field(default_factory=dict)
    _index: dict[NodeId, dict[Path, int]] = field(
        init=False, repr=False, compare=False
    )
    _rank: dict[NodeId, dict[int, int]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dest in self.paths:
            raise InputError(
                "Destination cannot own paths", details={"node": self.dest}
            )
        known = set(self.paths) | {self.dest}
        paths: dict[NodeId, tuple[Path, ...]] = {}
        index: dict[NodeId, dict[Path, int]] = {}
        for v, listed in self.paths.items():
            normalized = tuple(tuple(p) for p in listed)
            lookup: dict[Path, int] = {}
            for k, path in enumerate(normalized):
                self._validate_path(v, path, known)
                if path in lookup:
                    raise InputError(
                        "Path listed twice", details={"node": v, "path": list(path)}
                    )
                lookup[path] = k
            paths[v] = normalized
            index[v] = lookup

        prefs: dict[NodeId, tuple[tuple[int, ...], ...]] = {}
        for v in self.prefs:
            if v not in paths:
                raise InputError("Preferences for an unknown node", details={"node": v})
        for v, listed in paths.items():
            seen: set[int] = set()
            classes: list[tuple[int, ...]] = []
            for tie_class in self.prefs.get(v, ()):
                members = tuple(sorted(int(k) for k in tie_class))
                if not members:
                    raise InputError("Empty tie-class", details={"node": v})
                for k in members:
                    if not 0 <= k < len(listed) or k in seen:
                        raise InputError(
                            "Bad path index in preferences",
                            details={"node": v, "index": k},
                        )
                    seen.add(k)
                classes.append(members)
            rest = tuple(k for k in range(len(listed)) if k not in seen)
            if rest:
                classes.append(rest)
            prefs[v] = tuple(classes)

        object.__setattr__(self, "paths", paths)
        object.__setattr__(self, "prefs", prefs)
        object.__setattr__(self, "_index", index)
        object.__setattr__(
            self,
            "_rank",
            {
                v: {k: level for level, cls in enumerate(classes) for k in cls}
                for v, classes in prefs.items()
            },
        )

    def _validate_path(self, v: NodeId, path: Path, known: set[NodeId]) -> None:
        if len(path) < 2 or path[0] != v or path[-1] != self.dest:
            raise InputError(
                "Path must run from its node to the destination",
                details={"node": v, "path": list(path)},
            )
        if len(set(path)) != len(path):
            raise InputError(
                "Path is not simple", details={"node": v, "path": list(path)}
            )
        for u in path:
            if u not in known:
                raise InputError(
                    "Path references an unknown node",
                    details={"node": v, "unknown": u},
                )

    @property
    def nodes(self) -> tuple[NodeId, ...]:
        """Nodes that own an assignment, in declaration order."""
        return tuple(self.paths)

    def path_index(self, v: NodeId, path: Sequence[NodeId]) -> int | None:
        return self._index[v].get(tuple(path))

    def rank(self, v: NodeId, k: int) -> int:
        return self._rank[v][k]


@dataclass(frozen=True)
class BGPViolation:
    node: NodeId
    kind: str
    suffix: Path | None
    excess: Fraction


@dataclass(frozen=True)
class BGPFeasibilityReport:
    ok: bool
    violations: tuple[BGPViolation, ...] = ()


@dataclass(frozen=True)
class StabilityViolation:
    node: NodeId
    path_index: int
    path: Path


@dataclass(frozen=True)
class StabilityReport:
    ok: bool
    violations: tuple[StabilityViolation, ...] = ()


@dataclass(frozen=True)
class BGPDynamicsResult:
    converged: bool
    assignment: BGPAssignment
    rounds: int


def _require_nodes(
    inst: BGPInstance, w: Mapping[NodeId, Mapping[int, Fraction]], nodes: Iterable
) -> None:
    for v in nodes:
        if v not in w:
            raise InputError("Assignment is missing a node", details={"node": v})
    for v, weights in w.items():
        if v not in inst.paths:
            raise InputError("Assignment names an unknown node", details={"node": v})
        for k in weights:
            if not 0 <= k < len(inst.paths[v]):
                raise InputError(
                    "Assignment references an unknown path",
                    details={"node": v, "index": k},
                )


def weight(w: Mapping[NodeId, Mapping[int, Fraction]], v: NodeId, k: int) -> Fraction:
    return Fraction(w.get(v, {}).get(k, 0))


def suffix_capacity(
    inst: BGPInstance, w: Mapping[NodeId, Mapping[int, Fraction]], suffix: Path
) -> Fraction:
    """Weight the start node of ``suffix`` places on it, or 0 if it is not listed."""
    u = suffix[0]
    k = inst.path_index(u, suffix)
    if k is None:
        return Fraction(0)
    return weight(w, u, k)


def suffix_paths(inst: BGPInstance, v: NodeId, suffix: Sequence[NodeId]) -> list[int]:
    """Indices of paths in ``pi(v)`` that have ``suffix`` as a proper suffix."""
    suffix = tuple(suffix)
    return [
        k for k, path in enumerate(inst.paths[v]) if suffix in proper_suffixes(path)
    ]


def _node_suffixes(inst: BGPInstance, v: NodeId) -> dict[Path, list[int]]:
    groups: dict[Path, list[int]] = {}
    for k, path in enumerate(inst.paths[v]):
        for suffix in proper_suffixes(path):
            groups.setdefault(suffix, []).append(k)
    return groups


def _node_violations(
    inst: BGPInstance, w: Mapping[NodeId, Mapping[int, Fraction]], v: NodeId
) -> list[BGPViolation]:
    violations: list[BGPViolation] = []
    for k in range(len(inst.paths[v])):
        if weight(w, v, k) < 0:
            negative = -weight(w, v, k)
            violations.append(BGPViolation(v, "sign", inst.paths[v][k], negative))
    total = sum((weight(w, v, k) for k in range(len(inst.paths[v]))), Fraction(0))
    if total > 1:
        violations.append(BGPViolation(v, "unity", None, total - 1))
    for suffix, members in _node_suffixes(inst, v).items():
        used = sum((weight(w, v, k) for k in members), Fraction(0))
        cap = suffix_capacity(inst, w, suffix)
        if used > cap:
            violations.append(BGPViolation(v, "tree", suffix, used - cap))
    return violations


def check_feasible(
    inst: BGPInstance, w: Mapping[NodeId, Mapping[int, Fraction]]
) -> BGPFeasibilityReport:
    """Check the unity and tree conditions exactly."""
    _require_nodes(inst, w, inst.nodes)
    violations = [x for v in inst.nodes for x in _node_violations(inst, w, v)]
    return BGPFeasibilityReport(ok=not violations, violations=tuple(violations))


def check_stable(
    inst: BGPInstance, w: Mapping[NodeId, Mapping[int, Fraction]]
) -> StabilityReport:
    """
    Check that every permitted path meets S1 or S2.

    S1: the node routes one full unit and only on paths it likes at least as
    much as ``Q``. S2: some proper suffix of ``Q`` is saturated by the node, and
    only through paths it likes at least as much as ``Q``.

    Raises:
        PreconditionError: If ``w`` is not feasible.
    """
    feasibility = check_feasible(inst, w)
    if not feasibility.ok:
        raise PreconditionError(
            "Stability is only defined for feasible assignments",
            details={"violations": len(feasibility.violations)},
        )
    violations: list[StabilityViolation] = []
    for v in inst.nodes:
        listed = inst.paths[v]
        positive = [k for k in range(len(listed)) if weight(w, v, k) > 0]
        total = sum((weight(w, v, k) for k in positive), Fraction(0))
        for q, path in enumerate(listed):
            level = inst.rank(v, q)
            if total == 1 and all(inst.rank(v, k) <= level for k in positive):
                continue
            if any(
                _saturated_by_preferred(inst, w, v, suffix, level)
                for suffix in proper_suffixes(path)
            ):
                continue
            violations.append(StabilityViolation(v, q, path))
    return StabilityReport(ok=not violations, violations=tuple(violations))


def _saturated_by_preferred(
    inst: BGPInstance,
    w: Mapping[NodeId, Mapping[int, Fraction]],
    v: NodeId,
    suffix: Path,
    level: int,
) -> bool:
    members = suffix_paths(inst, v, suffix)
    used = sum((weight(w, v, k) for k in members), Fraction(0))
    if used != suffix_capacity(inst, w, suffix):
        return False
    return all(inst.rank(v, k) <= level for k in members if weight(w, v, k) > 0)


def lex_max_best_response(
    inst: BGPInstance, w: Mapping[NodeId, Mapping[int, Fraction]], v: NodeId
) -> dict[int, Fraction]:
    """
    Greedy lexicographically maximal assignment for ``v`` against ``w_{-v}``.

    Paths are raised one at a time, by class and then by index, until unity
    binds or one of their proper suffixes is saturated.
    """
    groups = _node_suffixes(inst, v)
    used = {suffix: Fraction(0) for suffix in groups}
    caps = {suffix: suffix_capacity(inst, w, suffix) for suffix in groups}
    budget = Fraction(1)
    response: dict[int, Fraction] = {}
    for cls in inst.prefs[v]:
        for k in cls:
            if budget == 0:
                break
            room = budget
            for suffix in proper_suffixes(inst.paths[v][k]):
                room = min(room, caps[suffix] - used[suffix])
            if room <= 0:
                continue
            response[k] = room
            budget -= room
            for suffix in proper_suffixes(inst.paths[v][k]):
                used[suffix] += room
    return response


def class_totals(
    inst: BGPInstance, v: NodeId, weights: Mapping[int, Fraction]
) -> tuple[Fraction, ...]:
    return tuple(
        sum((Fraction(weights.get(k, 0)) for k in cls), Fraction(0))
        for cls in inst.prefs[v]
    )


def is_lex_maximal(
    inst: BGPInstance, w: Mapping[NodeId, Mapping[int, Fraction]], v: NodeId
) -> bool:
    _require_nodes(inst, w, inst.nodes)
    if _node_violations(inst, w, v):
        return False
    best = lex_max_best_response(inst, w, v)
    return class_totals(inst, v, w[v]) == class_totals(inst, v, best)


def stable_paths_dynamics(
    inst: BGPInstance,
    init: Mapping[NodeId, Mapping[int, Fraction]] | None = None,
    max_rounds: int = 200,
) -> BGPDynamicsResult:
    """Round-robin greedy best responses until a round changes nothing."""
    if init is None:
        init = {v: {} for v in inst.nodes}
    _require_nodes(inst, init, inst.nodes)
    assignment: BGPAssignment = {
        v: {k: Fraction(x) for k, x in init[v].items() if x != 0} for v in inst.nodes
    }

    def play_round(round_number: int) -> bool:
        changed = False
        for v in inst.nodes:
            response = lex_max_best_response(inst, assignment, v)
            if response != assignment[v]:
                assignment[v] = response
                changed = True
        return changed

    outcome = run_rounds(play_round, max_rounds)
    logger.info(
        "Stable paths dynamics converged=%s after %s rounds",
        outcome.converged,
        outcome.rounds,
    )
    return BGPDynamicsResult(outcome.converged, assignment, outcome.rounds)

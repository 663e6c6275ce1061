"""
Exact evaluation of gadget fragments with pinned inputs.

Players are solved in dependency order: a player depends on the internal
players it ranks above itself. A strongly connected component of size one gets
the greedy best response. A larger component must be an odd ring in which every
member ranks external players, then its ring successor, then itself; rings are
solved in closed form. Anything else is reported as an ``AnalysisError``.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

import networkx as nx

from flowgames.errors.exceptions import AnalysisError, InputError, InvariantViolation
from flowgames.gadgets.library import GameFragment
from flowgames.games.prefgame import (
    PlayerId,
    PreferenceGame,
    PrefProfile,
    best_response,
    clean,
    is_equilibrium,
    self_weight,
)

logger = logging.getLogger(__name__)

Jitter = Callable[[PlayerId, PrefProfile], None]


@dataclass(frozen=True)
class FixpointResult:
    output: Fraction | None
    profile: PrefProfile
    game: PreferenceGame

    def value(self, player: PlayerId) -> Fraction:
        return self_weight(self.profile, player)


def _pinned_profile(fragment: GameFragment, pinned: Mapping[PlayerId, Fraction]):
    missing = [p for p in fragment.inputs if p not in pinned]
    if missing:
        raise InputError("Every input must be pinned", details={"missing": missing})
    profile: PrefProfile = {p: {} for p in fragment.players}
    for port in fragment.inputs:
        value = Fraction(pinned[port])
        if not 0 <= value <= 1:
            raise InputError(
                "Pinned values must lie in [0, 1]",
                details={"port": port, "value": str(value)},
            )
        profile[port] = clean({port: value})
    return profile


def _output_of(fragment: GameFragment, profile: PrefProfile) -> Fraction | None:
    if fragment.output is None:
        return None
    return self_weight(profile, fragment.output)


def dependency_graph(fragment: GameFragment) -> nx.DiGraph:
    """Edge ``t -> p`` when internal ``p`` ranks internal ``t`` above itself."""
    internal = set(fragment.players)
    graph = nx.DiGraph()
    graph.add_nodes_from(fragment.players)
    for p in fragment.players:
        for t in fragment.before_self(p):
            if t in internal:
                graph.add_edge(t, p)
    return graph


def _fill(profile, listed) -> tuple[dict[PlayerId, Fraction], Fraction]:
    budget = Fraction(1)
    taken: dict[PlayerId, Fraction] = {}
    for t in listed:
        give = min(budget, self_weight(profile, t))
        if give > 0:
            taken[t] = give
            budget -= give
    return taken, budget


def _solve_ring(fragment: GameFragment, profile: PrefProfile, members) -> None:
    inside = set(members)
    successor: dict[PlayerId, PlayerId] = {}
    taken: dict[PlayerId, dict[PlayerId, Fraction]] = {}
    budgets: dict[PlayerId, Fraction] = {}
    for r in members:
        listed = fragment.before_self(r)
        ring_targets = [t for t in listed if t in inside]
        if len(ring_targets) != 1 or listed[-1] != ring_targets[0]:
            raise AnalysisError(
                "Cyclic component is not a simple ring", details={"player": r}
            )
        successor[r] = ring_targets[0]
        taken[r], budgets[r] = _fill(profile, listed[:-1])

    ring = [members[0]]
    while successor[ring[-1]] != ring[0]:
        ring.append(successor[ring[-1]])
        if len(ring) > len(members):
            raise AnalysisError("Cyclic component is not a simple ring")
    if len(ring) != len(members) or len(ring) % 2 == 0:
        raise AnalysisError(
            "Only odd rings have a closed form", details={"ring": ring}
        )

    n = len(ring)
    keeps: dict[PlayerId, Fraction] = {
        ring[0]: sum(
            ((-1) ** k * budgets[r] for k, r in enumerate(ring)), Fraction(0)
        )
        / 2
    }
    for k in range(n - 1, 0, -1):
        keeps[ring[k]] = budgets[ring[k]] - keeps[ring[(k + 1) % n]]
    for r in ring:
        if not 0 <= keeps[r] <= budgets[r]:
            raise AnalysisError(
                "Ring saturates; no closed form", details={"player": r}
            )

    for r in ring:
        dist = dict(taken[r])
        dist[successor[r]] = keeps[successor[r]]
        dist[r] = keeps[r]
        profile[r] = clean(dist)


def _solve(
    fragment: GameFragment,
    pinned: Mapping[PlayerId, Fraction],
    jitter: Jitter | None = None,
) -> tuple[PreferenceGame, PrefProfile]:
    game = fragment.game()
    profile = _pinned_profile(fragment, pinned)
    order = {p: n for n, p in enumerate(fragment.players)}
    condensed = nx.condensation(dependency_graph(fragment))
    for component in nx.topological_sort(condensed):
        members = sorted(condensed.nodes[component]["members"], key=order.__getitem__)
        if len(members) == 1:
            (p,) = members
            profile[p] = best_response(game, profile, p)
        else:
            _solve_ring(fragment, profile, members)
        if jitter is not None:
            for p in members:
                jitter(p, profile)
    return game, profile


def evaluate_fixpoint(
    fragment: GameFragment, pinned: Mapping[PlayerId, Fraction]
) -> FixpointResult:
    """
    The exact equilibrium of the fragment's internal players.

    Raises:
        InputError: an input is not pinned or is pinned outside ``[0, 1]``.
        AnalysisError: the dependency structure has no closed form.
        InvariantViolation: the solved profile is not an equilibrium.
    """
    game, profile = _solve(fragment, pinned)
    report = is_equilibrium(game, profile, only=fragment.players)
    if not report.ok:
        raise InvariantViolation(
            "Solved fragment is not an equilibrium",
            details={"witness": report.witness},
        )
    output = _output_of(fragment, profile)
    logger.debug("Fixpoint of %s players: output %s", len(fragment.players), output)
    return FixpointResult(output=output, profile=profile, game=game)


def sample_eps_profile(
    fragment: GameFragment,
    pinned: Mapping[PlayerId, Fraction],
    eps: Fraction,
    rng: random.Random,
) -> FixpointResult:
    """
    An ``eps``-equilibrium near the exact one.

    Players are solved in the same order as ``evaluate_fixpoint``, and right
    after a player is solved it moves at most ``eps / 4`` between itself and one
    player it ranks above itself. Later players respond to the moved values, so
    the errors travel downstream the way they would in a real approximate
    equilibrium.
    """
    eps = Fraction(eps)
    if eps < 0:
        raise InputError("eps must be non-negative", details={"eps": str(eps)})

    def jitter(p: PlayerId, profile: PrefProfile) -> None:
        listed = fragment.before_self(p)
        if not listed or eps == 0:
            return
        target = rng.choice(listed)
        shift = eps * Fraction(rng.randint(-8, 8), 32)
        dist = dict(profile[p])
        moved = dist.get(target, Fraction(0)) + shift
        kept = dist.get(p, Fraction(0)) - shift
        if moved < 0 or kept < 0:
            return
        dist[target], dist[p] = moved, kept
        profile[p] = clean(dist)

    game, profile = _solve(fragment, pinned, jitter)
    output = _output_of(fragment, profile)
    return FixpointResult(output=output, profile=profile, game=game)

"""
Preference games.

Every player distributes one unit of weight over the players. The weight that
player ``i`` puts on ``j`` is capped by the weight ``j`` keeps on itself, and each
player wants its per-tie-class totals to be lexicographically maximal.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from flowgames.errors.exceptions import InputError
from flowgames.errors.handlers import run_rounds

logger = logging.getLogger(__name__)

PlayerId = str
WeightDistribution = dict[PlayerId, Fraction]
PrefProfile = dict[PlayerId, WeightDistribution]


@dataclass(frozen=True)
class PreferenceGame:
    """
    Players with tie-classed preference orders, most preferred class first.

    ``prefs`` is normalized on construction: players missing from a list are
    appended as one final tie-class, and members of each class follow the order
    of ``players``.
    """

    players: tuple[PlayerId, ...]
    prefs: Mapping[PlayerId, tuple[tuple[PlayerId, ...], ...]]
    _rank: dict[PlayerId, dict[PlayerId, int]] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        players = tuple(self.players)
        if len(set(players)) != len(players):
            raise InputError("Duplicate player id in preference game")
        position = {p: k for k, p in enumerate(players)}
        normalized: dict[PlayerId, tuple[tuple[PlayerId, ...], ...]] = {}
        for i in self.prefs:
            if i not in position:
                raise InputError(
                    "Preference list for an unknown player", details={"player": i}
                )
        for i in players:
            seen: set[PlayerId] = set()
            classes: list[tuple[PlayerId, ...]] = []
            for tie_class in self.prefs.get(i, ()):
                members = tuple(tie_class)
                if not members:
                    raise InputError("Empty tie-class", details={"player": i})
                for j in members:
                    if j not in position:
                        raise InputError(
                            "Preference references an unknown player",
                            details={"player": i, "target": j},
                        )
                    if j in seen:
                        raise InputError(
                            "Player listed twice in a preference list",
                            details={"player": i, "target": j},
                        )
                    seen.add(j)
                classes.append(tuple(sorted(members, key=position.__getitem__)))
            rest = tuple(j for j in players if j not in seen)
            if rest:
                classes.append(rest)
            normalized[i] = tuple(classes)
        object.__setattr__(self, "players", players)
        object.__setattr__(self, "prefs", normalized)
        object.__setattr__(
            self,
            "_rank",
            {
                i: {j: level for level, cls in enumerate(classes) for j in cls}
                for i, classes in normalized.items()
            },
        )

    @classmethod
    def from_lists(
        cls, players: Iterable[PlayerId], prefs: Mapping[PlayerId, Sequence]
    ) -> "PreferenceGame":
        """Build a game where each list entry is a player id or a tie-class list."""
        classes = {
            i: tuple((e,) if isinstance(e, str) else tuple(e) for e in entries)
            for i, entries in prefs.items()
        }
        return cls(players=tuple(players), prefs=classes)

    def classes(self, i: PlayerId) -> tuple[tuple[PlayerId, ...], ...]:
        return self.prefs[i]

    def rank(self, i: PlayerId, j: PlayerId) -> int:
        """Tie-class index of ``j`` in ``i``'s order; lower is more preferred."""
        return self._rank[i][j]


@dataclass(frozen=True)
class FeasibilityViolation:
    player: PlayerId
    target: PlayerId | None
    excess: Fraction


@dataclass(frozen=True)
class FeasibilityReport:
    ok: bool
    violations: tuple[FeasibilityViolation, ...] = ()


@dataclass(frozen=True)
class Witness:
    player: PlayerId
    level: int | None


@dataclass(frozen=True)
class EquilibriumReport:
    ok: bool
    witness: Witness | None = None
    violations: tuple[FeasibilityViolation, ...] = ()


@dataclass(frozen=True)
class EpsViolation:
    player: PlayerId
    target: PlayerId | None
    condition: str
    amount: Fraction


@dataclass(frozen=True)
class EpsReport:
    ok: bool
    violations: tuple[EpsViolation, ...] = ()


@dataclass(frozen=True)
class DynamicsResult:
    converged: bool
    profile: PrefProfile
    rounds: int


def clean(dist: Mapping[PlayerId, Fraction]) -> WeightDistribution:
    """Drop zero entries so distributions compare structurally."""
    return {j: Fraction(w) for j, w in dist.items() if w != 0}


def self_weight(profile: Mapping[PlayerId, Mapping[PlayerId, Fraction]], j: PlayerId):
    return Fraction(profile[j].get(j, 0))


def _require_players(
    game: PreferenceGame, profile: Mapping, players: Iterable[PlayerId]
) -> None:
    for i in players:
        if i not in profile:
            raise InputError("Profile is missing a player", details={"player": i})
    known = set(game.players)
    for i, dist in profile.items():
        if i not in known:
            raise InputError("Profile names an unknown player", details={"player": i})
        for j in dist:
            if j not in known:
                raise InputError(
                    "Weight on an unknown player", details={"player": i, "target": j}
                )


def check_feasible(
    game: PreferenceGame,
    profile: Mapping[PlayerId, Mapping[PlayerId, Fraction]],
    only: Iterable[PlayerId] | None = None,
) -> FeasibilityReport:
    """
    Check that every distribution sums to one and respects self-weight caps.

    A sum violation is reported with ``target=None``. Negative weights are
    reported as violations on their target with the negated weight as excess.
    """
    rows = game.players if only is None else tuple(only)
    _require_players(game, profile, game.players)
    violations: list[FeasibilityViolation] = []
    for i in rows:
        dist = profile[i]
        total = sum((Fraction(w) for w in dist.values()), Fraction(0))
        if total != 1:
            violations.append(FeasibilityViolation(i, None, total - 1))
        for j in game.players:
            w = Fraction(dist.get(j, 0))
            if w < 0:
                violations.append(FeasibilityViolation(i, j, -w))
            elif j != i and w > self_weight(profile, j):
                excess = w - self_weight(profile, j)
                violations.append(FeasibilityViolation(i, j, excess))
    return FeasibilityReport(ok=not violations, violations=tuple(violations))


def class_totals(
    game: PreferenceGame, i: PlayerId, dist: Mapping[PlayerId, Fraction]
) -> tuple[Fraction, ...]:
    return tuple(
        sum((Fraction(dist.get(j, 0)) for j in cls), Fraction(0))
        for cls in game.classes(i)
    )


def best_response(
    game: PreferenceGame,
    profile: Mapping[PlayerId, Mapping[PlayerId, Fraction]],
    i: PlayerId,
) -> WeightDistribution:
    """
    Greedy lexicographic best response of player ``i``.

    Tie-classes are filled in preference order, each with the smaller of the
    remaining budget and the summed caps of its members. Inside a class the
    allocation is proportional to the caps. The cap of ``i`` itself is 1.
    """
    _require_players(game, profile, (j for j in game.players if j != i))
    budget = Fraction(1)
    response: WeightDistribution = {}
    for cls in game.classes(i):
        if budget == 0:
            break
        caps = {j: Fraction(1) if j == i else self_weight(profile, j) for j in cls}
        total = sum(caps.values(), Fraction(0))
        if total <= 0:
            continue
        give = min(budget, total)
        for j, cap in caps.items():
            if cap > 0:
                response[j] = give * cap / total
        budget -= give
    return response


def is_equilibrium(
    game: PreferenceGame,
    profile: Mapping[PlayerId, Mapping[PlayerId, Fraction]],
    only: Iterable[PlayerId] | None = None,
) -> EquilibriumReport:
    """
    Exact equilibrium test.

    The witness names the first player whose best response has a different
    per-class total, and the first class where the totals differ. An infeasible
    profile is reported with its violations and a witness with no class.
    """
    players = game.players if only is None else tuple(only)
    feasibility = check_feasible(game, profile, only=players)
    if not feasibility.ok:
        first = feasibility.violations[0]
        return EquilibriumReport(
            ok=False,
            witness=Witness(first.player, None),
            violations=feasibility.violations,
        )
    for i in players:
        current = class_totals(game, i, profile[i])
        better = class_totals(game, i, best_response(game, profile, i))
        for level, (have, best) in enumerate(zip(current, better)):
            if have != best:
                logger.debug("Player %s improves at class %s", i, level)
                return EquilibriumReport(ok=False, witness=Witness(i, level))
    return EquilibriumReport(ok=True)


def is_eps_equilibrium(
    game: PreferenceGame,
    profile: Mapping[PlayerId, Mapping[PlayerId, Fraction]],
    eps: Fraction,
    only: Iterable[PlayerId] | None = None,
) -> EpsReport:
    """
    Approximate equilibrium test with non-strict comparisons.

    For every player ``i``: (a) the weights sum to exactly one; (b) no weight on
    ``j`` exceeds ``j``'s self-weight by more than ``eps``; (c) for every ``j``,
    either the weight on players ``i`` ranks at least as high as ``j`` is at least
    ``1 - eps`` or the weight on ``j`` is within ``eps`` of ``j``'s self-weight.
    """
    eps = Fraction(eps)
    if eps < 0:
        raise InputError("eps must be non-negative", details={"eps": str(eps)})
    players = game.players if only is None else tuple(only)
    _require_players(game, profile, game.players)
    violations: list[EpsViolation] = []
    for i in players:
        dist = profile[i]
        total = sum((Fraction(w) for w in dist.values()), Fraction(0))
        if total != 1:
            violations.append(EpsViolation(i, None, "a", total - 1))
        totals = class_totals(game, i, dist)
        prefix: list[Fraction] = []
        running = Fraction(0)
        for amount in totals:
            running += amount
            prefix.append(running)
        for j in game.players:
            w = Fraction(dist.get(j, 0))
            cap = self_weight(profile, j)
            if w > cap + eps:
                violations.append(EpsViolation(i, j, "b", w - cap))
            at_least = prefix[game.rank(i, j)]
            if at_least < 1 - eps and abs(w - cap) > eps:
                violations.append(EpsViolation(i, j, "c", abs(w - cap)))
    return EpsReport(ok=not violations, violations=tuple(violations))


def mix_profiles(
    p: Mapping[PlayerId, Mapping[PlayerId, Fraction]],
    q: Mapping[PlayerId, Mapping[PlayerId, Fraction]],
    lam: Fraction,
) -> PrefProfile:
    """Convex combination ``lam * p + (1 - lam) * q``."""
    lam = Fraction(lam)
    if not 0 <= lam <= 1:
        raise InputError("Mixing weight must lie in [0, 1]", details={"lam": str(lam)})
    if set(p) != set(q):
        raise InputError("Profiles cover different players")
    mixed: PrefProfile = {}
    for i in p:
        keys = set(p[i]) | set(q[i])
        mixed[i] = clean(
            {
                j: lam * Fraction(p[i].get(j, 0)) + (1 - lam) * Fraction(q[i].get(j, 0))
                for j in sorted(keys)
            }
        )
    return mixed


def self_profile(game: PreferenceGame) -> PrefProfile:
    return {i: {i: Fraction(1)} for i in game.players}


def best_response_dynamics(
    game: PreferenceGame,
    init: Mapping[PlayerId, Mapping[PlayerId, Fraction]],
    order: Sequence[PlayerId] | None = None,
    max_rounds: int = 200,
) -> DynamicsResult:
    """
    Round-based best-response dynamics with in-place (Gauss-Seidel) updates.

    ``order`` defaults to round-robin over ``game.players``. The loop stops when
    a full round leaves every distribution unchanged or after ``max_rounds``.
    """
    sequence = tuple(game.players if order is None else order)
    if sorted(sequence) != sorted(game.players):
        raise InputError("Order must be a permutation of the players")
    _require_players(game, init, game.players)
    profile: PrefProfile = {i: clean(init[i]) for i in game.players}

    def play_round(round_number: int) -> bool:
        changed = False
        for i in sequence:
            response = best_response(game, profile, i)
            if response != profile[i]:
                profile[i] = response
                changed = True
        return changed

    outcome = run_rounds(play_round, max_rounds)
    logger.info(
        "Preference dynamics converged=%s after %s rounds",
        outcome.converged,
        outcome.rounds,
    )
    return DynamicsResult(
        converged=outcome.converged, profile=profile, rounds=outcome.rounds
    )

import logging
import random
from typing import Any

from flowgames.config import FlowgamesSettings
from flowgames.errors.exceptions import InputError, UnsupportedMethodError
from flowgames.games import bbc, bgp, personalized, prefgame
from flowgames.models.reports import SolveReport
from flowgames.numerics.rational import format_rational
from flowgames.text_utils import format_profile

logger = logging.getLogger(__name__)

METHODS = ("dynamics", "cycle", "enumerate")
DYNAMICS_KINDS = ("preference", "bgp", "bbc")


class SolveService:
    """Finds equilibria and best responses for every game kind that has a solver."""

    def __init__(self, settings: FlowgamesSettings):
        self.settings = settings

    def solve(
        self,
        kind: str,
        game: Any,
        method: str,
        seed: int,
        init: dict | None = None,
        max_rounds: int | None = None,
    ) -> tuple[SolveReport, list[dict]]:
        """
        Route a game to the solver named by ``method``.

        Returns:
            tuple: The report and the raw profiles it lists.

        Raises:
            UnsupportedMethodError: the method does not apply to the game kind.
        """
        match (method, kind):
            case ("dynamics", _) if kind in DYNAMICS_KINDS:
                return self.dynamics(kind, game, seed, init, max_rounds)
            case ("cycle", "matrix"):
                return self._cycle(game, seed)
            case ("enumerate", "matrix"):
                return self._enumerate(game, seed)
        raise UnsupportedMethodError(
            "Method does not apply to this game kind",
            details={"method": method, "kind": kind},
        )

    def dynamics(
        self,
        kind: str,
        game: Any,
        seed: int,
        init: dict | None = None,
        max_rounds: int | None = None,
    ) -> tuple[SolveReport, list[dict]]:
        rounds = max_rounds or self.settings.max_rounds
        details: dict[str, Any] = {}
        match kind:
            case "preference":
                order = list(game.players)
                random.Random(seed).shuffle(order)
                details["order"] = order
                result = prefgame.best_response_dynamics(
                    game,
                    init if init is not None else prefgame.self_profile(game),
                    order=order,
                    max_rounds=rounds,
                )
                profile = result.profile
            case "bgp":
                result = bgp.stable_paths_dynamics(game, init, max_rounds=rounds)
                profile = result.assignment
            case "bbc":
                result = bbc.connection_dynamics(
                    game,
                    init,
                    max_rounds=rounds,
                    penalty_edges=self.settings.bbc_penalty_edges,
                )
                profile = result.profile
            case _:
                raise UnsupportedMethodError(
                    "No dynamics for this game kind", details={"kind": kind}
                )
        report = SolveReport(
            kind=kind,
            method="dynamics",
            seed=seed,
            converged=result.converged,
            rounds=result.rounds,
            profiles=[format_profile(profile)],
            details=details,
        )
        return report, [profile]

    def _cycle(self, game, seed: int) -> tuple[SolveReport, list[dict]]:
        solution = personalized.find_cycle_equilibrium(game)
        report = SolveReport(
            kind="matrix",
            method="cycle",
            seed=seed,
            profiles=[format_profile(solution.profile)],
            details={"cycle": [f"{player}:{s}" for player, s in solution.cycle]},
        )
        return report, [solution.profile]

    def _enumerate(self, game, seed: int) -> tuple[SolveReport, list[dict]]:
        result = personalized.enumerate_rational_equilibria(
            game, self.settings.enumeration_budget
        )
        report = SolveReport(
            kind="matrix",
            method="enumerate",
            seed=seed,
            lp_count=result.lp_count,
            incomplete=result.incomplete,
            profiles=[format_profile(p) for p in result.profiles],
        )
        return report, list(result.profiles)

    def best_response(
        self, kind: str, game: Any, profile: dict, player: str, seed: int
    ) -> SolveReport:
        """One player's best response with everyone else held at ``profile``."""
        details: dict[str, Any] = {"player": player}
        match kind:
            case "preference":
                if player not in game.players:
                    raise InputError("Unknown player", details={"player": player})
                response: dict | None = prefgame.best_response(game, profile, player)
            case "bgp":
                if player not in game.nodes:
                    raise InputError("Unknown node", details={"player": player})
                response = bgp.lex_max_best_response(game, profile, player)
            case "bbc":
                if player not in game.players:
                    raise InputError("Unknown node", details={"player": player})
                mode = self.settings.bbc_penalty_edges
                response = bbc.best_response(game, profile, player, mode)
                moved = bbc.with_strategy(profile, player, response)
                details["utility"] = format_rational(
                    bbc.utility(game, moved, player, mode)
                )
            case "matrix":
                if player not in game.players:
                    raise InputError("Unknown player", details={"player": player})
                value = personalized.best_response_value(game, profile, player)
                current = personalized.personalized_payoff(game, profile, player)
                details["value"] = format_rational(value)
                details["payoff"] = format_rational(current.value)
                response = None
            case _:
                raise UnsupportedMethodError(
                    "No best response for this game kind", details={"kind": kind}
                )
        logger.info("Best response of %s in %s game", player, kind)
        return SolveReport(
            kind=kind,
            method="best-response",
            seed=seed,
            profiles=[] if response is None else [format_profile({player: response})],
            details=details,
        )

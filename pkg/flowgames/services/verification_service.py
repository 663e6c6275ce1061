import logging
from fractions import Fraction
from pathlib import Path
from typing import Any

from flowgames.config import FlowgamesSettings
from flowgames.errors.exceptions import DataError, UnsupportedMethodError
from flowgames.games import bbc, bgp, personalized, prefgame
from flowgames.models.reports import BatchReport, VerificationReport, WitnessEntry
from flowgames.numerics.rational import format_rational
from flowgames.services.documents import DocumentStore

logger = logging.getLogger(__name__)

GAME_SUFFIX = ".game.json"
PROFILE_SUFFIX = ".profile.json"


def _report(kind, witnesses, seed) -> VerificationReport:
    return VerificationReport(
        kind=kind,
        verdict="not_equilibrium" if witnesses else "equilibrium",
        witnesses=witnesses,
        seed=seed,
    )


class VerificationService:
    def __init__(self, settings: FlowgamesSettings, store: DocumentStore):
        self.settings = settings
        self.store = store

    def verify(
        self,
        kind: str,
        game: Any,
        profile: dict,
        seed: int,
        eps: Fraction | None = None,
    ) -> VerificationReport:
        """Check a profile against the equilibrium notion of its game kind."""
        match kind:
            case "preference":
                witnesses = self._preference(game, profile, eps)
            case "bgp":
                witnesses = self._bgp(game, profile)
            case "bbc":
                witnesses = self._bbc(game, profile)
            case "matrix":
                witnesses = self._matrix(game, profile)
            case _:
                raise UnsupportedMethodError(
                    "No equilibrium check for this game kind", details={"kind": kind}
                )
        logger.info("Verified %s profile: %s witnesses", kind, len(witnesses))
        return _report(kind, witnesses, seed)

    def _preference(self, game, profile, eps) -> list[WitnessEntry]:
        if eps is not None:
            report = prefgame.is_eps_equilibrium(game, profile, eps)
            return [
                WitnessEntry(
                    player=v.player,
                    detail=f"condition {v.condition} on {v.target}: "
                    f"{format_rational(v.amount)}",
                )
                for v in report.violations
            ]
        report = prefgame.is_equilibrium(game, profile)
        if report.ok:
            return []
        if report.violations:
            return [
                WitnessEntry(
                    player=v.player,
                    detail=f"infeasible on {v.target}: {format_rational(v.excess)}",
                )
                for v in report.violations
            ]
        return [WitnessEntry(player=report.witness.player, level=report.witness.level)]

    def _bgp(self, inst, assignment) -> list[WitnessEntry]:
        feasibility = bgp.check_feasible(inst, assignment)
        if not feasibility.ok:
            return [
                WitnessEntry(
                    player=v.node,
                    detail=f"{v.kind} condition: {format_rational(v.excess)}",
                )
                for v in feasibility.violations
            ]
        report = bgp.check_stable(inst, assignment)
        return [
            WitnessEntry(
                player=v.node,
                level=inst.rank(v.node, v.path_index),
                detail="unstable path " + ">".join(v.path),
            )
            for v in report.violations
        ]

    def _bbc(self, inst, profile) -> list[WitnessEntry]:
        report = bbc.is_equilibrium(inst, profile, self.settings.bbc_penalty_edges)
        if report.ok:
            return []
        if report.violations:
            return [
                WitnessEntry(
                    player=v.node, detail=f"{v.kind}: {format_rational(v.amount)}"
                )
                for v in report.violations
            ]
        return [
            WitnessEntry(
                player=report.witness,
                detail=f"utility {format_rational(report.current)}, "
                f"best {format_rational(report.best)}",
            )
        ]

    def _matrix(self, game, profile) -> list[WitnessEntry]:
        report = personalized.is_personalized_equilibrium(game, profile)
        if report.ok:
            return []
        return [
            WitnessEntry(
                player=report.witness,
                detail=f"payoff {format_rational(report.payoff)}, "
                f"best {format_rational(report.best)}",
            )
        ]

    def verify_files(
        self,
        game_path: str | Path,
        profile_path: str | Path,
        seed: int,
        eps: Fraction | None = None,
    ) -> VerificationReport:
        kind, game = self.store.load_game(game_path)
        profile = self.store.load_profile(profile_path, kind)
        report = self.verify(kind, game, profile, seed, eps)
        report.source = str(game_path)
        return report

    def verify_batch(
        self, directory: str | Path, seed: int, eps: Fraction | None = None
    ) -> BatchReport:
        """
        Verify every ``<name>.game.json`` against ``<name>.profile.json``.

        Results keep sorted name order.
        """
        directory = Path(directory)
        games = sorted(directory.glob(f"*{GAME_SUFFIX}"))
        if not games:
            raise DataError(
                "No game files found", details={"directory": str(directory)}
            )
        pairs = []
        for game_path in games:
            name = game_path.name[: -len(GAME_SUFFIX)]
            profile_path = directory / f"{name}{PROFILE_SUFFIX}"
            if not profile_path.exists():
                raise DataError(
                    "Game file has no matching profile",
                    details={"game": str(game_path)},
                )
            pairs.append((game_path, profile_path))

        results = [
            self.verify_files(game_path, profile_path, seed, eps)
            for game_path, profile_path in pairs
        ]
        logger.info("Verified %s pairs from %s", len(results), directory)
        return BatchReport(seed=seed, results=results)

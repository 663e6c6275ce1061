import logging
from typing import Any, Iterable

from flowgames.errors.exceptions import DataError
from flowgames.errors.handlers import parse_payload
from flowgames.games.prefgame import mix_profiles
from flowgames.models.games import GameDocument, ProfileFile
from flowgames.models.reports import (
    BatchReport,
    FixtureEntry,
    FixtureReport,
    SolveReport,
    VerificationReport,
)
from flowgames.numerics.rational import parse_rational
from flowgames.services.verification_service import VerificationService
from flowgames.text_utils import render_table

logger = logging.getLogger(__name__)

FIXTURE_NAMES = ("non_convex_preference", "non_convex_matrix")


class ReportService:
    """Checks the bundled fixtures and renders text summaries of reports."""

    def __init__(self, fixtures: dict[str, Any], verifier: VerificationService):
        self.fixtures = fixtures
        self.verifier = verifier

    def _fixture(self, name: str) -> dict[str, Any]:
        fixture = self.fixtures.get(name)
        if not fixture:
            raise DataError("Bundled fixture is missing", details={"fixture": name})
        return fixture

    def _entry(self, name, label, kind, game, profile, expected, seed) -> FixtureEntry:
        report = self.verifier.verify(kind, game, profile, seed)
        return FixtureEntry(
            fixture=name,
            profile=label,
            expected=expected,
            verdict=report.verdict,
            witness=report.witnesses[0].player if report.witnesses else None,
        )

    def check_fixture(self, name: str, seed: int) -> list[FixtureEntry]:
        """
        Verify both documented equilibria of a fixture and their mixture.

        The equilibria must verify; the mixture must fail.
        """
        fixture = self._fixture(name)
        source = f"fixtures.yml:{name}"
        document = parse_payload(GameDocument, fixture["game"], source)
        kind, game = document.kind, document.to_domain()
        profiles = {
            label: parse_payload(ProfileFile, payload, source).to_domain()
            for label, payload in fixture["equilibria"].items()
        }
        entries = [
            self._entry(name, label, kind, game, profile, "equilibrium", seed)
            for label, profile in profiles.items()
        ]
        first, second = profiles.values()
        lam = parse_rational(fixture["mixture"]["lambda"])
        entries.append(
            self._entry(
                name,
                "mixture",
                kind,
                game,
                mix_profiles(first, second, lam),
                "not_equilibrium",
                seed,
            )
        )
        return entries

    def fixture_report(self, seed: int, names: Iterable[str] = FIXTURE_NAMES):
        entries = [e for name in names for e in self.check_fixture(name, seed)]
        report = FixtureReport(seed=seed, entries=entries)
        logger.info("Fixture report: %s entries, ok=%s", len(entries), report.ok)
        return report


def summarize(report) -> str:
    """Tabulated text summary of any report the CLI writes."""
    if isinstance(report, FixtureReport):
        return render_table(
            (
                (e.fixture, e.profile, e.expected, e.verdict, e.witness or "")
                for e in report.entries
            ),
            headers=("fixture", "profile", "expected", "verdict", "witness"),
        )
    if isinstance(report, BatchReport):
        return render_table(
            (
                (r.source or "", r.verdict, ", ".join(w.player for w in r.witnesses))
                for r in report.results
            ),
            headers=("game", "verdict", "witnesses"),
        )
    if isinstance(report, VerificationReport):
        rows = [
            (w.player, "" if w.level is None else w.level, w.detail)
            for w in report.witnesses
        ]
        table = render_table(rows, headers=("player", "level", "detail"))
        return f"{report.kind}: {report.verdict}\n{table}"
    if isinstance(report, SolveReport):
        rows = [
            (index, owner, key, value)
            for index, profile in enumerate(report.profiles)
            for owner, dist in profile.items()
            for key, value in dist.items()
        ]
        table = render_table(rows, headers=("profile", "owner", "key", "weight"))
        title = f"{report.kind} {report.method}: {len(report.profiles)} profiles"
        return f"{title}\n{table}"
    return str(report)

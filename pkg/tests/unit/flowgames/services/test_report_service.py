import pytest

from flowgames.errors.exceptions import DataError
from flowgames.models.reports import SolveReport
from flowgames.services.report_service import ReportService, summarize


@pytest.fixture
def reporter(fixtures, verifier):
    return ReportService(fixtures, verifier)


def test_fixture_report_matches_documented_verdicts(reporter):
    report = reporter.fixture_report(seed=0)

    assert report.ok
    assert len(report.entries) == 6
    mixtures = [e for e in report.entries if e.profile == "mixture"]
    assert [(e.fixture, e.witness) for e in mixtures] == [
        ("non_convex_preference", "x"),
        ("non_convex_matrix", "P1"),
    ]


def test_missing_fixture_is_a_data_error(verifier):
    with pytest.raises(DataError):
        ReportService({}, verifier).check_fixture("non_convex_matrix", 0)


def test_summary_tabulates_fixture_entries(reporter):
    text = summarize(reporter.fixture_report(seed=0))

    assert "non_convex_matrix" in text
    assert "mixture" in text


def test_summary_of_solve_report_counts_profiles():
    report = SolveReport(
        kind="matrix",
        method="cycle",
        seed=0,
        profiles=[{"P1": {"H": "1/2", "T": "1/2"}}],
    )

    text = summarize(report)

    assert text.startswith("matrix cycle: 1 profiles")
    assert "1/2" in text

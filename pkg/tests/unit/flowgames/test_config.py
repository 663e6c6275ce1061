from fractions import Fraction

import pytest
from pydantic import ValidationError

from flowgames.config import FlowgamesSettings, SettingsManager, load_fixtures


def test_defaults():
    settings = FlowgamesSettings(_env_file=None)

    assert settings.seed == 0
    assert settings.max_rounds == 200
    assert settings.enumeration_budget == 5000
    assert settings.bbc_penalty_edges == "source"
    assert settings.eps_l_value == Fraction(1, 64)


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("FLOWGAMES_SEED", "42")
    monkeypatch.setenv("FLOWGAMES_BBC_PENALTY_EDGES", "all")

    settings = FlowgamesSettings(_env_file=None)

    assert settings.seed == 42
    assert settings.bbc_penalty_edges == "all"


def test_log_level_is_normalized():
    assert FlowgamesSettings(log_level="debug").log_level == "DEBUG"


@pytest.mark.parametrize(
    "field, value",
    [
        ("log_level", "LOUD"),
        ("eps_l", "3/4"),
        ("eps_l", "abc"),
        ("max_rounds", 0),
        ("bbc_penalty_edges", "none"),
    ],
)
def test_invalid_settings_are_rejected(field, value):
    with pytest.raises(ValidationError):
        FlowgamesSettings(**{field: value})


def test_resolve_seed_prefers_explicit_value(monkeypatch):
    monkeypatch.setenv("FLOWGAMES_SEED", "5")
    manager = SettingsManager()

    assert manager.resolve_seed(None) == 5
    assert manager.resolve_seed(9) == 9


def test_bundled_fixtures_are_loaded():
    fixtures = load_fixtures()

    assert set(fixtures) >= {"non_convex_preference", "non_convex_matrix"}


def test_missing_fixture_file_yields_empty_dict(tmp_path):
    assert load_fixtures(tmp_path / "absent.yml") == {}

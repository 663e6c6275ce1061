import json
from fractions import Fraction

import pytest

from flowgames.errors.exceptions import DataParsingError, SchemaError
from flowgames.models.reports import WitnessEntry


def test_load_game_returns_kind_and_instance(store, write_json, fixtures):
    path = write_json("g.json", fixtures["non_convex_preference"]["game"])

    kind, game = store.load_game(path)

    assert kind == "preference"
    assert "x" in game.players


def test_bgp_profiles_use_integer_keys(store, write_json):
    path = write_json("p.json", {"weights": {"a": {"1": "1/2"}}})

    assert store.load_profile(path, "bgp") == {"a": {1: Fraction(1, 2)}}
    assert store.load_profile(path, "preference") == {"a": {"1": Fraction(1, 2)}}


def test_invalid_json_points_at_line(store, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "type": "bgp",\n  oops\n}', encoding="utf-8")

    with pytest.raises(DataParsingError) as excinfo:
        store.load_game(path)

    assert excinfo.value.details["line"] == 3


def test_missing_file_is_a_parsing_error(store, tmp_path):
    with pytest.raises(DataParsingError):
        store.load_circuit(tmp_path / "absent.json")


def test_schema_problems_name_the_file(store, write_json):
    path = write_json("g.json", {"type": "bgp", "paths": {}})

    with pytest.raises(SchemaError) as excinfo:
        store.load_game(path)

    assert str(path) in excinfo.value.message


def test_write_creates_parent_directories(store, tmp_path):
    target = tmp_path / "out" / "witness.json"

    store.write(target, WitnessEntry(player="x", level=1))

    assert json.loads(target.read_text(encoding="utf-8")) == {
        "player": "x",
        "level": 1,
        "detail": "",
    }
    assert target.read_text(encoding="utf-8").startswith('{\n  "player"')

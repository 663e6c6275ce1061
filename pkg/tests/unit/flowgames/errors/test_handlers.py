import pytest

from flowgames.errors.exceptions import (
    AnalysisError,
    DataParsingError,
    InputError,
    SchemaError,
)
from flowgames.errors.handlers import (
    EXIT_ERROR,
    exit_code_for,
    load_json_file,
    run_rounds,
)


@pytest.mark.parametrize(
    "exc",
    [
        InputError("bad"),
        SchemaError("bad"),
        AnalysisError("bad"),
        FileNotFoundError("gone"),
    ],
)
def test_library_and_file_errors_exit_with_two(exc):
    assert exit_code_for(exc) == EXIT_ERROR


def test_unexpected_errors_are_reraised():
    with pytest.raises(KeyError):
        exit_code_for(KeyError("bug"))


def test_errors_keep_their_details():
    error = DataParsingError("broken", details={"line": 3})

    assert error.message == "broken"
    assert error.details == {"line": 3}
    assert str(error) == "broken"


def test_errors_are_logged(mocker):
    log = mocker.patch("flowgames.errors.exceptions.logger")

    InputError("bad value", details={"field": "M"})

    log.error.assert_called_once()
    assert "M" in log.error.call_args.args[0]


def test_rounds_stop_when_nothing_changes(mocker):
    play = mocker.Mock(side_effect=[True, True, False])

    outcome = run_rounds(play, max_rounds=10)

    assert outcome.converged
    assert outcome.rounds == 3
    assert [c.args[0] for c in play.call_args_list] == [1, 2, 3]


def test_rounds_stop_at_the_limit(mocker):
    play = mocker.Mock(return_value=True)

    outcome = run_rounds(play, max_rounds=4)

    assert not outcome.converged
    assert outcome.rounds == 4
    assert play.call_count == 4


def test_rounds_need_a_positive_limit():
    with pytest.raises(InputError):
        run_rounds(lambda n: False, max_rounds=0)


def test_round_errors_propagate(mocker):
    play = mocker.Mock(side_effect=AnalysisError("stuck"))

    with pytest.raises(AnalysisError):
        run_rounds(play, max_rounds=5)
    assert play.call_count == 1


def test_load_json_file_reads_documents(tmp_path):
    path = tmp_path / "doc.json"
    path.write_text('{"a": [1, 2]}', encoding="utf-8")

    assert load_json_file(path) == {"a": [1, 2]}


def test_load_json_file_reports_position(tmp_path):
    path = tmp_path / "doc.json"
    path.write_text('{"a": }', encoding="utf-8")

    with pytest.raises(DataParsingError) as excinfo:
        load_json_file(path)

    assert excinfo.value.details["line"] == 1
    assert excinfo.value.details["column"] == 7

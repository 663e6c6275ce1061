"""
Error handling utilities for the flowgames package.

This module loads and validates input files with location-bearing diagnostics,
maps errors to CLI exit statuses, and provides the bounded round loop used by
every best-response dynamics in the package.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, TypeVar

import pydantic
from tenacity import (
    RetryCallState,
    Retrying,
    retry_if_result,
    stop_after_attempt,
)

from flowgames.errors.exceptions import (
    DataParsingError,
    FlowgamesError,
    InputError,
    SchemaError,
)

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=pydantic.BaseModel)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2

__all__ = [
    "EXIT_ERROR",
    "EXIT_NEGATIVE",
    "EXIT_OK",
    "RoundOutcome",
    "Retrying",
    "exit_code_for",
    "load_json_file",
    "parse_payload",
    "retry_if_result",
    "run_rounds",
    "stop_after_attempt",
]


def _format_location(loc: tuple[Any, ...]) -> str:
    """Render a pydantic error location as a dotted path with list indices."""
    parts: list[str] = []
    for item in loc:
        if isinstance(item, int):
            parts.append(f"[{item}]")
        elif parts:
            parts.append(f".{item}")
        else:
            parts.append(str(item))
    return "".join(parts) or "<root>"


def load_json_file(path: str | Path) -> Any:
    """
    Read a JSON file, raising a diagnostic that points at the offending line.

    Args:
        path: Location of the file.

    Returns:
        The decoded JSON document.

    Raises:
        DataParsingError: If the file cannot be read or is not valid JSON.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DataParsingError(
            f"{path}: cannot read file",
            original_exception=e,
            details={"path": str(path)},
        ) from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DataParsingError(
            f"{path}:{e.lineno}:{e.colno}: {e.msg}",
            original_exception=e,
            details={"path": str(path), "line": e.lineno, "column": e.colno},
        ) from e


def parse_payload(model: type[ModelT], data: Any, source: str = "<input>") -> ModelT:
    """Validate a decoded payload against a schema model."""
    try:
        return model.model_validate(data)
    except pydantic.ValidationError as e:
        first = e.errors()[0]
        location = _format_location(tuple(first["loc"]))
        raise SchemaError(
            f"{source}: {location}: {first['msg']}",
            original_exception=e,
            details={
                "path": source,
                "location": location,
                "error_count": e.error_count(),
            },
        ) from e


def exit_code_for(exc: BaseException) -> int:
    """Map an exception raised during dispatch to the CLI exit status."""
    if isinstance(exc, (FlowgamesError, OSError)):
        return EXIT_ERROR
    raise exc


@dataclass(frozen=True)
class RoundOutcome:
    converged: bool
    rounds: int


def run_rounds(play_round: Callable[[int], bool], max_rounds: int) -> RoundOutcome:
    """
    Repeat ``play_round`` until a round changes nothing or the limit is hit.

    ``play_round`` receives the 1-based round number and returns True when the
    round changed at least one strategy.
    """
    if max_rounds < 1:
        raise InputError(
            "max_rounds must be at least 1", details={"max_rounds": max_rounds}
        )

    def _on_limit(state: RetryCallState) -> bool:
        logger.info("Dynamics stopped after %s rounds", state.attempt_number)
        return True

    retrying = Retrying(
        stop=stop_after_attempt(max_rounds),
        retry=retry_if_result(lambda changed: changed),
        retry_error_callback=_on_limit,
        reraise=True,
    )
    rounds = 0

    def _attempt() -> bool:
        nonlocal rounds
        rounds += 1
        changed = play_round(rounds)
        logger.debug("Round %s changed=%s", rounds, changed)
        return changed

    changed = retrying(_attempt)
    return RoundOutcome(converged=not changed, rounds=rounds)

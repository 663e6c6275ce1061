"""
Custom exceptions for the flowgames package.

This module defines a hierarchy of custom exceptions for the different ways a
game instance, a solution file or an analysis can go wrong, so that the CLI can
map each of them to a diagnostic and an exit status.
"""

import logging
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


class FlowgamesError(Exception):
    """Base exception for all flowgames-specific errors."""

    def __init__(
        self,
        message: str,
        original_exception: Optional[Exception] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message
        self.original_exception = original_exception
        self.details = details or {}

        log_message = message
        if original_exception:
            log_message += " Original exception: %s" % original_exception
        if details:
            log_message += " Details: %s" % details

        logger.error(log_message)

        super().__init__(message)


# Input-related exceptions
class InputError(FlowgamesError):
    """Exception raised when an instance, profile or parameter is malformed."""

    pass


class UnsupportedMethodError(InputError):
    """Exception raised when a solver method cannot handle the given game kind."""

    pass


# Data-related exceptions
class DataError(FlowgamesError):
    """Base exception for all file and payload errors."""

    pass


class DataParsingError(DataError):
    """Exception raised when a file is not valid JSON."""

    pass


class SchemaError(DataError):
    """Exception raised when a payload does not match its declared schema."""

    pass


# Analysis-related exceptions
class PreconditionError(FlowgamesError):
    """Exception raised when an operation is called outside its precondition."""

    pass


class AnalysisError(FlowgamesError):
    """Exception raised when an exact analysis cannot be completed."""

    pass


class InvariantViolation(FlowgamesError):
    """Exception raised when an internal consistency check fails."""

    pass

"""
Lab error types

Every error raised by the library carries a human-readable ``detail``, the HTTP
status the API layer answers with, and the exit code the CLI terminates with.
"""

from fastapi import status


class LabError(Exception):
    """Base class for invalid inputs and violated preconditions"""

    status_code: int = status.HTTP_400_BAD_REQUEST
    exit_code: int = 2

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class CircuitError(LabError):
    """Circuit JSON does not parse or references a bad wire"""

    status_code = status.HTTP_422_UNPROCESSABLE_ENTITY


class LengthMismatchError(LabError):
    """A bit string has the wrong length for its context"""


class SizeLimitError(LabError):
    """An exact enumeration would exceed the configured caps"""

    status_code = status.HTTP_413_REQUEST_ENTITY_TOO_LARGE


class SupportViolationError(LabError):
    """A probability that must be positive is zero"""


class PreconditionError(LabError):
    """Any other violated operation precondition"""

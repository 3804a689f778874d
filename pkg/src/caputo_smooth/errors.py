"""Exception hierarchy shared by the library and the command-line front-end.

The CLI maps each family onto an exit code: :class:`ConfigError` -> 1,
:class:`MathDomainError` -> 2, :class:`InconsistencyError` -> 3.
"""

from __future__ import annotations


class CaputoSmoothError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ConfigError(CaputoSmoothError, ValueError):
    """Invalid user input: malformed configuration, expression or parameter."""

    exit_code = 1


class ExprSyntaxError(ConfigError):
    """Expression text could not be parsed."""

    def __init__(self, message: str, position: int, source: str = "") -> None:
        self.position = position
        self.source = source
        super().__init__(f"{message} at offset {position}")


class MathDomainError(CaputoSmoothError, ArithmeticError):
    """A mathematical operation left its domain (log of a non-positive
    number, division by zero, solver iterate leaving the admissible strip)."""

    exit_code = 2


class DepthExceededError(MathDomainError):
    """Requested derivative order exceeds the supported depth."""


class InconsistencyError(CaputoSmoothError, RuntimeError):
    """Two independent computations of the same quantity disagree."""

    exit_code = 3


class TrivialLatticeError(CaputoSmoothError):
    """Raised when ``m = 0``: no singular expansion is needed below C^0.

    The (empty) summary is attached so callers may continue, e.g. to run the
    direct solver.
    """

    exit_code = 2

    def __init__(self, summary) -> None:
        self.summary = summary
        super().__init__(
            f"m = 0 for n*alpha = {summary.n * summary.alpha.value}: "
            "no singular expansion needed below C^0"
        )

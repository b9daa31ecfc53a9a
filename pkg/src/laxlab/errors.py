"""Shared exception types.

The CLI maps ValidationError to exit code 1 and NumericalError to exit
code 2, so raising the right class here is part of the public contract.
"""


class LaxlabError(Exception):
    """Base class for all package errors."""


class ValidationError(LaxlabError, ValueError):
    """Invalid input: domain violations, malformed parameters or config."""


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an operation."""


class PoleError(ValidationError):
    """Evaluation requested too close to a pole of the function."""


class NumericalError(LaxlabError, RuntimeError):
    """A numerical procedure failed to converge or lost all accuracy.

    Carries the name of the operation that failed so callers (and the
    CLI) can report something actionable.
    """

    def __init__(self, operation, message):
        self.operation = operation
        super().__init__(f"{operation}: {message}")


class WindowTooShortWarning(UserWarning):
    """Field has not decayed to the background at the window ends."""


class LowConfidenceWarning(UserWarning):
    """Result computed outside the regime where the method is reliable."""

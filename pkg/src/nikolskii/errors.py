"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class NumericError(ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    ``estimate`` carries the best value reached (if any) and ``index`` the
    offending item for iterative per-item procedures such as root polishing.
    """

    def __init__(self, message: str, *, estimate: float | None = None, index: int | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.index = index

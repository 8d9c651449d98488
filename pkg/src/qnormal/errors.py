"""Exception types shared across the package."""

from __future__ import annotations


class ConvergenceError(ArithmeticError):
    """An infinite product or series did not reach its tolerance within the term cap.

    ``diagnostics`` carries whatever indices the failing routine reached
    (for example ``{"k": 120, "j": 80}`` for the double Bessel series).
    """

    def __init__(self, message: str, **diagnostics: object) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics

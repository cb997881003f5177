"""Exception hierarchy shared by every probcone module."""

from __future__ import annotations


class ProbconeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(ProbconeError, ValueError):
    """An argument violates its contract (range, shape, emptiness)."""


class DivergenceError(ProbconeError):
    """An iteration produced non-finite values.

    Carries whatever partial state was available so callers can inspect
    how far the run got before blowing up.
    """

    def __init__(self, message: str, *, trace=None):
        super().__init__(message)
        self.trace = trace


class RateNotCertifiedError(ProbconeError):
    """The combined contraction rate is >= 1, so no geometric certificate exists."""

    def __init__(self, delta: float):
        super().__init__(f"rate not certified: combined rate delta={delta} >= 1")
        self.delta = delta


class InfeasibleRegionError(ProbconeError):
    """Rejection sampling could not find points in the feasible region."""


class ConfigError(ProbconeError, ValueError):
    """A CLI configuration file failed schema validation."""

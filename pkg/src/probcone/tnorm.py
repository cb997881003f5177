"""Triangular norms: the aggregators of the probabilistic triangle inequality.

Three classical continuous t-norms are supported. All are commutative,
associative, monotone in each argument, and have identity 1; they are
pointwise ordered LUKASIEWICZ <= PRODUCT <= MINIMUM.
"""

from __future__ import annotations

import enum
from typing import Iterable

import numpy as np

from .errors import InvalidParameterError


def _check_unit(value, name: str):
    arr = np.asarray(value, dtype=float)
    if arr.size == 0:
        return arr
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise InvalidParameterError(f"{name} must lie in [0, 1], got {value!r}")
    return arr


class TNorm(enum.Enum):
    """A named continuous t-norm on [0, 1]."""

    MINIMUM = "min"
    PRODUCT = "product"
    LUKASIEWICZ = "lukasiewicz"

    def apply(self, a, b):
        """Combine two values (scalars or same-shape arrays) in [0, 1].

        MINIMUM is min(a, b), PRODUCT is a*b, and LUKASIEWICZ is
        max(a + b - 1, 0).
        """
        a = _check_unit(a, "a")
        b = _check_unit(b, "b")
        if self is TNorm.MINIMUM:
            out = np.minimum(a, b)
        elif self is TNorm.PRODUCT:
            out = a * b
        else:
            # a - (1 - b) rather than a + b - 1: same value, but the
            # identity law apply(a, 1) == a then holds exactly in floats.
            out = np.maximum(a - (1.0 - b), 0.0)
        if np.ndim(out) == 0:
            return float(out)
        return out

    def fold(self, values: Iterable[float]) -> float:
        """Left-fold of ``apply`` over an ordered sequence; empty input gives 1.

        The fold order is fixed (left to right) so results are bitwise
        reproducible; by associativity the choice is semantically neutral.
        """
        acc = 1.0
        for i, v in enumerate(values):
            v = _check_unit(v, f"values[{i}]")
            acc = self.apply(acc, float(v))
        return float(acc)

    @classmethod
    def from_name(cls, name: str) -> "TNorm":
        """Look up a t-norm by its config name: 'min', 'product' or 'lukasiewicz'."""
        for member in cls:
            if member.value == name:
                return member
        raise InvalidParameterError(
            f"unknown t-norm {name!r}; expected one of "
            f"{[m.value for m in cls]}"
        )

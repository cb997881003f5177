"""Contraction classifiers for self-maps of a probabilistic cone metric space.

Each checker samples point pairs, evaluates a contraction inequality on a
time grid, and returns a :class:`ContractionCertificate` with the worst
margin and, on failure, the witnessing (x, y, t). Four conditions ship:

* banach      -- F(Tx, Ty)(t) >= F(x, y)(t / alpha),              alpha in (0, 1)
* kannan      -- F(Tx, Ty)(t) >= min of the two self-displacement
                 distributions at t / (2 alpha),                   alpha in (0, 1/2)
* chatterjea  -- as kannan but with the two cross distributions
                 F(x, Ty), F(y, Tx),                               alpha in (0, 1/2)
* zamfirescu  -- pointwise disjunction of the three above with
                 constants (alpha, beta, gamma); the margin at each
                 (x, y, t) is the best clause margin.

The disjunction is evaluated per (x, y, t) triple, matching the quantifier
"for each x, y and t > 0, at least one of"; a per-(x, y) reading would be
stricter and is not implemented.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .dist import TimeGrid, default_comparison_tol
from .errors import InvalidParameterError, RateNotCertifiedError
from .space import PCMSpace, sample_points


@dataclass(frozen=True)
class Mapping:
    """A deterministic self-map of R^d with a display name.

    ``note`` carries a caveat that reports about this map must surface
    (for example a convention adopted where the defining formula is
    undefined).
    """

    fn: Callable[[np.ndarray], np.ndarray]
    name: str = ""
    note: str = ""

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)


@dataclass(frozen=True, eq=False)
class ContractionCertificate:
    """Sampled-falsification verdict for one contraction condition."""

    kind: str
    params: dict
    n_pairs: int
    grid: TimeGrid
    worst_margin: float
    passed: bool
    tol: float
    witness: Optional[dict] = None
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.passed and self.witness is not None:
            raise InvalidParameterError("a passing certificate must not carry a witness")
        if not self.passed and self.witness is None:
            raise InvalidParameterError("a failing certificate must carry a witness")


def sample_pairs(
    space: PCMSpace, mapping: Mapping, n_pairs: int, rng: np.random.Generator
) -> list:
    """Sample n point pairs for falsification.

    The first two pairs are chosen deliberately: a diagonal pair (x, x) and
    a displacement pair (x, Tx), both of which the fixed-point arguments
    lean on. The rest are independent uniform draws.
    """
    if n_pairs < 1:
        raise InvalidParameterError(f"need at least one pair, got {n_pairs}")
    left = sample_points(space, n_pairs, rng)
    right = sample_points(space, n_pairs, rng)
    pairs = [(left[i], right[i]) for i in range(n_pairs)]
    if n_pairs >= 1:
        pairs[0] = (left[0], left[0])
    if n_pairs >= 2:
        pairs[1] = (left[1], mapping(left[1]))
    return pairs


def _coerce_pairs(space, mapping, pairs, seed):
    if isinstance(pairs, int):
        rng = np.random.default_rng(seed)
        return sample_pairs(space, mapping, pairs, rng)
    out = []
    for x, y in pairs:
        out.append((np.asarray(x, dtype=float), np.asarray(y, dtype=float)))
    if not out:
        raise InvalidParameterError("explicit pair list must be nonempty")
    return out


def _resolve_tol(space: PCMSpace, pairs, tol) -> float:
    if tol is not None:
        return float(tol)
    x, y = pairs[0]
    return default_comparison_tol(space.distance(x, y))


def _margins_banach(space, mapping, x, y, t, alpha):
    lhs = np.asarray(space.distance(mapping(x), mapping(y)).eval(t))
    rhs = np.asarray(space.distance(x, y).eval(t / alpha))
    return lhs - rhs


def _margins_kannan(space, mapping, x, y, t, alpha):
    tx, ty = mapping(x), mapping(y)
    lhs = np.asarray(space.distance(tx, ty).eval(t))
    scaled = t / (2.0 * alpha)
    rhs = np.minimum(
        np.asarray(space.distance(x, tx).eval(scaled)),
        np.asarray(space.distance(y, ty).eval(scaled)),
    )
    return lhs - rhs


def _margins_chatterjea(space, mapping, x, y, t, alpha):
    tx, ty = mapping(x), mapping(y)
    lhs = np.asarray(space.distance(tx, ty).eval(t))
    scaled = t / (2.0 * alpha)
    rhs = np.minimum(
        np.asarray(space.distance(x, ty).eval(scaled)),
        np.asarray(space.distance(y, tx).eval(scaled)),
    )
    return lhs - rhs


def _certify(kind, params, space, mapping, margins_fn, pairs, grid, tol, seed, notes=()):
    pair_list = _coerce_pairs(space, mapping, pairs, seed)
    grid = TimeGrid.coerce(grid)
    tol = _resolve_tol(space, pair_list, tol)
    t = grid.points

    worst = np.inf
    witness = None
    for x, y in pair_list:
        margins = margins_fn(space, mapping, x, y, t, **params)
        k = int(np.argmin(margins))
        if margins[k] < worst:
            worst = float(margins[k])
            witness = {"x": x.tolist(), "y": y.tolist(), "t": float(t[k])}
    passed = worst >= -tol
    return ContractionCertificate(
        kind=kind,
        params=dict(params),
        n_pairs=len(pair_list),
        grid=grid,
        worst_margin=worst,
        passed=passed,
        tol=tol,
        witness=None if passed else witness,
        notes=tuple(notes),
    )


def check_banach(space, mapping, alpha, pairs=64, grid=None, tol=None, seed=0) -> ContractionCertificate:
    """Certify F(Tx, Ty)(t) >= F(x, y)(t / alpha) over sampled pairs and a grid."""
    if not 0.0 < alpha < 1.0:
        raise InvalidParameterError(f"banach rate must lie in (0, 1), got {alpha}")
    return _certify("banach", {"alpha": alpha}, space, mapping, _margins_banach, pairs, grid, tol, seed)


def check_kannan(space, mapping, alpha, pairs=64, grid=None, tol=None, seed=0) -> ContractionCertificate:
    """Certify the self-displacement contraction condition at rate alpha."""
    if not 0.0 < alpha < 0.5:
        raise InvalidParameterError(f"kannan rate must lie in (0, 1/2), got {alpha}")
    return _certify("kannan", {"alpha": alpha}, space, mapping, _margins_kannan, pairs, grid, tol, seed)


def check_chatterjea(space, mapping, alpha, pairs=64, grid=None, tol=None, seed=0) -> ContractionCertificate:
    """Certify the cross-displacement contraction condition at rate alpha."""
    if not 0.0 < alpha < 0.5:
        raise InvalidParameterError(f"chatterjea rate must lie in (0, 1/2), got {alpha}")
    return _certify("chatterjea", {"alpha": alpha}, space, mapping, _margins_chatterjea, pairs, grid, tol, seed)


def check_zamfirescu(
    space, mapping, alpha, beta, gamma, pairs=64, grid=None, tol=None, seed=0
) -> ContractionCertificate:
    """Certify the hybrid condition: at each (x, y, t) at least one clause holds."""
    if not 0.0 < alpha < 1.0:
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0.0 < beta < 0.5:
        raise InvalidParameterError(f"beta must lie in (0, 1/2), got {beta}")
    if not 0.0 < gamma < 0.5:
        raise InvalidParameterError(f"gamma must lie in (0, 1/2), got {gamma}")

    def margins_fn(space, mapping, x, y, t, alpha, beta, gamma):
        m1 = _margins_banach(space, mapping, x, y, t, alpha)
        m2 = _margins_kannan(space, mapping, x, y, t, beta)
        m3 = _margins_chatterjea(space, mapping, x, y, t, gamma)
        return np.maximum(np.maximum(m1, m2), m3)

    return _certify(
        "zamfirescu",
        {"alpha": alpha, "beta": beta, "gamma": gamma},
        space,
        mapping,
        margins_fn,
        pairs,
        grid,
        tol,
        seed,
    )


def zamfirescu_delta(alpha: float, beta: float, gamma: float) -> float:
    """Combined geometric rate max(alpha, 2 beta / (1 - beta), 2 gamma / (1 - gamma)).

    Raises :class:`RateNotCertifiedError` carrying the value when it reaches
    1: the stated parameter ranges allow beta or gamma >= 1/3, where the
    corresponding clause rate leaves (0, 1) and no geometric certificate
    exists.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0.0 < beta < 0.5:
        raise InvalidParameterError(f"beta must lie in (0, 1/2), got {beta}")
    if not 0.0 < gamma < 0.5:
        raise InvalidParameterError(f"gamma must lie in (0, 1/2), got {gamma}")
    delta = max(alpha, 2.0 * beta / (1.0 - beta), 2.0 * gamma / (1.0 - gamma))
    if delta >= 1.0:
        raise RateNotCertifiedError(delta)
    return delta

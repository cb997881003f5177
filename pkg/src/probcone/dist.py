"""Distribution-valued distances.

A distance value here is not a number but a left-continuous, non-decreasing
function F: R -> [0, 1]; F(t) reads "probability that the distance is less
than t". Four concrete shapes cover everything the toolkit needs:

* ``DiracStep(d)``      -- the classical metric embedding: 0 up to d, then 1.
* ``GaussianShift(d)``  -- Phi(t - d) with Phi the standard normal CDF.
* ``ScaledGaussian(delta)`` -- delta * Phi(t) for t > 0, else 0. With
  delta < 1 this is a *sub*-distribution (its upper limit is delta, not 1);
  such values are admitted and flagged via ``is_proper`` rather than
  rejected, because diagnostic reports need to witness them.
* ``Empirical(samples)`` -- the empirical CDF with *strict* counting
  ``#{s_i < t}/n``, which keeps it left-continuous at every atom.

All values are immutable after construction and safe to share across
threads. ``eval`` accepts scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import ndtr

from .errors import InvalidParameterError

ArrayLike = Union[float, np.ndarray]

DEFAULT_GRID_START = 1e-3
DEFAULT_GRID_STOP = 1e2
DEFAULT_GRID_SIZE = 50


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing positive evaluation times.

    Finite grids stand in for the "for all t > 0" quantifier; every
    monotone DistFn variant bounds the error of that relaxation.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise InvalidParameterError("time grid must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(pts)):
            raise InvalidParameterError("time grid must be finite")
        if pts[0] <= 0.0:
            raise InvalidParameterError("time grid points must be positive")
        if np.any(np.diff(pts) <= 0.0):
            raise InvalidParameterError("time grid must be strictly increasing")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.size)

    @classmethod
    def default(cls) -> "TimeGrid":
        """50 log-spaced points on [1e-3, 1e2]."""
        return cls(np.geomspace(DEFAULT_GRID_START, DEFAULT_GRID_STOP, DEFAULT_GRID_SIZE))

    @classmethod
    def coerce(cls, grid) -> "TimeGrid":
        if grid is None:
            return cls.default()
        if isinstance(grid, TimeGrid):
            return grid
        return cls(np.asarray(grid, dtype=float))


class DistFn:
    """Common surface of all distribution-function variants."""

    def eval(self, t: ArrayLike) -> ArrayLike:  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def is_proper(self) -> bool:
        """True iff the limit at +infinity is 1."""
        return True

    def _scaled(self, c: float) -> "DistFn":
        return Rescaled(self, c)


def _as_eval_result(values: np.ndarray, scalar: bool) -> ArrayLike:
    if scalar:
        return float(values)
    return values


@dataclass(frozen=True)
class DiracStep(DistFn):
    """Step distribution of a deterministic distance d: 0 for t <= d, 1 after."""

    d: float

    def __post_init__(self):
        if not np.isfinite(self.d) or self.d < 0.0:
            raise InvalidParameterError(f"DiracStep distance must be finite and >= 0, got {self.d}")

    def eval(self, t: ArrayLike) -> ArrayLike:
        arr = np.asarray(t, dtype=float)
        return _as_eval_result(np.where(arr > self.d, 1.0, 0.0), arr.ndim == 0)

    def _scaled(self, c: float) -> DistFn:
        return DiracStep(c * self.d)


@dataclass(frozen=True)
class GaussianShift(DistFn):
    """Phi(t - d): a unit normal CDF translated by d (d may be any real)."""

    d: float

    def __post_init__(self):
        if not np.isfinite(self.d):
            raise InvalidParameterError(f"GaussianShift offset must be finite, got {self.d}")

    def eval(self, t: ArrayLike) -> ArrayLike:
        arr = np.asarray(t, dtype=float)
        return _as_eval_result(np.asarray(ndtr(arr - self.d)), arr.ndim == 0)


@dataclass(frozen=True)
class ScaledGaussian(DistFn):
    """delta * Phi(t) for t > 0 and 0 elsewhere; sub-distribution when delta < 1."""

    delta: float

    def __post_init__(self):
        if not (0.0 < self.delta <= 1.0):
            raise InvalidParameterError(f"scale must lie in (0, 1], got {self.delta}")

    def eval(self, t: ArrayLike) -> ArrayLike:
        arr = np.asarray(t, dtype=float)
        vals = np.where(arr > 0.0, self.delta * np.asarray(ndtr(arr)), 0.0)
        return _as_eval_result(vals, arr.ndim == 0)

    @property
    def is_proper(self) -> bool:
        return self.delta == 1.0


@dataclass(frozen=True, eq=False)
class Empirical(DistFn):
    """Empirical CDF with strict counting: eval(t) = #{s_i < t} / n."""

    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidParameterError("empirical samples must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise InvalidParameterError("empirical samples must be finite")
        if arr.min() < 0.0:
            raise InvalidParameterError("empirical samples must be non-negative")
        arr = np.sort(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def n(self) -> int:
        return int(self.samples.size)

    def eval(self, t: ArrayLike) -> ArrayLike:
        arr = np.asarray(t, dtype=float)
        # side='left' counts samples strictly below t, preserving
        # left-continuity at every atom.
        counts = np.searchsorted(self.samples, arr, side="left")
        return _as_eval_result(counts / self.n, arr.ndim == 0)

    def _scaled(self, c: float) -> DistFn:
        return Empirical(self.samples * c)


@dataclass(frozen=True)
class Rescaled(DistFn):
    """Time-rescaled view of another distribution: eval(t) = base.eval(t / scale)."""

    base: DistFn
    scale: float

    def __post_init__(self):
        if not np.isfinite(self.scale) or self.scale <= 0.0:
            raise InvalidParameterError(f"scale must be positive, got {self.scale}")

    def eval(self, t: ArrayLike) -> ArrayLike:
        arr = np.asarray(t, dtype=float)
        return _as_eval_result(np.asarray(self.base.eval(arr / self.scale)), arr.ndim == 0)

    @property
    def is_proper(self) -> bool:
        return self.base.is_proper

    def _scaled(self, c: float) -> DistFn:
        return Rescaled(self.base, self.scale * c)


def from_samples(values) -> Empirical:
    """Build the empirical distribution of observed non-negative distances."""
    return Empirical(np.asarray(values, dtype=float))


def timescale(dist: DistFn, c: float) -> DistFn:
    """Distribution of the same quantity with time measured in units of c.

    The result G satisfies G.eval(t) == dist.eval(t / c) for every t.
    Step and empirical variants rescale their support exactly; the
    Gaussian shapes are wrapped, since Phi(t/c - d) leaves the family.
    """
    if not np.isfinite(c) or c <= 0.0:
        raise InvalidParameterError(f"timescale factor must be positive, got {c}")
    if c == 1.0:
        return dist
    return dist._scaled(c)


def pointwise_min(f: DistFn, g: DistFn, grid=None) -> np.ndarray:
    """Tabulate min(f(t), g(t)) over a time grid."""
    grid = TimeGrid.coerce(grid)
    fv = np.asarray(f.eval(grid.points))
    gv = np.asarray(g.eval(grid.points))
    return np.minimum(fv, gv)


@dataclass(frozen=True)
class DominanceResult:
    """Outcome of a pointwise >= comparison over a grid."""

    holds: bool
    worst_margin: float
    witness_t: float


def empirical_sample_count(dist: DistFn):
    """Sample count of an empirical distribution (unwrapping rescales), else None."""
    if isinstance(dist, Empirical):
        return dist.n
    if isinstance(dist, Rescaled):
        return empirical_sample_count(dist.base)
    return None


def default_comparison_tol(*dists: DistFn) -> float:
    """Comparison slack: 0 for analytic shapes, 2/sqrt(n) when empirical.

    The 2/sqrt(n) term is a two-sided binomial heuristic for the sampling
    noise of an n-sample empirical CDF; with several empirical operands the
    loosest (smallest n) wins.
    """
    tol = 0.0
    for dist in dists:
        n = empirical_sample_count(dist)
        if n is not None:
            tol = max(tol, 2.0 / np.sqrt(n))
    return tol


def dominates(f: DistFn, g: DistFn, grid=None, tol=None) -> DominanceResult:
    """Check f >= g pointwise on a grid, up to tol.

    Returns the worst margin min_t (f(t) - g(t)) and the grid point
    attaining it. ``tol=None`` uses :func:`default_comparison_tol`.
    """
    grid = TimeGrid.coerce(grid)
    if tol is None:
        tol = default_comparison_tol(f, g)
    margins = np.asarray(f.eval(grid.points)) - np.asarray(g.eval(grid.points))
    idx = int(np.argmin(margins))
    worst = float(margins[idx])
    return DominanceResult(holds=worst >= -tol, worst_margin=worst, witness_t=float(grid.points[idx]))


def to_summary(dist: DistFn) -> dict:
    """Tagged JSON-ready record describing a distribution value.

    Analytic shapes carry their parameters; empirical ones carry the sample
    count plus a five-point quantile sketch.
    """
    if isinstance(dist, DiracStep):
        return {"variant": "dirac-step", "d": float(dist.d)}
    if isinstance(dist, GaussianShift):
        return {"variant": "gaussian-shift", "d": float(dist.d)}
    if isinstance(dist, ScaledGaussian):
        return {"variant": "scaled-gaussian", "delta": float(dist.delta)}
    if isinstance(dist, Empirical):
        q = np.percentile(dist.samples, [0, 25, 50, 75, 100])
        return {
            "variant": "empirical",
            "n": dist.n,
            "quantiles": {
                "min": float(q[0]),
                "p25": float(q[1]),
                "p50": float(q[2]),
                "p75": float(q[3]),
                "max": float(q[4]),
            },
        }
    if isinstance(dist, Rescaled):
        return {"variant": "rescaled", "scale": float(dist.scale), "base": to_summary(dist.base)}
    raise InvalidParameterError(f"unknown distribution variant: {type(dist).__name__}")

"""Fixed-point iteration with distributional convergence certificates.

``picard`` runs x_{n+1} = T x_n, stopping when successive iterates pass the
tau-closeness test (the true limit is unknown mid-run, so the stopping rule
uses consecutive iterates; the returned trace keeps everything needed to
re-test against the final limit afterwards).

``check_bounds`` then verifies the two a-priori lower bounds that a
self-displacement contraction at rate alpha guarantees along its orbit:

* per step:   F(x_n, x_{n+1})(t) >= F(x_0, x_1)(t / (2 alpha)^n)
* per window: F(x_n, x_m)(t)     >= fold_T over j = n..m-1 of
              F(x_0, x_1)(t / ((m - n) (2 alpha)^j))

Violations are report content, not exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .contract import Mapping
from .dist import DistFn, TimeGrid, empirical_sample_count
from .errors import DivergenceError, InvalidParameterError
from .parallel import ordered_map
from .space import PCMSpace, tau_converged
from .tnorm import TNorm


@dataclass(frozen=True, eq=False)
class IterationTrace:
    """One orbit of the map, with per-step distance distributions."""

    points: np.ndarray  # (n_iters + 1, dim)
    step_dists: Tuple[DistFn, ...]  # F(x_n, x_{n+1}) for each step
    step_values: np.ndarray  # step_dists evaluated on grid, (n_iters, len(grid))
    grid: TimeGrid
    stopped_reason: str  # "converged" | "max_iter" ("diverged" on error traces)
    eps: float
    space: PCMSpace

    @property
    def n_iters(self) -> int:
        return int(self.points.shape[0] - 1)

    @property
    def limit(self) -> np.ndarray:
        return self.points[-1]


def picard(
    space: PCMSpace,
    mapping: Mapping,
    x0,
    eps: Optional[float] = None,
    max_iter: int = 10_000,
    grid=None,
) -> IterationTrace:
    """Iterate the map from x0 until successive iterates are tau-close.

    ``eps=None`` picks 1e-6, or 1e-2 when the space's distances are
    empirical (sampling noise makes tighter stopping unreachable). Raises
    :class:`~probcone.errors.InvalidParameterError` when x0 is outside the
    declared cone, and :class:`~probcone.errors.DivergenceError` (carrying
    the partial trace) when an iterate goes non-finite. Slow
    non-convergence is not an error; it ends with reason "max_iter".
    """
    if max_iter < 1:
        raise InvalidParameterError(f"max_iter must be >= 1, got {max_iter}")
    grid = TimeGrid.coerce(grid)
    x = np.asarray(x0, dtype=float)
    if x.shape != (space.dim,):
        raise InvalidParameterError(f"x0 must have dimension {space.dim}, got shape {x.shape}")
    if not space.feasible(x):
        raise InvalidParameterError("x0 is outside the declared cone")
    if eps is None:
        eps = 1e-2 if empirical_sample_count(space.distance(x, x)) is not None else 1e-6
    if not np.isfinite(eps) or eps <= 0.0:
        raise InvalidParameterError(f"eps must be positive, got {eps}")

    points = [x]
    step_dists = []
    step_values = []
    reason = "max_iter"
    for _ in range(max_iter):
        x_next = mapping(x)
        if not np.all(np.isfinite(x_next)):
            partial = IterationTrace(
                points=np.asarray(points),
                step_dists=tuple(step_dists),
                step_values=np.asarray(step_values).reshape(len(step_values), len(grid)),
                grid=grid,
                stopped_reason="diverged",
                eps=eps,
                space=space,
            )
            raise DivergenceError(
                f"non-finite iterate after {len(points)} steps", trace=partial
            )
        step = space.distance(x, x_next)
        step_dists.append(step)
        step_values.append(np.asarray(step.eval(grid.points)))
        points.append(x_next)
        if tau_converged(space, x, x_next, eps):
            reason = "converged"
            x = x_next
            break
        x = x_next

    return IterationTrace(
        points=np.asarray(points),
        step_dists=tuple(step_dists),
        step_values=np.asarray(step_values),
        grid=grid,
        stopped_reason=reason,
        eps=eps,
        space=space,
    )


def kannan_bound(first_step: DistFn, alpha: float, n: int, t):
    """Guaranteed lower bound for the n-th step distribution at time t.

    ``first_step`` is F(x_0, x_1); the bound is its value at
    t / (2 alpha)^n. n = 0 reduces to the first step itself. ``t`` may be
    a scalar or an array of positive times.
    """
    if not 0.0 < alpha < 0.5:
        raise InvalidParameterError(f"rate must lie in (0, 1/2), got {alpha}")
    if n < 0:
        raise InvalidParameterError(f"step index must be >= 0, got {n}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0.0):
        raise InvalidParameterError("t must be positive")
    scale = (2.0 * alpha) ** n
    with np.errstate(divide="ignore", over="ignore"):
        arg = t_arr / scale
    out = first_step.eval(arg)
    return float(out) if t_arr.ndim == 0 else out


def cauchy_chain_bound(
    first_step: DistFn, alpha: float, n: int, m: int, t: float, tnorm: TNorm
) -> float:
    """Lower bound for F(x_n, x_m)(t) from the t-norm chain of first-step terms.

    Folds the values F(x_0, x_1)(t / ((m - n) (2 alpha)^j)) for
    j = n .. m-1 with the given t-norm (left fold, empty never occurs since
    n < m).
    """
    if not 0.0 < alpha < 0.5:
        raise InvalidParameterError(f"rate must lie in (0, 1/2), got {alpha}")
    if not (0 <= n < m):
        raise InvalidParameterError(f"need 0 <= n < m, got n={n}, m={m}")
    if not np.isfinite(t) or t <= 0.0:
        raise InvalidParameterError(f"t must be positive, got {t}")
    gap = float(m - n)
    terms = []
    for j in range(n, m):
        with np.errstate(divide="ignore", over="ignore"):
            arg = t / (gap * (2.0 * alpha) ** j)
        terms.append(float(first_step.eval(arg)))
    return tnorm.fold(terms)


def _chain_bound_on_grid(first_step, alpha, n, m, t, tnorm) -> np.ndarray:
    gap = float(m - n)
    acc = np.ones_like(t)
    for j in range(n, m):
        with np.errstate(divide="ignore", over="ignore"):
            arg = t / (gap * (2.0 * alpha) ** j)
        acc = tnorm.apply(acc, np.asarray(first_step.eval(arg)))
    return acc


@dataclass(frozen=True, eq=False)
class BoundCheck:
    """Observed orbit distributions against the guaranteed lower bounds."""

    grid: TimeGrid
    alpha: float
    tol: float
    step_lhs: np.ndarray
    step_rhs: np.ndarray
    step_margins: np.ndarray
    chain_pairs: Tuple[Tuple[int, int], ...]
    chain_lhs: np.ndarray
    chain_rhs: np.ndarray
    chain_margins: np.ndarray
    holds: bool
    n_violations: int
    worst_margin: float


def check_bounds(
    trace: IterationTrace,
    alpha: float,
    grid=None,
    tnorm: Optional[TNorm] = None,
    tol: float = 0.0,
    max_chain_pairs: int = 32,
    seed: int = 0,
) -> BoundCheck:
    """Verify the per-step and chain lower bounds along a trace.

    Chain pairs (n, m) with n < m are enumerated exhaustively when few,
    otherwise sampled deterministically from ``seed``.
    """
    if not 0.0 < alpha < 0.5:
        raise InvalidParameterError(f"rate must lie in (0, 1/2), got {alpha}")
    if trace.points.shape[0] < 2:
        raise InvalidParameterError("trace must contain at least two points")
    grid = TimeGrid.coerce(grid)
    tnorm = trace.space.tnorm if tnorm is None else tnorm
    t = grid.points
    first_step = trace.step_dists[0]
    n_steps = len(trace.step_dists)

    step_lhs = np.asarray([np.asarray(d.eval(t)) for d in trace.step_dists])
    step_rhs = np.asarray([kannan_bound(first_step, alpha, n, t) for n in range(n_steps)])
    step_margins = step_lhs - step_rhs

    all_pairs = [(n, m) for n in range(n_steps) for m in range(n + 1, n_steps + 1) if m - n >= 2]
    if len(all_pairs) > max_chain_pairs:
        rng = np.random.default_rng(seed)
        idx = rng.choice(len(all_pairs), size=max_chain_pairs, replace=False)
        pairs = [all_pairs[i] for i in sorted(idx)]
    else:
        pairs = all_pairs

    chain_lhs = np.empty((len(pairs), len(grid)))
    chain_rhs = np.empty((len(pairs), len(grid)))
    for row, (n, m) in enumerate(pairs):
        chain_lhs[row] = np.asarray(
            trace.space.distance(trace.points[n], trace.points[m]).eval(t)
        )
        chain_rhs[row] = _chain_bound_on_grid(first_step, alpha, n, m, t, tnorm)
    chain_margins = chain_lhs - chain_rhs

    violations = int(np.sum(step_margins < -tol)) + int(np.sum(chain_margins < -tol))
    worst_candidates = [step_margins.min()] + ([chain_margins.min()] if chain_margins.size else [])
    worst = float(min(worst_candidates))
    return BoundCheck(
        grid=grid,
        alpha=alpha,
        tol=tol,
        step_lhs=step_lhs,
        step_rhs=step_rhs,
        step_margins=step_margins,
        chain_pairs=tuple(pairs),
        chain_lhs=chain_lhs,
        chain_rhs=chain_rhs,
        chain_margins=chain_margins,
        holds=violations == 0,
        n_violations=violations,
        worst_margin=worst,
    )


@dataclass(frozen=True)
class FixedPointCheck:
    is_fixed: bool
    worst: float


def verify_fixed_point(space: PCMSpace, mapping: Mapping, x, grid=None, tol: float = 0.0) -> FixedPointCheck:
    """Accept x as fixed iff F(Tx, x) sits at 1 (within tol) across the grid."""
    grid = TimeGrid.coerce(grid)
    x = np.asarray(x, dtype=float)
    values = np.asarray(space.distance(mapping(x), x).eval(grid.points))
    worst = float(values.min())
    return FixedPointCheck(is_fixed=worst >= 1.0 - tol, worst=worst)


@dataclass(frozen=True, eq=False)
class UniquenessResult:
    unique: bool
    limits: np.ndarray  # (n_starts, dim)
    stopped_reasons: Tuple[str, ...]


def uniqueness_probe(
    space: PCMSpace,
    mapping: Mapping,
    starts: Sequence,
    eps: Optional[float] = None,
    max_iter: int = 10_000,
    agree_tol: float = 1e-6,
    workers: int = 1,
) -> UniquenessResult:
    """Run independent orbits and test whether all limits coincide.

    ``unique`` requires every orbit to converge and every pair of limits to
    pass the tau-closeness test at ``agree_tol``. Divergence of any orbit
    propagates as an error.
    """
    starts = [np.asarray(s, dtype=float) for s in starts]
    if len(starts) < 2:
        raise InvalidParameterError("need at least two starts to probe uniqueness")

    traces = ordered_map(
        lambda s: picard(space, mapping, s, eps=eps, max_iter=max_iter), starts, workers=workers
    )
    limits = np.asarray([tr.limit for tr in traces])
    reasons = tuple(tr.stopped_reason for tr in traces)
    unique = all(r == "converged" for r in reasons)
    if unique:
        for i in range(len(limits)):
            for j in range(len(limits)):
                if i != j and not tau_converged(space, limits[i], limits[j], agree_tol):
                    unique = False
                    break
            if not unique:
                break
    return UniquenessResult(unique=unique, limits=limits, stopped_reasons=reasons)

"""Random operators and pathwise integral equations, solved by Monte Carlo.

Ensembles hold N draws of a point in R^d; the distance between two
ensembles is the empirical distribution of the samplewise norm gaps, which
plugs straight into every distributional check in the package.

The integral-equation solver iterates the map

    (TX)(t_i, path) = h(t_i, path)
                      + sum over s_l <= t_i of w_l k(t_i, s_l, path) f(s_l, X(s_l, path))

with causal composite-trapezoid weights w (the integral at t_0 is 0).
Paths are independent: path ``j`` draws its randomness from a generator
keyed by ``mix_seed(root_seed, j)`` and is updated by its own
matrix-vector product, so a path's result is bitwise stable when the path
count or worker count changes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .cone import Cone
from .dist import Empirical, TimeGrid, from_samples
from .errors import DivergenceError, InvalidParameterError
from .contract import ContractionCertificate
from .rng import path_generator

PathField = np.ndarray  # shape (n_paths, n_time + 1)


@dataclass(frozen=True, eq=False)
class Ensemble:
    """N joint draws of a point in R^d, optionally constrained to a cone."""

    samples: np.ndarray  # (N, d)
    seed: Optional[int] = None
    cone: Optional[Cone] = None

    def __post_init__(self):
        arr = np.atleast_2d(np.asarray(self.samples, dtype=float))
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise InvalidParameterError("ensemble samples must form a nonempty (N, d) array")
        if not np.all(np.isfinite(arr)):
            raise InvalidParameterError("ensemble samples must be finite")
        if self.cone is not None:
            for row in arr:
                if not self.cone.contains(row):
                    raise InvalidParameterError("ensemble declares a cone but a sample violates it")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def n(self) -> int:
        return int(self.samples.shape[0])

    @property
    def dim(self) -> int:
        return int(self.samples.shape[1])


@dataclass(frozen=True)
class RandomOperator:
    """Samplewise map: (sample index, point) -> point, deterministic per index."""

    fn: Callable[[int, np.ndarray], np.ndarray]
    name: str = ""

    def apply(self, ensemble: Ensemble) -> Ensemble:
        out = np.empty_like(ensemble.samples)
        for j in range(ensemble.n):
            out[j] = np.asarray(self.fn(j, ensemble.samples[j]), dtype=float)
        return Ensemble(out, seed=ensemble.seed, cone=None)


def empirical_metric(x: Ensemble, y: Ensemble) -> Empirical:
    """Empirical distribution of the samplewise distances ||x_j - y_j||."""
    if x.samples.shape != y.samples.shape:
        raise InvalidParameterError(
            f"ensemble shapes differ: {x.samples.shape} vs {y.samples.shape}"
        )
    gaps = np.linalg.norm(x.samples - y.samples, axis=1)
    return from_samples(gaps)


@dataclass(frozen=True)
class RandomKannanResult:
    """Joint verdict of the samplewise and distributional contraction checks."""

    certificate: ContractionCertificate
    n_samples: int
    samplewise_violations: int
    samplewise_holds: bool

    @property
    def samplewise_fraction(self) -> float:
        return self.samplewise_violations / self.n_samples

    @property
    def passed(self) -> bool:
        return self.samplewise_holds and self.certificate.passed


def check_random_kannan(
    operator: RandomOperator,
    ensembles: Sequence[Tuple[Ensemble, Ensemble]],
    alpha: float,
    grid=None,
    tol=None,
) -> RandomKannanResult:
    """Two-level contraction check for a random operator.

    (a) samplewise: ||Tx_j - Ty_j|| <= alpha * max(||x_j - Tx_j||, ||y_j - Ty_j||)
        per draw, reporting the violating fraction;
    (b) distributional: the self-displacement condition on the empirical
        metrics over the grid, at tolerance ``tol``
        (default 2/sqrt(N)).

    The distributional side tests the t / (2 alpha) rescaling; the stricter
    t / alpha form implies it for alpha < 1/2 since the distributions are
    non-decreasing.
    """
    if not 0.0 < alpha < 0.5:
        raise InvalidParameterError(f"rate must lie in (0, 1/2), got {alpha}")
    if not ensembles:
        raise InvalidParameterError("need at least one ensemble pair")
    grid = TimeGrid.coerce(grid)
    t = grid.points

    total = 0
    violations = 0
    worst = np.inf
    witness = None
    resolved_tol = tol
    for x, y in ensembles:
        if x.samples.shape != y.samples.shape:
            raise InvalidParameterError("paired ensembles must share shape")
        tx = operator.apply(x)
        ty = operator.apply(y)
        lhs_gap = np.linalg.norm(tx.samples - ty.samples, axis=1)
        x_disp = np.linalg.norm(x.samples - tx.samples, axis=1)
        y_disp = np.linalg.norm(y.samples - ty.samples, axis=1)
        rhs_gap = alpha * np.maximum(x_disp, y_disp)
        violations += int(np.sum(lhs_gap > rhs_gap + 1e-12))
        total += x.n

        f_txty = empirical_metric(tx, ty)
        f_xtx = empirical_metric(x, tx)
        f_yty = empirical_metric(y, ty)
        if resolved_tol is None:
            resolved_tol = 2.0 / np.sqrt(x.n)
        scaled = t / (2.0 * alpha)
        margins = np.asarray(f_txty.eval(t)) - np.minimum(
            np.asarray(f_xtx.eval(scaled)), np.asarray(f_yty.eval(scaled))
        )
        k = int(np.argmin(margins))
        if margins[k] < worst:
            worst = float(margins[k])
            witness = {"t": float(t[k]), "n_samples": x.n}

    resolved_tol = 0.0 if resolved_tol is None else float(resolved_tol)
    passed = worst >= -resolved_tol
    fraction = violations / total
    certificate = ContractionCertificate(
        kind="kannan",
        params={"alpha": alpha},
        n_pairs=len(ensembles),
        grid=grid,
        worst_margin=worst,
        passed=passed,
        tol=resolved_tol,
        witness=None if passed else witness,
        notes=(
            f"samplewise violations: {violations} of {total} ({fraction:.6f})",
            "distributional check uses the t/(2 alpha) rescaling; the t/alpha "
            "form implies it for rates below 1/2",
        ),
    )
    return RandomKannanResult(
        certificate=certificate,
        n_samples=total,
        samplewise_violations=violations,
        samplewise_holds=violations == 0,
    )


@dataclass(frozen=True, eq=False)
class SIEProblem:
    """A pathwise Volterra integral equation on [0, 1].

    X(t, path) = h(t, path) + integral over [0, t] of k(t, s, path) f(s, X(s, path)) ds

    ``kernel(t_mesh, s_mesh, path)`` and ``forcing(t_grid, path, rng)`` are
    vectorized over their grid arguments; ``rng`` is the path's own
    deterministic generator. ``nonlinearity(s, x)`` must be elementwise with
    declared Lipschitz constant ``lipschitz`` in x. A zero nonlinearity may
    declare lipschitz = 0.
    """

    time_grid: np.ndarray
    kernel: Callable[[np.ndarray, np.ndarray, int], np.ndarray]
    forcing: Callable[[np.ndarray, int, np.random.Generator], np.ndarray]
    nonlinearity: Callable[[np.ndarray, np.ndarray], np.ndarray]
    lipschitz: float
    n_paths: int = 1
    seed: int = 0
    kernel_is_random: bool = False

    def __post_init__(self):
        t = np.asarray(self.time_grid, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise InvalidParameterError("time grid must contain at least two nodes")
        if t[0] != 0.0 or abs(t[-1] - 1.0) > 1e-12:
            raise InvalidParameterError("time grid must run from 0 to 1")
        if np.any(np.diff(t) <= 0.0):
            raise InvalidParameterError("time grid must be strictly increasing")
        if not np.isfinite(self.lipschitz) or self.lipschitz < 0.0:
            raise InvalidParameterError(f"lipschitz constant must be >= 0, got {self.lipschitz}")
        if self.n_paths < 1:
            raise InvalidParameterError(f"n_paths must be >= 1, got {self.n_paths}")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "time_grid", t)

    @property
    def n_time(self) -> int:
        return int(self.time_grid.size - 1)


def causal_trapezoid_weights(t: np.ndarray) -> np.ndarray:
    """W[i, l]: trapezoid weight of node l in the integral over [0, t_i].

    Row 0 is all zeros (empty integral). Row i holds the composite
    trapezoid rule on nodes t_0 .. t_i.
    """
    n = t.size
    w = np.zeros((n, n))
    for i in range(1, n):
        seg = np.diff(t[: i + 1])
        w[i, : i + 1][:-1] += seg / 2.0
        w[i, 1 : i + 1] += seg / 2.0
    return w


class _DiscreteOperator:
    """Compiled form of one problem: forcing matrix plus weighted kernel."""

    def __init__(self, problem: SIEProblem):
        self.problem = problem
        t = problem.time_grid
        self.weights = causal_trapezoid_weights(t)
        self.h = np.stack(
            [
                np.asarray(
                    problem.forcing(t, j, path_generator(problem.seed, j)), dtype=float
                )
                for j in range(problem.n_paths)
            ]
        )
        if self.h.shape != (problem.n_paths, t.size):
            raise InvalidParameterError(
                f"forcing must return one value per time node; got shape {self.h.shape}"
            )
        t_mesh, s_mesh = np.meshgrid(t, t, indexing="ij")
        if problem.kernel_is_random:
            self.kernels = np.stack(
                [np.asarray(problem.kernel(t_mesh, s_mesh, j), dtype=float) for j in range(problem.n_paths)]
            )
            self.weighted = self.weights[None, :, :] * self.kernels
        else:
            self.kernels = np.asarray(problem.kernel(t_mesh, s_mesh, 0), dtype=float)[None, :, :]
            self.weighted = (self.weights * self.kernels[0])[None, :, :]

    def apply(self, field: PathField) -> PathField:
        f_vals = np.asarray(self.problem.nonlinearity(self.problem.time_grid[None, :], field))
        # One matrix-vector product per path: a path's result depends only on
        # its own row, so path sets are stable when the path count grows
        # (batched gemm would reorder summation with the batch shape).
        out = np.empty_like(field)
        shared = self.weighted.shape[0] == 1
        for j in range(field.shape[0]):
            matrix = self.weighted[0] if shared else self.weighted[j]
            out[j] = self.h[j] + matrix @ f_vals[j]
        return out

    def l2_norm(self, field: PathField) -> float:
        """Discrete L2 norm: trapezoid in time, uniform average over paths."""
        t = self.problem.time_grid
        w = np.zeros_like(t)
        seg = np.diff(t)
        w[:-1] += seg / 2.0
        w[1:] += seg / 2.0
        return float(np.sqrt(np.mean(np.sum(w[None, :] * field**2, axis=1))))


def sie_apply(problem: SIEProblem, field: PathField) -> PathField:
    """One application of the discretized solution map to a path field."""
    field = np.asarray(field, dtype=float)
    expected = (problem.n_paths, problem.time_grid.size)
    if field.shape != expected:
        raise InvalidParameterError(f"field must have shape {expected}, got {field.shape}")
    out = _DiscreteOperator(problem).apply(field)
    if not np.all(np.isfinite(out)):
        raise DivergenceError("solution map produced non-finite values")
    return out


@dataclass(frozen=True)
class SIEConditions:
    """Contraction diagnostics of the discretized problem."""

    lipschitz: float
    sup_kernel: float
    m_hat: float  # path average of M(path) = max_i integral of |k(t_i, .)|
    m_hat_stderr: float
    max_path_lm: float
    contraction_rate: float  # K = L * sqrt(m_hat * sup_kernel)
    satisfied: bool


def sie_conditions(problem: SIEProblem) -> SIEConditions:
    """Estimate the contraction rate K = L sqrt(E[M] sup|k|) on the grid.

    M(path) is the discretized maximum over t of the integral of
    |k(t, s, path)| over [0, t]; its path mean estimates E[M] and the
    reported standard error qualifies that estimate. ``satisfied`` needs
    both K < 1/2 and L * M(path) < 1/2 on every path.
    """
    op = _DiscreteOperator(problem)
    abs_k = np.abs(op.kernels)
    # only the causal half s <= t enters the equation
    causal = np.tril(np.ones_like(op.weights, dtype=bool))
    sup_k = float(abs_k[:, causal].max())
    m_per_path = np.max(np.sum(op.weights[None, :, :] * abs_k, axis=2), axis=1)
    if m_per_path.size == 1 and problem.n_paths > 1:
        m_per_path = np.repeat(m_per_path, problem.n_paths)
    m_hat = float(np.mean(m_per_path))
    stderr = float(np.std(m_per_path, ddof=1) / np.sqrt(m_per_path.size)) if m_per_path.size > 1 else 0.0
    rate = float(problem.lipschitz * np.sqrt(m_hat * sup_k))
    max_lm = float(problem.lipschitz * m_per_path.max())
    return SIEConditions(
        lipschitz=problem.lipschitz,
        sup_kernel=sup_k,
        m_hat=m_hat,
        m_hat_stderr=stderr,
        max_path_lm=max_lm,
        contraction_rate=rate,
        satisfied=rate < 0.5 and max_lm < 0.5,
    )


@dataclass(frozen=True, eq=False)
class SIESolution:
    field: PathField
    step_norms: Tuple[float, ...]
    contraction_rate: float
    converged: bool
    iterations: int
    conditions: SIEConditions


def sie_solve(problem: SIEProblem, eps: float = 1e-8, max_iter: int = 500) -> SIESolution:
    """Picard-iterate the solution map from X = h until the L2 step stalls.

    Proceeds even when the contraction conditions fail (with a warning in
    the returned diagnostics); raises on non-finite values only.
    """
    if not np.isfinite(eps) or eps <= 0.0:
        raise InvalidParameterError(f"eps must be positive, got {eps}")
    if max_iter < 1:
        raise InvalidParameterError(f"max_iter must be >= 1, got {max_iter}")
    conditions = sie_conditions(problem)
    if not conditions.satisfied:
        warnings.warn(
            f"contraction conditions not satisfied (K={conditions.contraction_rate:.4f}); "
            "iterating anyway",
            RuntimeWarning,
            stacklevel=2,
        )
    op = _DiscreteOperator(problem)
    field = op.h.copy()
    norms = []
    converged = False
    for _ in range(max_iter):
        nxt = op.apply(field)
        if not np.all(np.isfinite(nxt)):
            raise DivergenceError(f"non-finite path values after {len(norms) + 1} iterations")
        norms.append(op.l2_norm(nxt - field))
        field = nxt
        if norms[-1] < eps:
            converged = True
            break
    return SIESolution(
        field=field,
        step_norms=tuple(norms),
        contraction_rate=conditions.contraction_rate,
        converged=converged,
        iterations=len(norms),
        conditions=conditions,
    )

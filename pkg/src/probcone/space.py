"""Probabilistic cone metric spaces and their randomized axiom suite.

A :class:`PCMSpace` bundles a point dimension, a pure distance map
``(x, y) -> DistFn``, the t-norm used by the triangle inequality, an
optional cone restricting feasible points, and a sampling box for the
randomized checks.

``check_axioms`` samples points and falsifies the four space axioms:

1. identity      -- F(x, x) evaluates to 1 everywhere on the grid;
2. symmetry      -- F(x, y) and F(y, x) agree pointwise on the grid;
3. triangle      -- F(x, z)(t + s) >= T(F(x, y)(t), F(y, z)(s)) for every
                    ordered triple and every (t, s) in grid x grid;
4. feasibility   -- sampled points belong to the declared cone. (Distance
                    values are scalar, so the cone constraint lives on the
                    points; see the package README for the rationale.)

Failures are report content, never exceptions: margins use the uniform
convention "pass iff worst_margin >= -tol", and a witness is attached
exactly when a check fails.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .cone import Cone
from .dist import DistFn, TimeGrid
from .errors import InfeasibleRegionError, InvalidParameterError
from .parallel import ordered_map
from .tnorm import TNorm

_SAMPLING_ATTEMPT_CAP = 100_000

DistanceMap = Callable[[np.ndarray, np.ndarray], DistFn]


@dataclass(frozen=True, eq=False)
class PCMSpace:
    """A point set with a distribution-valued distance and a t-norm."""

    dim: int
    distance: DistanceMap
    tnorm: TNorm
    point_cone: Optional[Cone] = None
    sampling_box: Optional[np.ndarray] = None  # shape (dim, 2), rows (lo, hi)

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise InvalidParameterError(f"dimension must be a positive integer, got {self.dim}")
        box = self.sampling_box
        if box is None:
            box = np.column_stack([np.full(self.dim, -1.0), np.full(self.dim, 1.0)])
        box = np.asarray(box, dtype=float)
        if box.shape != (self.dim, 2):
            raise InvalidParameterError(f"sampling box must have shape ({self.dim}, 2), got {box.shape}")
        if np.any(box[:, 1] < box[:, 0]):
            raise InvalidParameterError("sampling box upper bounds must be >= lower bounds")
        box = box.copy()
        box.setflags(write=False)
        object.__setattr__(self, "sampling_box", box)
        if self.point_cone is not None and self.point_cone.dim != self.dim:
            raise InvalidParameterError("cone dimension does not match the space dimension")

    def feasible(self, x) -> bool:
        return self.point_cone is None or self.point_cone.contains(np.asarray(x, dtype=float))


def sample_points(space: PCMSpace, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n points uniformly from the sampling box, rejected against the cone."""
    if n < 1:
        raise InvalidParameterError(f"need at least one point, got {n}")
    lo = space.sampling_box[:, 0]
    hi = space.sampling_box[:, 1]
    out = np.empty((n, space.dim))
    filled = 0
    for _ in range(_SAMPLING_ATTEMPT_CAP):
        candidate = rng.uniform(lo, hi)
        if space.feasible(candidate):
            out[filled] = candidate
            filled += 1
            if filled == n:
                return out
    raise InfeasibleRegionError(
        f"infeasible sampling region: {filled}/{n} points after {_SAMPLING_ATTEMPT_CAP} attempts"
    )


@dataclass(frozen=True)
class AxiomCheck:
    """One axiom's verdict: pass/fail, worst margin, and a witness on failure."""

    name: str
    passed: bool
    worst_margin: Optional[float]
    witness: Optional[dict] = None

    def __post_init__(self):
        if self.passed and self.witness is not None:
            raise InvalidParameterError("a passing check must not carry a witness")
        if not self.passed and self.witness is None:
            raise InvalidParameterError("a failing check must carry a witness")


@dataclass(frozen=True, eq=False)
class AxiomReport:
    """Everything ``check_axioms`` observed, reproducible from (seed, grid)."""

    n_points: int
    seed: int
    tol: float
    grid: TimeGrid
    identity: AxiomCheck
    symmetry: AxiomCheck
    triangle: AxiomCheck
    feasibility: AxiomCheck
    sub_distribution_pairs: tuple = ()
    identity_ambiguous_pairs: tuple = ()  # distinct points indistinguishable from identity on the grid
    points: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    notes: tuple = ()

    @property
    def all_passed(self) -> bool:
        return (
            self.identity.passed
            and self.symmetry.passed
            and self.triangle.passed
            and self.feasibility.passed
        )


def _passfail(name, worst, tol, witness) -> AxiomCheck:
    passed = worst is None or worst >= -tol
    return AxiomCheck(name=name, passed=passed, worst_margin=worst, witness=None if passed else witness)


def check_axioms(
    space: PCMSpace,
    n_points: int,
    grid=None,
    tol: float = 0.0,
    seed: int = 0,
    workers: int = 1,
) -> AxiomReport:
    """Randomized falsification of the space axioms.

    Samples ``n_points`` points (inside the cone when one is declared),
    evaluates every pairwise distance once on the grid and on the
    (t + s) matrix, and reduces margins in fixed index order so the result
    is identical for any worker count.
    """
    if n_points < 3:
        raise InvalidParameterError(f"need at least 3 points to exercise the triangle axiom, got {n_points}")
    grid = TimeGrid.coerce(grid)
    rng = np.random.default_rng(seed)
    pts = sample_points(space, n_points, rng)
    t = grid.points
    ts_matrix = t[:, None] + t[None, :]

    dists = [[space.distance(pts[i], pts[j]) for j in range(n_points)] for i in range(n_points)]
    on_grid = [[np.asarray(dists[i][j].eval(t)) for j in range(n_points)] for i in range(n_points)]

    # Axiom 1: F(x, x) == 1 on the grid.
    id_worst = None
    id_witness = None
    for i in range(n_points):
        vals = on_grid[i][i]
        k = int(np.argmin(vals))
        margin = float(vals[k] - 1.0)
        if id_worst is None or margin < id_worst:
            id_worst = margin
            id_witness = {"index": i, "point": pts[i].tolist(), "t": float(t[k]), "value": float(vals[k])}
    identity = _passfail("identity", id_worst, tol, id_witness)

    # Reverse direction of axiom 1: distinct points whose distance sits at 1
    # across the whole grid can only be reported as consistent with identity,
    # never equated.
    ambiguous = []
    sym_worst = None
    sym_witness = None
    sub_pairs = []
    for i in range(n_points):
        for j in range(i + 1, n_points):
            fij, fji = on_grid[i][j], on_grid[j][i]
            gap = np.abs(fij - fji)
            k = int(np.argmax(gap))
            margin = -float(gap[k])
            if sym_worst is None or margin < sym_worst:
                sym_worst = margin
                sym_witness = {
                    "i": i,
                    "j": j,
                    "t": float(t[k]),
                    "forward": float(fij[k]),
                    "reverse": float(fji[k]),
                }
            if np.all(fij >= 1.0 - tol) and np.all(fji >= 1.0 - tol):
                ambiguous.append((i, j))
            if not dists[i][j].is_proper:
                sub_pairs.append((i, j))
            if not dists[j][i].is_proper:
                sub_pairs.append((j, i))
    symmetry = _passfail("symmetry", sym_worst, tol, sym_witness)

    # Axiom 3 over ordered distinct triples, all (t, s) pairs at once.
    on_matrix = {}
    for i in range(n_points):
        for k in range(n_points):
            if i != k:
                on_matrix[(i, k)] = np.asarray(dists[i][k].eval(ts_matrix))

    triples = [
        (i, j, k)
        for i in range(n_points)
        for j in range(n_points)
        for k in range(n_points)
        if i != j and j != k and i != k
    ]

    tnorm = space.tnorm

    def triple_margin(triple):
        i, j, k = triple
        lhs = on_matrix[(i, k)]
        rhs = tnorm.apply(on_grid[i][j][:, None], on_grid[j][k][None, :])
        margins = lhs - rhs
        flat = int(np.argmin(margins))
        return float(margins.flat[flat]), flat

    results = ordered_map(triple_margin, triples, workers=workers)
    tri_worst = None
    tri_witness = None
    for (i, j, k), (margin, flat) in zip(triples, results):
        if tri_worst is None or margin < tri_worst:
            ti, si = divmod(flat, len(grid))
            tri_worst = margin
            tri_witness = {
                "i": i,
                "j": j,
                "k": k,
                "t": float(t[ti]),
                "s": float(t[si]),
            }
    triangle = _passfail("triangle", tri_worst, tol, tri_witness)

    # Axiom 4, reinterpreted as point feasibility.
    if space.point_cone is None:
        feasibility = AxiomCheck("feasibility", True, None, None)
        feas_note = "no cone declared; feasibility is vacuous"
    else:
        margins = [space.point_cone.membership_margin(p) for p in pts]
        k = int(np.argmin(margins))
        feasibility = _passfail(
            "feasibility",
            float(margins[k]),
            max(tol, 1e-12),
            {"index": k, "point": pts[k].tolist()},
        )
        feas_note = None

    notes = []
    if feas_note:
        notes.append(feas_note)
    if ambiguous:
        notes.append(
            "some distinct sampled pairs are consistent with identity on this grid; "
            "grid evidence cannot conclude point equality"
        )
    if sub_pairs:
        notes.append("sub-distribution distance values observed (upper limit < 1)")

    return AxiomReport(
        n_points=n_points,
        seed=seed,
        tol=tol,
        grid=grid,
        identity=identity,
        symmetry=symmetry,
        triangle=triangle,
        feasibility=feasibility,
        sub_distribution_pairs=tuple(sorted(set(sub_pairs))),
        identity_ambiguous_pairs=tuple(ambiguous),
        points=pts,
        notes=tuple(notes),
    )


def tau_converged(space: PCMSpace, x, y, eps: float) -> bool:
    """Distributional closeness test: F(x, y)(eps) > 1 - eps."""
    if not np.isfinite(eps) or eps <= 0.0:
        raise InvalidParameterError(f"eps must be positive, got {eps}")
    value = float(space.distance(np.asarray(x, float), np.asarray(y, float)).eval(eps))
    return value > 1.0 - eps


def cauchy_window(space: PCMSpace, pts: Sequence, eps: float) -> bool:
    """True iff every ordered pair in the window meets the closeness test."""
    if not np.isfinite(eps) or eps <= 0.0:
        raise InvalidParameterError(f"eps must be positive, got {eps}")
    pts = [np.asarray(p, dtype=float) for p in pts]
    if not pts:
        raise InvalidParameterError("window must contain at least one point")
    for m in range(len(pts)):
        for n in range(len(pts)):
            if m == n:
                continue
            if float(space.distance(pts[m], pts[n]).eval(eps)) <= 1.0 - eps:
                return False
    return True

import numpy as np
import pytest

from probcone import (
    DiracStep,
    DivergenceError,
    InvalidParameterError,
    Orthant,
    TNorm,
    cauchy_chain_bound,
    check_bounds,
    check_kannan,
    from_samples,
    kannan_bound,
    picard,
    uniqueness_probe,
    verify_fixed_point,
)
from probcone.contract import Mapping
from probcone.registry import (
    constant_map,
    dirac_space,
    identity_map,
    rotation_half_map,
    scale_map,
    shift_map,
)

SPACE = dirac_space()
ROTATE = rotation_half_map()


class TestPicard:
    def test_rotation_half_orbit(self):
        trace = picard(SPACE, ROTATE, [1.0, 0.0], eps=1e-10, max_iter=1000)
        assert trace.stopped_reason == "converged"
        assert np.allclose(trace.points[1], [0.5, 0.5], atol=1e-15)
        assert np.allclose(trace.points[2], [0.0, 0.5], atol=1e-15)
        assert np.linalg.norm(trace.limit) < 1e-9
        norms = np.linalg.norm(trace.points, axis=1)
        ratios = norms[1:41] / norms[:40]
        assert np.max(np.abs(ratios - 2.0**-0.5)) < 1e-9

    def test_norm_ratio_every_step(self):
        trace = picard(SPACE, ROTATE, [0.3, -0.8], eps=1e-9, max_iter=500)
        norms = np.linalg.norm(trace.points, axis=1)
        nonzero = norms[:-1] > 0
        ratios = norms[1:][nonzero] / norms[:-1][nonzero]
        assert np.max(np.abs(ratios - 2.0**-0.5)) < 1e-9

    def test_identity_stops_after_one_step(self):
        trace = picard(SPACE, identity_map(), [0.4, 0.1], eps=0.5)
        assert trace.stopped_reason == "converged"
        assert trace.n_iters == 1

    def test_shift_map_hits_max_iter(self):
        trace = picard(SPACE, shift_map([1.0, 0.0]), [0.0, 0.0], eps=0.5, max_iter=25)
        assert trace.stopped_reason == "max_iter"
        assert trace.n_iters == 25

    def test_dirac_stopping_rule_is_step_norm(self):
        # on a metric-induced space the tau criterion is exactly
        # ||x_n - x_{n+1}|| < eps
        eps = 1e-4
        trace = picard(SPACE, ROTATE, [1.0, 0.0], eps=eps, max_iter=1000)
        steps = np.linalg.norm(np.diff(trace.points, axis=0), axis=1)
        assert np.all(steps[:-1] >= eps)
        assert steps[-1] < eps

    def test_divergence_carries_partial_trace(self):
        blowup = Mapping(lambda u: np.exp(u) * 1e30, name="blowup")
        with np.errstate(over="ignore"), pytest.raises(DivergenceError) as err:
            picard(SPACE, blowup, [1.0, 1.0], eps=1e-6, max_iter=50)
        partial = err.value.trace
        assert partial is not None
        assert partial.stopped_reason == "diverged"
        assert partial.points.shape[0] >= 2

    def test_infeasible_start_rejected(self):
        space = dirac_space(point_cone=Orthant(2))
        with pytest.raises(InvalidParameterError):
            picard(space, ROTATE, [-1.0, 0.0], eps=1e-6)

    def test_parameter_validation(self):
        with pytest.raises(InvalidParameterError):
            picard(SPACE, ROTATE, [1.0, 0.0], eps=0.0)
        with pytest.raises(InvalidParameterError):
            picard(SPACE, ROTATE, [1.0, 0.0], eps=1e-6, max_iter=0)
        with pytest.raises(InvalidParameterError):
            picard(SPACE, ROTATE, [1.0, 0.0, 0.0], eps=1e-6)

    def test_default_eps_loosens_for_empirical_spaces(self):
        from probcone import PCMSpace, from_samples

        # analytic space: the default stopping eps is 1e-6
        trace = picard(SPACE, ROTATE, [1.0, 0.0], max_iter=1000)
        assert trace.eps == 1e-6

        def noisy_distance(x, y):
            gap = np.linalg.norm(x - y)
            child = np.random.default_rng(int(gap * 1e9) % (2**32))
            return from_samples(np.abs(gap + 1e-4 * child.standard_normal(100)))

        space = PCMSpace(dim=2, distance=noisy_distance, tnorm=TNorm.MINIMUM)
        trace = picard(space, ROTATE, [1.0, 0.0], max_iter=1000)
        assert trace.eps == 1e-2


class TestKannanBound:
    def test_n_zero_is_first_step(self):
        f = from_samples([0.5, 1.0, 2.0])
        for t in (0.3, 0.9, 2.5):
            assert kannan_bound(f, 0.25, 0, t) == f.eval(t)

    def test_argument_scaling(self):
        f = from_samples([0.5, 1.0, 2.0])
        # (2 * 0.25)^3 = 1/8, so t=1 evaluates the first step at 8
        assert kannan_bound(f, 0.25, 3, 1.0) == f.eval(8.0)

    def test_dirac_crosses_step(self):
        assert kannan_bound(DiracStep(1.0), 0.25, 3, 1.0) == 1.0

    def test_monotone_in_alpha_and_t(self):
        f = DiracStep(1.0)
        grid = np.geomspace(0.01, 10, 50)
        alphas = [0.1, 0.2, 0.3, 0.4, 0.45]
        for n in (1, 3, 7):
            values = [np.asarray(kannan_bound(f, a, n, grid)) for a in alphas]
            for lo, hi in zip(values[1:], values[:-1]):
                assert np.all(lo <= hi + 1e-15)  # larger rate, weaker bound
            for v in values:
                assert np.all(np.diff(v) >= -1e-15)  # non-decreasing in t

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            kannan_bound(DiracStep(1.0), 0.5, 1, 1.0)
        with pytest.raises(InvalidParameterError):
            kannan_bound(DiracStep(1.0), 0.25, -1, 1.0)
        with pytest.raises(InvalidParameterError):
            kannan_bound(DiracStep(1.0), 0.25, 1, 0.0)


class TestCauchyChainBound:
    def test_single_term_reduces_to_step_bound(self):
        f = from_samples([0.2, 0.7, 1.4])
        for n in (0, 2, 5):
            got = cauchy_chain_bound(f, 0.3, n, n + 1, 1.0, TNorm.MINIMUM)
            assert got == kannan_bound(f, 0.3, n, 1.0)

    def test_zero_first_step_gives_one(self):
        f = DiracStep(0.0)
        assert cauchy_chain_bound(f, 0.25, 0, 7, 0.5, TNorm.PRODUCT) == 1.0

    def test_dirac_example(self):
        # terms at t / (2 * (1/2)^j) for j = 2, 3: both past the unit step
        got = cauchy_chain_bound(DiracStep(1.0), 0.25, 2, 4, 1.0, TNorm.MINIMUM)
        assert got == 1.0

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            cauchy_chain_bound(DiracStep(1.0), 0.25, 3, 3, 1.0, TNorm.MINIMUM)
        with pytest.raises(InvalidParameterError):
            cauchy_chain_bound(DiracStep(1.0), 0.25, 0, 2, -1.0, TNorm.MINIMUM)


class TestCheckBounds:
    def test_holds_for_certified_map(self):
        mapping = scale_map(0.2)
        alpha = 0.3
        cert = check_kannan(SPACE, mapping, alpha, pairs=64, seed=1)
        assert cert.passed
        trace = picard(SPACE, mapping, [0.9, -0.7], eps=1e-9, max_iter=200)
        check = check_bounds(trace, alpha)
        assert check.holds
        assert check.n_violations == 0

    def test_single_step_trace_vacuous(self):
        trace = picard(SPACE, constant_map([0.3, 0.3]), [1.0, 0.0], eps=1e-6)
        check = check_bounds(trace, 0.25)
        assert check.holds
        assert check.step_margins.shape[0] == trace.n_iters

    def test_violations_reported_for_non_contractive_map(self):
        # constant unit steps: the guaranteed bound climbs to 1 while the
        # observed step distribution stays at the unit step
        trace = picard(SPACE, shift_map([1.0, 0.0]), [0.0, 0.0], eps=0.5, max_iter=30)
        check = check_bounds(trace, 0.25)
        assert not check.holds
        assert check.n_violations > 0
        assert check.worst_margin <= -1.0

    def test_deterministic_chain_sampling(self):
        trace = picard(SPACE, scale_map(0.2), [1.0, 0.5], eps=1e-12, max_iter=200)
        a = check_bounds(trace, 0.3, seed=5)
        b = check_bounds(trace, 0.3, seed=5)
        assert a.chain_pairs == b.chain_pairs
        assert np.array_equal(a.chain_margins, b.chain_margins)

    def test_requires_two_points(self):
        trace = picard(SPACE, identity_map(), [0.0, 0.0], eps=0.5)
        check_bounds(trace, 0.25)  # 2 points: fine
        with pytest.raises(InvalidParameterError):
            check_bounds(trace, 0.75)


class TestVerifyFixedPoint:
    def test_rotation_fixed_point_at_origin(self):
        assert verify_fixed_point(SPACE, ROTATE, [0.0, 0.0]).is_fixed

    def test_non_fixed_point(self):
        result = verify_fixed_point(SPACE, ROTATE, [1.0, 0.0])
        assert not result.is_fixed
        assert result.worst == 0.0  # small grid times sit below the step

    def test_identity_everywhere_fixed(self):
        rng = np.random.default_rng(14)
        for _ in range(10):
            x = rng.uniform(-3, 3, 2)
            assert verify_fixed_point(SPACE, identity_map(), x).is_fixed


class TestUniquenessProbe:
    def test_rotation_limits_agree(self):
        rng = np.random.default_rng(15)
        starts = rng.uniform(-1, 1, (10, 2))
        result = uniqueness_probe(SPACE, ROTATE, starts, eps=1e-8, agree_tol=1e-6)
        assert result.unique
        assert np.all(np.linalg.norm(result.limits, axis=1) < 1e-6)

    def test_identity_not_unique(self):
        result = uniqueness_probe(
            SPACE, identity_map(), [[0.0, 0.0], [1.0, 0.0]], eps=0.5, agree_tol=1e-6
        )
        assert not result.unique
        assert np.array_equal(result.limits, [[0.0, 0.0], [1.0, 0.0]])

    def test_constant_map_unique(self):
        target = [0.25, -0.5]
        result = uniqueness_probe(
            SPACE, constant_map(target), [[1.0, 1.0], [-1.0, 0.3], [0.0, 0.9]], eps=1e-9
        )
        assert result.unique
        assert np.allclose(result.limits, target)

    def test_divergence_propagates(self):
        blowup = Mapping(lambda u: np.exp(u) * 1e30, name="blowup")
        with np.errstate(over="ignore"), pytest.raises(DivergenceError):
            uniqueness_probe(SPACE, blowup, [[1.0, 0.0], [0.0, 1.0]], eps=1e-6, max_iter=20)

    def test_worker_independence(self):
        rng = np.random.default_rng(16)
        starts = rng.uniform(-1, 1, (6, 2))
        a = uniqueness_probe(SPACE, ROTATE, starts, eps=1e-8, workers=1)
        b = uniqueness_probe(SPACE, ROTATE, starts, eps=1e-8, workers=4)
        assert np.array_equal(a.limits, b.limits)

    def test_needs_two_starts(self):
        with pytest.raises(InvalidParameterError):
            uniqueness_probe(SPACE, ROTATE, [[1.0, 0.0]])


class TestTheoremConsistency:
    """Certified rate implies orbit bounds, across maps and rates."""

    @pytest.mark.parametrize(
        "mapping,alpha",
        [
            (scale_map(0.2), 0.3),
            (scale_map(0.25), 0.4),
            (constant_map([0.1, -0.2]), 0.2),
        ],
    )
    def test_certificate_implies_bounds(self, mapping, alpha):
        cert = check_kannan(SPACE, mapping, alpha, pairs=64, seed=21)
        assert cert.passed
        trace = picard(SPACE, mapping, [0.8, 0.6], eps=1e-10, max_iter=300)
        check = check_bounds(trace, alpha, tnorm=TNorm.MINIMUM)
        assert check.holds
        assert check.n_violations == 0

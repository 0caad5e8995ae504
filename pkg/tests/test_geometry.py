import math

import numpy as np
import pytest

from hrg.geometry import (
    Params,
    PolarPoint,
    distance,
    distance_arrays,
    angle_threshold_exact,
    angle_threshold_approx,
    measure_ball_origin,
    measure_intersection_quadrature,
    measure_intersection_approx,
    double_intersection_regime,
)
from hrg.oracle import mc_measure, Intersection
from hrg.sampling import SeededStream

from conftest import params_for_radius


class TestParams:
    def test_radius_derivation(self):
        p = Params(alpha=0.75, C=1.5, n=1000)
        assert p.R == 2.0 * math.log(1000) + 1.5

    @pytest.mark.parametrize("alpha", [0.5, 0.4, 0.0, -1.0])
    def test_alpha_constraint(self, alpha):
        with pytest.raises(ValueError, match="alpha"):
            Params(alpha=alpha, C=0.0, n=100)

    def test_n_constraint(self):
        with pytest.raises(ValueError):
            Params(alpha=0.75, C=0.0, n=0)

    def test_negative_radius_rejected(self):
        with pytest.raises(ValueError, match="positive"):
            Params(alpha=0.75, C=-20.0, n=10)

    def test_overflow_guard(self):
        with pytest.raises(ValueError, match="overflow"):
            Params(alpha=30.0, C=0.0, n=10**6)


class TestPolarPoint:
    def test_angle_normalized_to_half_open_interval(self):
        assert PolarPoint(1.0, 3 * math.pi).theta == pytest.approx(math.pi)
        assert PolarPoint(1.0, -math.pi).theta == pytest.approx(math.pi)
        assert PolarPoint(1.0, math.pi).theta == pytest.approx(math.pi)
        assert -math.pi < PolarPoint(1.0, -7.5).theta <= math.pi

    def test_negative_radius_rejected(self):
        with pytest.raises(ValueError):
            PolarPoint(-0.1, 0.0)


class TestDistance:
    def test_identical_points_zero(self):
        p = PolarPoint(3.7, 1.2)
        assert distance(p, p) == 0.0

    def test_distance_from_origin_is_radius(self):
        for theta in (0.0, 1.0, -2.5, math.pi):
            assert distance(PolarPoint(0.0, 0.0), PolarPoint(4.2, theta)) == pytest.approx(4.2, abs=1e-12)

    def test_antipodal_half_radius_points(self):
        # cosh^2(x) + sinh^2(x) = cosh(2x): distance is exactly R
        R = 12.0
        d = distance(PolarPoint(R / 2, 0.0), PolarPoint(R / 2, math.pi))
        assert d == pytest.approx(R, rel=1e-14)

    def test_against_high_precision_oracle(self):
        # >= 50-digit evaluation of the hyperbolic law of cosines
        import mpmath

        mpmath.mp.dps = 60
        p = PolarPoint(5.0, 0.1)
        q = PolarPoint(7.0, -0.4)
        dtheta = mpmath.mpf("0.5")
        expected = mpmath.acosh(
            mpmath.cosh(5) * mpmath.cosh(7) - mpmath.sinh(5) * mpmath.sinh(7) * mpmath.cos(dtheta)
        )
        assert distance(p, q) == pytest.approx(float(expected), rel=1e-12)

    def test_symmetry_randomized(self):
        rng = np.random.default_rng(7)
        R = 20.0
        r = rng.uniform(0, R, 10_000)
        t = rng.uniform(-math.pi, math.pi, 10_000)
        r2 = rng.uniform(0, R, 10_000)
        t2 = rng.uniform(-math.pi, math.pi, 10_000)
        d12 = distance_arrays(r, t, r2, t2)
        d21 = distance_arrays(r2, t2, r, t)
        assert np.array_equal(d12, d21)
        # spot-check the scalar path agrees with the vectorized one
        for i in range(0, 10_000, 997):
            assert distance(PolarPoint(r[i], t[i]), PolarPoint(r2[i], t2[i])) == pytest.approx(
                float(d12[i]), rel=1e-13, abs=1e-13
            )

    def test_clamping_only_absorbs_roundoff(self):
        rng = np.random.default_rng(11)
        r = rng.uniform(0, 15.0, 10_000)
        t = rng.uniform(-math.pi, math.pi, 10_000)
        r2 = rng.uniform(0, 15.0, 10_000)
        t2 = rng.uniform(-math.pi, math.pi, 10_000)
        d = np.abs(t - t2) % (2 * math.pi)
        dtheta = np.minimum(d, 2 * math.pi - d)
        raw = np.cosh(r) * np.cosh(r2) - np.sinh(r) * np.sinh(r2) * np.cos(dtheta)
        assert np.all(raw >= 1.0 - 1e-9)


class TestAngleThreshold:
    def test_pi_when_triangle_inequality_guarantees_connection(self):
        p = params_for_radius(20.0)
        for r, y in [(3.0, 4.0), (10.0, 10.0), (0.0, 17.0), (20.0, 0.0)]:
            assert angle_threshold_exact(r, y, p) == math.pi

    def test_origin_always_connects(self):
        p = params_for_radius(20.0)
        assert angle_threshold_exact(0.0, 19.0, p) == math.pi

    def test_matches_approximation_deep_in_regime(self):
        p = params_for_radius(20.0)
        exact = angle_threshold_exact(15.0, 15.0, p)
        approx = angle_threshold_approx(15.0, 15.0, p)
        assert approx == pytest.approx(2 * math.exp(-5.0))
        assert abs(exact - approx) / approx <= 10 * math.exp(-10.0)

    def test_approx_boundary_values(self):
        p = params_for_radius(18.0)
        assert angle_threshold_approx(8.0, 10.0, p) == pytest.approx(2.0)
        assert angle_threshold_approx(18.0, 18.0, p) == pytest.approx(2 * math.exp(-9.0))

    def test_approx_rejects_wrong_regime(self):
        p = params_for_radius(18.0)
        with pytest.raises(ValueError, match="y >= R - r"):
            angle_threshold_approx(3.0, 4.0, p)

    def test_range_validation(self):
        p = params_for_radius(18.0)
        with pytest.raises(ValueError):
            angle_threshold_exact(-0.1, 5.0, p)
        with pytest.raises(ValueError):
            angle_threshold_exact(5.0, 19.0, p)

    def test_threshold_consistent_with_distance(self):
        # d((r,0),(y,dt)) <= R  <=>  dt <= theta_r(y), away from the boundary
        p = params_for_radius(16.0, alpha=0.8, n=500)
        rng = np.random.default_rng(3)
        checked = 0
        for _ in range(10_000):
            r, y = rng.uniform(0, p.R, 2)
            dt = rng.uniform(0, math.pi)
            th = angle_threshold_exact(r, y, p)
            if abs(dt - th) < 1e-10:
                continue
            connected = distance(PolarPoint(r, 0.0), PolarPoint(y, dt)) <= p.R
            assert connected == (dt <= th), (r, y, dt, th)
            checked += 1
        assert checked > 9_900

    def test_arccos_argument_never_exceeds_one_materially(self):
        p = params_for_radius(16.0)
        rng = np.random.default_rng(5)
        r = rng.uniform(1e-6, p.R, 10_000)
        y = rng.uniform(1e-6, p.R, 10_000)
        raw = (np.cosh(r) * np.cosh(y) - math.cosh(p.R)) / (np.sinh(r) * np.sinh(y))
        assert np.all(raw <= 1.0 + 1e-9)


class TestMeasures:
    def test_ball_origin_bounds(self):
        p = params_for_radius(10.0, alpha=1.0)
        assert measure_ball_origin(0.0, p) == 0.0
        assert measure_ball_origin(p.R, p) == 1.0

    def test_ball_origin_closed_form_and_asymptotics(self):
        p = params_for_radius(10.0, alpha=1.0)
        exact = measure_ball_origin(5.0, p)
        assert exact == pytest.approx((math.cosh(5) - 1) / (math.cosh(10) - 1), rel=1e-15)
        # leading correction to e^{-alpha(R-x)} is -2e^{-alpha x}, so the
        # deviation at x = R/2 = 5 sits just above 1.3%
        assert exact == pytest.approx(math.exp(-5.0), rel=2 * math.exp(-5.0) + 1e-4)
        p2 = params_for_radius(16.0, alpha=1.0)
        assert measure_ball_origin(8.0, p2) == pytest.approx(math.exp(-8.0), rel=0.01)

    def test_ball_origin_domain(self):
        p = params_for_radius(10.0)
        with pytest.raises(ValueError):
            measure_ball_origin(-0.1, p)
        with pytest.raises(ValueError):
            measure_ball_origin(10.1, p)

    def test_quadrature_normalization(self):
        p = params_for_radius(14.0, alpha=0.75)
        assert measure_intersection_quadrature(0.0, 0.0, p, tol=1e-9) == pytest.approx(1.0, abs=1e-9)

    def test_quadrature_complement_of_inner_ball(self):
        p = params_for_radius(14.0, alpha=0.75)
        for x in (2.0, 6.5, 11.0):
            got = measure_intersection_quadrature(0.0, x, p, tol=1e-9)
            assert got == pytest.approx(1.0 - measure_ball_origin(x, p), abs=1e-8)

    def test_quadrature_against_monte_carlo(self):
        p = Params(alpha=0.75, C=0.0, n=10_000)
        r = 0.75 * p.R
        quad = measure_intersection_quadrature(r, 0.0, p)
        est = mc_measure(Intersection(r=r, x=0.0), p, 10_000_000, SeededStream(2024))
        assert abs(est.mean - quad) <= 3 * est.std_error

    def test_approx_plain_substitution(self):
        p = params_for_radius(12.0, alpha=0.8)
        expected = 2 * 0.8 * math.exp(-6.0) / (math.pi * 0.3)
        assert measure_intersection_approx(p.R, 0.0, p) == pytest.approx(expected, rel=1e-14)

    def test_approx_clamps_at_full_exclusion(self):
        p = params_for_radius(12.0, alpha=0.8)
        assert measure_intersection_approx(3.0, p.R, p) == 0.0

    def test_approx_vs_quadrature_with_fitted_constant(self):
        p = Params(alpha=0.75, C=0.0, n=10_000)
        r = 0.8 * p.R
        quad = measure_intersection_quadrature(r, 0.0, p)
        approx = measure_intersection_approx(r, 0.0, p)
        bound = 20 * (math.exp(-(p.alpha - 0.5) * r) + math.exp(-r))
        assert abs(approx - quad) / quad <= bound

    def test_quadrature_monotone_in_r(self):
        p = params_for_radius(12.0, alpha=0.75)
        tol = 1e-9
        rs = np.linspace(0, p.R, 20)
        xs = np.linspace(0, p.R, 20)
        for x in xs:
            values = [measure_intersection_quadrature(r, x, p, tol=tol) for r in rs]
            diffs = np.diff(values)
            assert np.all(diffs <= 2 * tol)

    def test_asymptotic_error_decreases_with_r(self):
        # the signed error terms can cancel and cross zero (alpha = 1 dips to
        # ~1e-5 mid-range), so require decrease only above a small floor
        floor = 1e-3
        for alpha in (0.6, 0.75, 1.0):
            p = Params(alpha=alpha, C=0.0, n=10_000)
            errs = []
            for frac in (0.5, 0.6, 0.7, 0.8, 0.9):
                r = frac * p.R
                quad = measure_intersection_quadrature(r, 0.0, p)
                errs.append(abs(measure_intersection_approx(r, 0.0, p) - quad) / quad)
            for prev, cur in zip(errs, errs[1:]):
                assert cur < prev or cur < floor, (alpha, errs)


class TestDoubleIntersectionRegime:
    def test_boundary_cases(self):
        assert double_intersection_regime(6.0, 6.0, 0.0) is True
        assert double_intersection_regime(6.0, 6.0, 1e-9) is False

    def test_direct_bound_evaluation(self):
        # e^{-4} - e^{-5} ~ 0.01158, so theta = 0.01 is inside the regime
        assert double_intersection_regime(10.0, 8.0, 0.01) is True
        assert double_intersection_regime(10.0, 8.0, 0.012) is False

    def test_requires_ordered_radii(self):
        with pytest.raises(ValueError, match="r1 >= r2"):
            double_intersection_regime(5.0, 6.0, 0.0)

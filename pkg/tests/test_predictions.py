import math

import numpy as np
import pytest
from scipy import integrate

from hrg import Params
from hrg.sampling import SeededStream, sample_coordinates
from hrg.generator import build_bucketed
from hrg.stats import partition_stats
from hrg.predictions import (
    PredictionReport,
    upper_incomplete_gamma,
    predicted_degree_fraction,
    predicted_tail_fraction,
    predicted_average_degree,
    expected_degree_at_radius,
    predicted_max_degree_radius_and_exponent,
    degree_k_radius,
    expected_restricted_degree_count,
    expected_inner_count,
    expected_crossing_edges_bound,
    build_prediction_report,
)


@pytest.fixture
def params():
    return Params(alpha=0.75, C=0.0, n=100_000)


class TestUpperIncompleteGamma:
    def test_a_equals_one_is_exponential(self):
        for x in (0.01, 0.5, 1.0, 3.0, 8.0):
            assert abs(upper_incomplete_gamma(1.0, x) - math.exp(-x)) <= 1e-12

    def test_recurrence_identity(self):
        # Gamma(a+1, x) = a*Gamma(a, x) + x^a e^{-x}, randomized over the plane
        rng = np.random.default_rng(17)
        for _ in range(100):
            a = rng.uniform(-3, 3)
            x = rng.uniform(1e-6, 10)
            lhs = upper_incomplete_gamma(a + 1.0, x)
            rhs = a * upper_incomplete_gamma(a, x) + x**a * math.exp(-x)
            scale = max(abs(lhs), x**a * math.exp(-x), 1e-300)
            assert abs(lhs - rhs) / scale <= 1e-10

    def test_negative_a_against_quadrature(self):
        oracle, err = integrate.quad(lambda t: t**-2.5 * math.exp(-t), 0.5, np.inf)
        assert err < 1e-9
        assert upper_incomplete_gamma(-1.5, 0.5) == pytest.approx(oracle, rel=1e-8)

    def test_zero_a_uses_exponential_integral(self):
        oracle, _ = integrate.quad(lambda t: math.exp(-t) / t, 2.0, np.inf)
        assert upper_incomplete_gamma(0.0, 2.0) == pytest.approx(oracle, rel=1e-10)

    def test_domain(self):
        with pytest.raises(ValueError):
            upper_incomplete_gamma(1.0, 0.0)
        with pytest.raises(ValueError):
            upper_incomplete_gamma(1.0, -1.0)


class TestDegreeFraction:
    def test_partial_sums_below_one(self, params):
        total = sum(predicted_degree_fraction(k, params) for k in range(10_001))
        assert total <= 1.0
        assert total == pytest.approx(1.0, abs=1e-4)  # the full series sums to 1

    def test_large_k_ratio_matches_power_law(self, params):
        k = 500
        ratio = predicted_degree_fraction(k, params) / predicted_degree_fraction(k + 1, params)
        target = ((k + 1) / k) ** (2 * params.alpha + 1)
        assert ratio == pytest.approx(target, rel=0.01)

    def test_log_space_branch_continuous(self, params):
        # branch switch near a = 30: neighbouring k values must stay smooth
        ks = np.arange(25, 40)
        vals = np.array([predicted_degree_fraction(int(k), params) for k in ks])
        ratios = vals[:-1] / vals[1:]
        assert np.all(np.diff(ratios) < 0.02)

    def test_negative_k_rejected(self, params):
        with pytest.raises(ValueError):
            predicted_degree_fraction(-1, params)


class TestTailFraction:
    def test_doubling_ratio_exact(self, params):
        for k in (10, 50, 321):
            ratio = predicted_tail_fraction(2 * k, params) / predicted_tail_fraction(k, params)
            assert ratio == pytest.approx(2.0 ** (-2 * params.alpha), rel=1e-12)

    def test_direct_high_precision_evaluation(self):
        import mpmath

        mpmath.mp.dps = 50
        p = Params(alpha=0.75, C=0.0, n=1000)
        expected = (mpmath.mpf(2) * mpmath.mpf(3) / 4 / (mpmath.pi * mpmath.mpf(1) / 4)) ** mpmath.mpf(
            "1.5"
        ) * mpmath.mpf(100) ** mpmath.mpf("-1.5")
        assert predicted_tail_fraction(100, p) == pytest.approx(float(expected), rel=1e-13)

    def test_overlap_with_degree_fractions(self, params):
        # summed point fractions approach the tail law in the overlap regime
        fractions = np.array(
            [predicted_degree_fraction(j, params) for j in range(100_001)]
        )
        suffix = np.cumsum(fractions[::-1])[::-1]
        for k in (50, 100, 200):
            assert suffix[k] == pytest.approx(predicted_tail_fraction(k, params), rel=0.05)

    def test_k_zero_rejected(self, params):
        with pytest.raises(ValueError):
            predicted_tail_fraction(0, params)


class TestAverageDegree:
    def test_reference_value(self):
        p = Params(alpha=0.75, C=0.0, n=100_000)
        assert predicted_average_degree(p) == pytest.approx(5.7296, abs=5e-5)

    def test_c_scaling_exact(self):
        base = predicted_average_degree(Params(alpha=0.8, C=0.0, n=1000))
        for c in (-1.0, 0.5, 2.0):
            scaled = predicted_average_degree(Params(alpha=0.8, C=c, n=1000))
            assert scaled / base == pytest.approx(math.exp(-c / 2), rel=1e-12)

    def test_large_alpha_limit(self):
        # alpha^2/(alpha - 1/2)^2 -> 1, so the value approaches 2 e^{-C/2} / pi
        p = Params(alpha=5000.0, C=0.1, n=1)  # tiny R keeps alpha*R in range
        assert predicted_average_degree(p) == pytest.approx(
            2 * math.exp(-0.05) / math.pi, rel=1e-3
        )


class TestDegreeAtRadius:
    def test_rim_value(self, params):
        n, alpha = params.n, params.alpha
        got = expected_degree_at_radius(params.R, params)
        expected = 2 * alpha * math.exp(-params.C / 2) * (n - 1) / (math.pi * n * (alpha - 0.5))
        assert got == pytest.approx(expected, rel=1e-12)

    def test_monotone_decreasing(self, params):
        rs = np.linspace(0, params.R, 50)
        vals = [expected_degree_at_radius(float(r), params) for r in rs]
        assert np.all(np.diff(vals) < 0)

    def test_binned_empirical_profile(self):
        # mean degree per radius bin tracks the prediction in the bulk
        p = Params(alpha=0.75, C=0.0, n=100_000)
        coords = sample_coordinates(p, SeededStream(606))
        g = build_bucketed(coords, p)
        from hrg.stats import radius_degree_profile

        centers, means, counts = radius_degree_profile(g, bin_width=0.5)
        checked = 0
        for c, m, cnt in zip(centers, means, counts):
            if cnt < 200 or c < p.R / 2 or c > p.R:
                continue
            pred = expected_degree_at_radius(float(c), p)
            assert m == pytest.approx(pred, rel=0.15), (c, m, pred)
            checked += 1
        assert checked >= 10


class TestMaxDegree:
    def test_exponent_values(self):
        p1 = Params(alpha=1.0, C=0.0, n=1000)
        r0, expo = predicted_max_degree_radius_and_exponent(p1)
        assert r0 == pytest.approx(math.log(1000))
        assert expo == 0.5
        p2 = Params(alpha=0.75, C=0.0, n=1000)
        assert predicted_max_degree_radius_and_exponent(p2)[1] == pytest.approx(2 / 3)


class TestDegreeKRadius:
    def test_inversion_identity(self, params):
        amplitude = 2 * params.alpha / (math.pi * (params.alpha - 0.5))
        for k in (1, 5, 40, 1000):
            r_k = degree_k_radius(k, params)
            # r_1 lies just outside the disk (rim vertices expect ~1.9
            # neighbors), so invert via the raw formula rather than the
            # domain-guarded helper
            assert (params.n - 1) * amplitude * math.exp(-r_k / 2) == pytest.approx(k, rel=1e-12)
        for k in (5, 40, 1000):
            assert expected_degree_at_radius(degree_k_radius(k, params), params) == pytest.approx(
                k, rel=1e-12
            )

    def test_zero_radius_at_amplitude_times_n(self):
        # with alpha = 2 the amplitude 2 alpha/(pi(alpha - 1/2)) < 1, so the
        # degree at which r_k hits 0 stays inside the admissible k range
        p = Params(alpha=2.0, C=0.0, n=1000)
        amplitude = 2 * 2.0 / (math.pi * 1.5)
        k_star = (p.n - 1) * amplitude
        assert degree_k_radius(k_star, p) == pytest.approx(0.0, abs=1e-12)

    def test_monotone_decreasing(self, params):
        ks = [1, 2, 5, 17, 200, 4000]
        vals = [degree_k_radius(k, params) for k in ks]
        assert np.all(np.diff(vals) < 0)

    def test_domain(self, params):
        with pytest.raises(ValueError):
            degree_k_radius(0, params)
        with pytest.raises(ValueError):
            degree_k_radius(params.n, params)


class TestRestrictedDegree:
    def test_equals_scaled_fraction(self, params):
        for k in (0, 3, 12):
            got = expected_restricted_degree_count(k, 0.8, params)
            assert got.value == pytest.approx(params.n * predicted_degree_fraction(k, params))

    def test_validity_flag_on_low_beta(self, params):
        assert expected_restricted_degree_count(5, 0.55, params).valid is False
        assert expected_restricted_degree_count(5, 0.8, params).valid is True

    def test_validity_flag_on_large_k(self, params):
        delta = min(2 * (2 * 0.8 - 1), 0.5)
        k_bad = int(params.n**delta) + 10
        assert expected_restricted_degree_count(k_bad, 0.8, params).valid is False

    def test_beta_domain(self, params):
        with pytest.raises(ValueError):
            expected_restricted_degree_count(1, 0.0, params)

    def test_empirical_restricted_counts(self):
        # E[D_k(0.8)] at n = 1e5 within 10% over 10 seeds.  The oracle is the
        # exact finite-n integral: the asymptotic formula's correction decays
        # like n^{-2(alpha-1/2)(1-beta)} = n^{-0.1} and is ~35% off at this n.
        from hrg.predictions import expected_restricted_degree_count_exact

        p = Params(alpha=0.75, C=0.0, n=100_000)
        ks = (3, 5, 8)
        totals = {k: 0 for k in ks}
        n_seeds = 10
        for seed in range(n_seeds):
            g = build_bucketed(sample_coordinates(p, SeededStream(seed)), p)
            part = partition_stats(g, beta=0.8)
            for k in ks:
                totals[k] += part.restricted_degrees.get(k, 0)
        exact = expected_restricted_degree_count_exact(ks, 0.8, p)
        for k in ks:
            mean = totals[k] / n_seeds
            assert mean == pytest.approx(exact[k], rel=0.10), (k, mean, exact[k])
            # the asymptotic value is the right order but not the right constant here
            asym = expected_restricted_degree_count(k, 0.8, p).value
            assert asym / 4 <= mean <= asym * 4


class TestInnerAndCrossing:
    def test_inner_limits(self, params):
        assert expected_inner_count(1 - 1e-12, params) == pytest.approx(params.n)
        assert expected_inner_count(1e-12, params) == pytest.approx(0.0, abs=1e-6)

    def test_empirical_inner_count(self):
        p = Params(alpha=0.75, C=0.0, n=10_000)
        expected = expected_inner_count(0.8, p)
        counts = []
        for seed in range(20):
            g = build_bucketed(sample_coordinates(p, SeededStream(seed)), p)
            counts.append(partition_stats(g, beta=0.8).inner_count)
        mean = float(np.mean(counts))
        assert expected / 3 <= mean <= 3 * expected

    def test_crossing_bound_form(self, params):
        got = expected_crossing_edges_bound(0.8, params)
        expected = params.n ** (1 - 0.5 * 0.2) * math.log(params.n)
        assert got == pytest.approx(expected, rel=1e-12)


class TestPredictionReport:
    def test_json_roundtrip(self):
        p = Params(alpha=0.75, C=0.0, n=5000)
        report = build_prediction_report(p, k_max=20)
        back = PredictionReport.from_json(report.to_json())
        assert back == report

    def test_deterministic(self):
        p = Params(alpha=0.9, C=-0.5, n=2000)
        assert build_prediction_report(p).to_json() == build_prediction_report(p).to_json()

    def test_tail_fraction_non_increasing(self):
        p = Params(alpha=0.75, C=0.0, n=5000)
        report = build_prediction_report(p)
        ks = sorted(report.tail_fraction)
        vals = [report.tail_fraction[k] for k in ks]
        assert np.all(np.diff(vals) <= 0)
        assert report.xi > 0
        assert all(v >= 0 for v in report.degree_fraction.values())

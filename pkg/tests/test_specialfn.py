"""Contract and oracle tests for the scalar special functions."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import ndtri, owens_t

from poolvol import DomainError, bvn_cdf, norm_cdf, norm_inv_cdf, norm_pdf

mpmath.mp.dps = 40


def mp_norm_cdf(x: float) -> float:
    return float(mpmath.ncdf(x))


def bvn_owen(h: float, k: float, rho: float) -> float:
    """Independent bivariate normal CDF via Owen's T function (h, k nonzero)."""
    if rho == 0.0:
        return norm_cdf(h) * norm_cdf(k)
    assert h != 0.0 and k != 0.0
    s = math.sqrt(1.0 - rho * rho)
    t1 = float(owens_t(h, (k - rho * h) / (h * s)))
    t2 = float(owens_t(k, (h - rho * k) / (k * s)))
    delta = 0.5 if h * k < 0.0 else 0.0
    return 0.5 * (norm_cdf(h) + norm_cdf(k)) - t1 - t2 - delta


def bvn_quad(h: float, k: float, rho: float) -> float:
    """Slow quadrature oracle: integrate Phi((k - rho x)/sqrt(1-rho^2)) phi(x)."""
    s = math.sqrt(1.0 - rho * rho)

    def integrand(x):
        return norm_cdf((k - rho * x) / s) * norm_pdf(x)

    val, err = integrate.quad(integrand, -40.0, h, limit=400, epsabs=1e-13, epsrel=1e-13)
    assert err < 1e-10
    return val


class TestNormPdf:
    def test_at_zero(self):
        assert norm_pdf(0.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi), abs=1e-16)
        assert norm_pdf(0.0) == pytest.approx(0.3989422804014327, abs=1e-16)

    def test_symmetry(self):
        x = np.linspace(-8, 8, 101)
        assert np.array_equal(norm_pdf(x), norm_pdf(-x))

    def test_at_two(self):
        # direct evaluation of the closed form
        assert norm_pdf(2.0) == pytest.approx(math.exp(-2.0) / math.sqrt(2 * math.pi), rel=1e-15)
        assert norm_pdf(2.0) == pytest.approx(0.05399096651318806, rel=1e-15)

    def test_positive(self):
        assert np.all(norm_pdf(np.linspace(-38, 38, 777)) > 0)


class TestNormCdf:
    def test_at_zero(self):
        assert norm_cdf(0.0) == 0.5

    def test_limits(self):
        assert norm_cdf(-math.inf) == 0.0
        assert norm_cdf(math.inf) == 1.0

    def test_symmetry_grid(self):
        x = np.linspace(-10, 10, 2001)
        assert np.max(np.abs(norm_cdf(x) + norm_cdf(-x) - 1.0)) <= 1e-15

    @given(st.floats(-30, 30))
    def test_symmetry_property(self, x):
        assert norm_cdf(x) + norm_cdf(-x) == pytest.approx(1.0, abs=1e-15)

    def test_monotone(self):
        x = np.linspace(-12, 12, 10_000)
        assert np.all(np.diff(norm_cdf(x)) >= 0.0)

    def test_quantile_975(self):
        # verify the frozen quantile by bisecting the high-precision CDF
        lo, hi = 1.9, 2.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if mp_norm_cdf(mid) < 0.975:
                lo = mid
            else:
                hi = mid
        assert 0.5 * (lo + hi) == pytest.approx(1.959963984540054, abs=1e-13)
        assert norm_cdf(1.959963984540054) == pytest.approx(0.975, abs=1e-12)

    def test_against_mpmath_tails(self):
        for x in (-37.0, -20.0, -8.0, -3.0, -1.0, 0.3, 2.0, 6.0, 12.0):
            assert norm_cdf(x) == pytest.approx(mp_norm_cdf(x), rel=1e-13, abs=1e-300)


class TestNormInvCdf:
    def test_center(self):
        assert norm_inv_cdf(0.5) == 0.0

    def test_boundaries(self):
        assert norm_inv_cdf(0.0) == -math.inf
        assert norm_inv_cdf(1.0) == math.inf

    def test_domain_error(self):
        with pytest.raises(DomainError):
            norm_inv_cdf(-1e-12)
        with pytest.raises(DomainError):
            norm_inv_cdf(1.0 + 1e-12)

    def test_quantile_975(self):
        assert norm_inv_cdf(0.975) == pytest.approx(1.959963984540054, abs=1e-9)

    def test_round_trip_grid(self):
        p = np.concatenate(
            [
                10.0 ** np.arange(-300.0, 0.0),
                np.linspace(1e-6, 1 - 1e-6, 20_001),
                1.0 - 10.0 ** np.arange(-16.0, -1.0),
            ]
        )
        err = np.abs(norm_cdf(norm_inv_cdf(p)) - p)
        assert err.max() <= 1e-9

    @given(st.floats(1e-300, 1.0 - 1e-16))
    @settings(max_examples=200)
    def test_round_trip_property(self, p):
        assert norm_cdf(norm_inv_cdf(p)) == pytest.approx(p, abs=1e-9)

    def test_against_scipy(self):
        p = np.linspace(1e-9, 1 - 1e-9, 50_001)
        rel = np.abs(norm_inv_cdf(p) - ndtri(p)) / np.maximum(np.abs(ndtri(p)), 1e-12)
        assert rel.max() <= 5e-14


class TestBvnCdf:
    def test_independent_quadrant(self):
        assert bvn_cdf(0.0, 0.0, 0.0) == pytest.approx(0.25, abs=1e-15)

    def test_arcsin_identity(self):
        assert bvn_cdf(0.0, 0.0, 0.5) == pytest.approx(1.0 / 3.0, abs=1e-12)
        rho = np.linspace(-0.999, 0.999, 41)
        want = 0.25 + np.arcsin(rho) / (2 * math.pi)
        got = bvn_cdf(0.0, 0.0, rho)
        assert np.max(np.abs(got - want)) <= 1e-13

    def test_independence_factorization(self):
        assert bvn_cdf(1.0, -1.0, 0.0) == pytest.approx(
            norm_cdf(1.0) * norm_cdf(-1.0), abs=1e-12
        )

    def test_marginal_at_infinity(self):
        for h in (-2.0, 0.3, 4.0):
            for rho in (-0.95, 0.0, 0.6):
                assert bvn_cdf(h, math.inf, rho) == pytest.approx(norm_cdf(h), abs=1e-15)
                assert bvn_cdf(math.inf, h, rho) == pytest.approx(norm_cdf(h), abs=1e-15)
        assert bvn_cdf(-math.inf, 1.0, 0.5) == 0.0

    def test_degenerate_correlation(self):
        for h, k in ((0.5, 1.5), (-2.0, -1.0), (0.0, 0.0)):
            assert bvn_cdf(h, k, 1.0) == pytest.approx(norm_cdf(min(h, k)), abs=1e-15)
            assert bvn_cdf(h, k, -1.0) == pytest.approx(
                max(0.0, norm_cdf(h) + norm_cdf(k) - 1.0), abs=1e-15
            )

    def test_symmetry_in_arguments(self):
        rng = np.random.default_rng(4)
        h = rng.normal(size=200)
        k = rng.normal(size=200)
        rho = rng.uniform(-0.99, 0.99, size=200)
        assert np.array_equal(bvn_cdf(h, k, rho), bvn_cdf(k, h, rho))

    def test_domain_error(self):
        with pytest.raises(DomainError):
            bvn_cdf(0.0, 0.0, 1.0 + 1e-9)

    @given(
        st.floats(-5, 5),
        st.floats(-5, 5),
        st.floats(-5, 5),
        st.floats(-0.999, 0.999),
    )
    @settings(max_examples=200)
    def test_monotone_in_first_argument(self, h1, h2, k, rho):
        lo, hi = min(h1, h2), max(h1, h2)
        assert bvn_cdf(lo, k, rho) <= bvn_cdf(hi, k, rho) + 1e-15

    def test_against_owen_oracle(self):
        hs = (-8.0, -3.0, -1.0, -0.5, 0.5, 1.0, 3.0, 8.0)
        rhos = (
            -0.9999, -0.999, -0.99, -0.95, -0.926, -0.925, -0.9, -0.75,
            -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.75, 0.9, 0.925, 0.926,
            0.95, 0.99, 0.999, 0.9999,
        )
        worst = 0.0
        for h in hs:
            for k in hs:
                for rho in rhos:
                    got = bvn_cdf(h, k, rho)
                    want = bvn_owen(h, k, rho)
                    worst = max(worst, abs(got - want))
        assert worst <= 1e-12

    def test_high_correlation_against_quadrature(self):
        for rho in (0.93, 0.97, 0.995, -0.94, -0.999):
            for h, k in ((0.2, -0.4), (-1.5, -1.2), (1.0, 2.0), (0.0, 1.0)):
                assert bvn_cdf(h, k, rho) == pytest.approx(bvn_quad(h, k, rho), abs=5e-11)


class TestGaussianSmoothingIdentities:
    """Quadrature identities behind the semi-analytic pricers."""

    def test_unconditional_mean_identity(self):
        # E[Phi(c0 - c1 W)] = Phi(c0 / sqrt(1 + c1^2)), W standard normal
        w = np.linspace(-12.0, 12.0, 24_001)
        phi_w = norm_pdf(w)
        for c0 in (-2.0, -0.3, 0.0, 1.1, 3.0):
            for c1 in (-1.5, 0.2, 0.9, 2.5):
                quad = np.trapezoid(norm_cdf(c0 - c1 * w) * phi_w, w)
                want = norm_cdf(c0 / math.sqrt(1.0 + c1 * c1))
                assert quad == pytest.approx(want, abs=1e-8)

    def test_truncated_identity_matches_bvn(self):
        # int_{-inf}^{w0} Phi(c0 - c1 w) phi(w) dw = BvN(c0/s, w0; c1/s), s = sqrt(1+c1^2)
        for c0, c1, w0 in ((0.4, 0.8, 0.0), (-1.0, 2.0, 1.3), (2.0, 0.3, -0.7), (0.0, 1.0, 2.5)):
            def integrand(w):
                return norm_cdf(c0 - c1 * w) * norm_pdf(w)

            quad, err = integrate.quad(integrand, -40.0, w0, limit=400, epsabs=1e-12)
            s = math.sqrt(1.0 + c1 * c1)
            want = bvn_cdf(c0 / s, w0, c1 / s)
            assert quad == pytest.approx(want, abs=1e-8)

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats
from scipy.integrate import quad

from sinharcsinh import numerics as nx
from sinharcsinh.sas import (SasParams, SymmetricSasParams, f0_cdf, f0_pdf, f0_quantile,
                             sas_cdf, sas_logpdf, sas_pdf, sas_quantile, sas_sample,
                             sas_transform)

DELTAS = (0.25, 0.5, 1.0, 2.0, 4.0)
EPSILONS = (-3.0, 0.0, 3.0)

reals = st.floats(-50, 50)
positive = st.floats(0.05, 20)


def _sign_changes(x, p):
    d = np.sign(np.diff(sas_pdf(x, p)))
    d = d[d != 0]
    return int(np.count_nonzero(np.diff(d) != 0))


def mp_sas_pdf(x, mu, sigma, eps, delta):
    mpmath.mp.dps = 40
    z = (mpmath.mpf(x) - mu) / sigma
    s = mpmath.asinh(z)
    h = mpmath.sinh(delta * s - eps)
    c = mpmath.cosh(delta * s - eps)
    return float(mpmath.npdf(h) * delta * c / (sigma * mpmath.sqrt(1 + z * z)))


class TestParams:
    @pytest.mark.parametrize("kw", [dict(sigma=0.0), dict(sigma=-1.0), dict(delta=0.0),
                                    dict(mu=np.inf), dict(epsilon=np.nan)])
    def test_invalid(self, kw):
        base = dict(mu=0.0, sigma=1.0, epsilon=0.0, delta=1.0)
        base.update(kw)
        with pytest.raises(ValueError):
            SasParams(**base)

    def test_symmetric_params(self):
        with pytest.raises(ValueError):
            SymmetricSasParams(-1.0)


class TestTransform:
    def test_zero_at_mu(self):
        assert sas_transform(3.0, SasParams(3.0, 7.0, 0.0, 2.5)) == 0.0

    @given(reals)
    def test_identity(self, z):
        assert sas_transform(z, SasParams(0, 1, 0, 1)) == pytest.approx(z, rel=1e-14, abs=1e-300)

    def test_known_value(self):
        assert sas_transform(0.0, SasParams(0, 1, 1, 1)) == pytest.approx(-math.sinh(1.0), abs=1e-15)

    @given(st.floats(-3, 3), positive)
    def test_increasing(self, eps, delta):
        x = np.linspace(-30, 30, 501)
        h = sas_transform(x, SasParams(0.5, 2.0, eps, delta))
        assert np.all(np.diff(h) >= 0)


class TestPdf:
    def test_normal_case(self):
        x = np.linspace(-8, 8, 50)
        np.testing.assert_allclose(sas_pdf(x, SasParams(0, 1, 0, 1)), stats.norm.pdf(x),
                                   rtol=0, atol=1e-15)
        assert sas_pdf(0.0, SasParams(0, 1, 0, 1)) == pytest.approx(0.3989423, abs=1e-7)

    @given(reals, positive)
    def test_symmetry(self, x, delta):
        p = SasParams(0, 1, 0, delta)
        assert sas_pdf(x, p) == pytest.approx(sas_pdf(-x, p), rel=1e-12, abs=1e-300)

    def test_hand_value(self):
        ref = stats.norm.pdf(math.sinh(1.0)) * math.cosh(1.0)
        assert sas_pdf(0.0, SasParams(0, 1, 1, 1)) == pytest.approx(ref, rel=1e-14)

    @pytest.mark.parametrize("eps", EPSILONS)
    @pytest.mark.parametrize("delta", DELTAS)
    def test_against_mpmath(self, eps, delta):
        for x in (-7.3, -1.0, 0.0, 0.4, 2.2, 11.0):
            ref = mp_sas_pdf(x, 0.3, 1.7, eps, delta)
            got = sas_pdf(x, SasParams(0.3, 1.7, eps, delta))
            assert got == pytest.approx(ref, rel=1e-11, abs=1e-300)

    def test_logpdf_extreme_no_overflow(self):
        # cosh(delta * asinh z) overflows here; the log form does not
        p = SasParams(0, 1, 0, 200.0)
        lp = sas_logpdf(1e4, p)
        assert np.isfinite(lp) or lp == -np.inf
        assert np.isfinite(sas_logpdf(0.5, p))

    @given(reals, st.floats(-10, 10), positive, st.floats(-3, 3), positive)
    def test_location_scale(self, x, mu, sigma, eps, delta):
        lhs = sas_pdf(x, SasParams(mu, sigma, eps, delta))
        rhs = sas_pdf((x - mu) / sigma, SasParams(0, 1, eps, delta)) / sigma
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)

    @pytest.mark.parametrize("eps", EPSILONS)
    @pytest.mark.parametrize("delta", DELTAS)
    def test_normalization(self, eps, delta):
        p = SasParams(0, 1, eps, delta)
        pts = sas_quantile(np.array([1e-6, 0.01, 0.25, 0.5, 0.75, 0.99, 1 - 1e-6]), p)
        r = nx.integrate(lambda x: sas_pdf(x, p), -np.inf, np.inf, abs_tol=1e-10, points=pts)
        assert abs(r.value - 1.0) < 1e-7

    @pytest.mark.parametrize("eps,delta", [
        pytest.param(e, d, marks=pytest.mark.xfail(
            strict=True, reason="mode at about 210 sigma, outside the window"))
        if (d == 0.25 and e != 0) else (e, d)
        for d in DELTAS for e in EPSILONS])
    def test_unimodal_on_fixed_window(self, eps, delta):
        assert _sign_changes(np.linspace(-20, 20, 2001), SasParams(0, 1, eps, delta)) == 1

    @pytest.mark.parametrize("eps", EPSILONS)
    @pytest.mark.parametrize("delta", DELTAS)
    def test_unimodal_around_mode(self, eps, delta):
        from sinharcsinh.asymmetry import find_mode, unimodal
        p = SasParams(0, 1, eps, delta)
        m = find_mode(unimodal(p))
        half = 20 * max(1.0, abs(m))
        assert _sign_changes(np.linspace(m - half, m + half, 2001), p) == 1


class TestCdf:
    def test_values(self):
        assert sas_cdf(2.0, SasParams(2.0, 3.0, 0, 0.7)) == 0.5
        assert sas_cdf(1.96, SasParams(0, 1, 0, 1)) == pytest.approx(0.9750021, abs=1e-7)
        mpmath.mp.dps = 30
        ref = float(mpmath.ncdf(-mpmath.sinh(1)))
        assert sas_cdf(0.0, SasParams(0, 1, 1, 1)) == pytest.approx(ref, abs=1e-15)

    def test_limits(self):
        p = SasParams(0, 1, 1, 0.5)
        assert sas_cdf(-np.inf, p) == 0.0
        assert sas_cdf(np.inf, p) == 1.0

    def test_normal_case(self):
        x = np.linspace(-8, 8, 50)
        np.testing.assert_allclose(sas_cdf(x, SasParams(0, 1, 0, 1)), stats.norm.cdf(x),
                                   rtol=0, atol=1e-12)

    @pytest.mark.parametrize("eps,delta", [(0.0, 0.5), (1.0, 2.0), (-2.0, 0.75), (3.0, 4.0)])
    def test_matches_quadrature(self, eps, delta):
        mu, sigma = 1.0, 2.0
        p = SasParams(mu, sigma, eps, delta)
        for x in (mu - 2 * sigma, mu, mu + 2 * sigma):
            ref = quad(lambda t: sas_pdf(t, p), -np.inf, x, epsabs=1e-12, limit=400)[0]
            assert abs(sas_cdf(x, p) - ref) < 1e-7


class TestQuantile:
    def test_values(self):
        assert sas_quantile(0.5, SasParams(1.5, 2.0, 0.0, 0.3)) == 1.5
        assert sas_quantile(0.975, SasParams(0, 1, 0, 1)) == pytest.approx(1.959964, abs=1e-6)

    def test_normal_case(self):
        u = np.linspace(0.01, 0.99, 50)
        np.testing.assert_allclose(sas_quantile(u, SasParams(0, 1, 0, 1)), stats.norm.ppf(u),
                                   rtol=0, atol=1e-12)

    def test_roundtrip_grid(self):
        u = np.round(np.arange(0.001, 0.9995, 0.001), 3)
        p = SasParams(0, 1, 1, 0.5)
        assert np.max(np.abs(sas_cdf(sas_quantile(u, p), p) - u)) < 1e-10

    @given(st.floats(1e-9, 1 - 1e-9), st.floats(-3, 3), st.floats(0.2, 5))
    def test_roundtrip_property(self, u, eps, delta):
        p = SasParams(-1.0, 0.5, eps, delta)
        assert abs(sas_cdf(sas_quantile(u, p), p) - u) < 1e-10

    @pytest.mark.parametrize("u", [0.0, 1.0, 2.0])
    def test_domain(self, u):
        with pytest.raises(ValueError):
            sas_quantile(u, SasParams(0, 1, 0, 1))


class TestSymmetricBuildingBlock:
    @given(st.floats(-20, 20), positive)
    def test_f0_is_sas(self, z, delta):
        assert f0_pdf(z, delta) == pytest.approx(sas_pdf(z, SasParams(0, 1, 0, delta)), rel=1e-13)
        assert f0_cdf(z, delta) == pytest.approx(sas_cdf(z, SasParams(0, 1, 0, delta)), rel=1e-13)

    @given(st.floats(1e-6, 1 - 1e-6), positive)
    def test_f0_quantile(self, u, delta):
        assert f0_cdf(f0_quantile(u, delta), delta) == pytest.approx(u, abs=1e-11)


class TestSample:
    def test_normal_moments(self):
        x = sas_sample(100_000, SasParams(0, 1, 0, 1), seed=1)
        assert abs(x.mean()) < 0.02
        assert abs(x.var() - 1.0) < 0.05

    def test_deterministic(self):
        p = SasParams(0, 1, 0.5, 0.8)
        assert np.array_equal(sas_sample(50, p, 9), sas_sample(50, p, 9))
        assert not np.array_equal(sas_sample(50, p, 9), sas_sample(50, p, 10))

    def test_ks(self):
        p = SasParams(0, 1, 1, 1)
        x = sas_sample(100_000, p, seed=2)
        assert stats.kstest(x, lambda t: sas_cdf(t, p)).statistic < 0.007

    @pytest.mark.parametrize("n", [0, -3, 2.5])
    def test_bad_n(self, n):
        with pytest.raises(ValueError):
            sas_sample(n, SasParams(0, 1, 0, 1), 0)

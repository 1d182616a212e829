import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from trendaudit import ols_simple, pearson, residual_lag1_corr, student_t_sf
from trendaudit.errors import ConstantInput, ConstantRegressor, LengthMismatch, TooShort
from trendaudit.stats import betainc_regularized, corr_rows

vectors = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=3, max_size=40)


def t_sf_quadrature(t, df):
    """Upper tail of Student's t by numerical integration of the density."""
    with mpmath.workdps(40):
        nu = mpmath.mpf(df)
        c = mpmath.gamma((nu + 1) / 2) / (mpmath.sqrt(nu * mpmath.pi) * mpmath.gamma(nu / 2))
        dens = lambda u: c * (1 + u * u / nu) ** (-(nu + 1) / 2)
        return float(mpmath.quad(dens, [t, mpmath.inf]))


class TestStudentT:
    def test_zero(self):
        for df in (1, 2, 7, 500):
            assert student_t_sf(0.0, df) == 0.5

    def test_cauchy_quartile(self):
        assert student_t_sf(1.0, 1) == pytest.approx(0.25, abs=1e-14)

    def test_table_value(self):
        oracle = t_sf_quadrature(2.228, 10)
        assert oracle == pytest.approx(0.025, abs=5e-5)
        assert student_t_sf(2.228, 10) == pytest.approx(oracle, abs=1e-10)

    @pytest.mark.parametrize("t,df", [(0.3, 3), (-1.7, 5), (4.5, 12), (12.0, 2), (0.01, 99)])
    def test_against_quadrature(self, t, df):
        assert student_t_sf(t, df) == pytest.approx(t_sf_quadrature(t, df), abs=1e-10)

    @given(st.floats(-50, 50), st.integers(1, 400))
    def test_symmetry(self, t, df):
        assert abs(student_t_sf(t, df) + student_t_sf(-t, df) - 1.0) <= 1e-12

    def test_infinite(self):
        assert student_t_sf(math.inf, 4) == 0.0
        assert student_t_sf(-math.inf, 4) == 1.0

    def test_bad_df(self):
        with pytest.raises(ValueError):
            student_t_sf(1.0, 0)

    def test_betainc_edges(self):
        assert betainc_regularized(2.0, 3.0, 0.0) == 0.0
        assert betainc_regularized(2.0, 3.0, 1.0) == 1.0
        # I_x(1, 1) = x
        assert betainc_regularized(1.0, 1.0, 0.37) == pytest.approx(0.37, abs=1e-15)


class TestPearson:
    def test_identity(self):
        x = [0.3, -1.2, 4.0, 2.2]
        assert pearson(x, x).r == pytest.approx(1.0, abs=1e-15)

    def test_closed_form(self):
        assert pearson([1, 2, 3], [1, 2, 4]).r == pytest.approx(3 / math.sqrt(28 / 3), abs=1e-12)

    def test_anti(self):
        res = pearson([1, 2, 3], [3, 2, 1])
        assert res.r == -1.0
        assert res.p_two_sided == 0.0
        assert res.t_stat == -math.inf

    def test_p_value_matches_t(self):
        res = pearson([1, 2, 3, 4, 5, 6], [2, 1, 4, 3, 7, 5])
        df = res.n - 2
        assert res.t_stat == pytest.approx(res.r * math.sqrt(df / (1 - res.r ** 2)), abs=1e-9)
        assert res.p_two_sided == pytest.approx(2 * t_sf_quadrature(abs(res.t_stat), df), abs=1e-10)

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            pearson([1, 2, 3], [1, 2])
        with pytest.raises(TooShort):
            pearson([1, 2], [2, 1])
        with pytest.raises(ConstantInput):
            pearson([1, 1, 1], [1, 2, 3])

    @given(vectors, st.data())
    def test_symmetric_exactly(self, x, data):
        y = data.draw(st.lists(st.floats(-1e3, 1e3, allow_nan=False),
                               min_size=len(x), max_size=len(x)))
        assume(np.ptp(x) > 1e-3 and np.ptp(y) > 1e-3)
        assert pearson(x, y).r == pearson(y, x).r

    @given(vectors, st.floats(0.01, 100), st.floats(-100, 100))
    def test_affine_invariance(self, x, a, b):
        assume(np.ptp(x) > 1e-2)
        y = np.sin(np.arange(len(x)) * 1.3) + np.arange(len(x)) * 0.1
        r = pearson(x, y).r
        x = np.asarray(x)
        assert pearson(a * x + b, y).r == pytest.approx(r, abs=1e-9)
        assert pearson(-a * x + b, y).r == pytest.approx(-r, abs=1e-9)

    def test_mode_label(self):
        assert pearson([1, 2, 3], [1, 3, 2], "changes").mode == "changes"


class TestOls:
    def test_exact_fit(self):
        fit = ols_simple([1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 4.0])
        assert fit.beta0 == pytest.approx(0.0, abs=1e-12)
        assert fit.beta1 == pytest.approx(1.0)
        assert fit.r_squared == pytest.approx(1.0)

    def test_hand_example(self):
        fit = ols_simple([1, 2, 2], [0, 1, 2])
        assert fit.beta1 == pytest.approx(0.5)
        assert fit.beta0 == pytest.approx(7 / 6)
        assert fit.r_squared == pytest.approx(0.75)
        # SSR = 1/6, se = sqrt(SSR / (n - 2) / Sxx) with Sxx = 2
        assert fit.se_beta1 == pytest.approx(math.sqrt(1 / 12))

    def test_constant_response(self):
        fit = ols_simple([3.0, 3.0, 3.0], [1.0, 2.0, 4.0])
        assert fit.beta1 == 0.0 and fit.r_squared == 0.0 and fit.degenerate

    def test_errors(self):
        with pytest.raises(ConstantRegressor):
            ols_simple([1, 2, 3], [2, 2, 2])
        with pytest.raises(LengthMismatch):
            ols_simple([1, 2, 3], [1, 2])
        with pytest.raises(TooShort):
            ols_simple([1, 2], [1, 2])

    @given(vectors, st.data())
    def test_properties(self, x, data):
        y = data.draw(st.lists(st.floats(-1e3, 1e3, allow_nan=False),
                               min_size=len(x), max_size=len(x)))
        assume(np.ptp(x) > 1e-2 and np.ptp(y) > 1e-2)
        yx, xy = ols_simple(y, x), ols_simple(x, y)
        r = pearson(x, y).r
        assert yx.beta1 * xy.beta1 == pytest.approx(r * r, abs=1e-9)
        assert yx.r_squared == pytest.approx(r * r, abs=1e-9)
        scale = np.abs(y).max() * len(y)
        e = yx.residuals
        assert abs(e.sum()) <= 1e-9 * scale
        xc = np.asarray(x) - np.mean(x)
        assert abs(np.sum(e * xc)) <= 1e-9 * scale * np.abs(xc).max()


class TestResidualLag1:
    def test_geometric_chain(self):
        e = 0.9 ** np.arange(50)
        d = residual_lag1_corr(e)
        assert d.rho_hat >= 0.999
        assert d.n_pairs == 49

    def test_alternating(self):
        e = np.array([1.0, -1.0] * 10)
        assert residual_lag1_corr(e).rho_hat == pytest.approx(-1.0)

    def test_white_noise(self):
        rng = np.random.default_rng(11)
        hits = sum(abs(residual_lag1_corr(rng.standard_normal(10_000)).rho_hat) < 0.05
                   for _ in range(200))
        assert hits >= 198

    def test_accepts_fit(self):
        x = np.arange(20.0)
        fit = ols_simple(np.sin(x) + x, x)
        d = residual_lag1_corr(fit)
        assert d.n_pairs == 19
        assert d.rho_hat == pearson(fit.residuals[1:], fit.residuals[:-1]).r

    def test_too_short(self):
        with pytest.raises(TooShort):
            residual_lag1_corr([1.0, 2.0, 0.0])


def test_corr_rows_matches_pearson():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((30, 25))
    y = rng.standard_normal(25)
    rows = corr_rows(a, y)
    for i in range(30):
        assert rows[i] == pytest.approx(pearson(a[i], y).r, abs=1e-14)
    assert np.isnan(corr_rows(np.ones((1, 5)), y[:5])[0])

"""Correlation, simple regression and residual autocorrelation kernels.

The Student t tail is evaluated through the regularized incomplete beta
function (continued fraction), so p-values stay exact for the short annual
samples this package deals with (n around 50 to 100).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ConstantInput, ConstantRegressor, LengthMismatch, TooShort

Mode = Literal["levels", "changes"]

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAXIT = 20000


def _beta_cf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc_regularized(a: float, b: float, x: float, y: float | None = None) -> float:
    """Regularized incomplete beta function ``I_x(a, b)``.

    `y` may carry ``1 - x`` computed without cancellation by the caller.
    """
    if y is None:
        y = 1.0 - x
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = (a * math.log(x) + b * math.log(y)
                 + math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, y) / b


def student_t_sf(t: float, df: int) -> float:
    """Upper-tail probability ``P(T > t)`` for Student's t with `df` dof."""
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if math.isnan(t):
        return math.nan
    if t == 0.0:
        return 0.5
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    t2 = t * t
    x = df / (df + t2)
    y = t2 / (df + t2)
    tail = 0.5 * betainc_regularized(0.5 * df, 0.5, x, y)
    return tail if t > 0 else 1.0 - tail


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    n: int
    t_stat: float
    p_two_sided: float
    mode: str = "levels"

    def significant(self, alpha: float = 0.05) -> bool:
        return self.p_two_sided < alpha


def _as_pair(x, y, min_n: int):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"vectors of shape {x.shape} and {y.shape}")
    if len(x) < min_n:
        raise TooShort(f"need at least {min_n} observations, got {len(x)}")
    return x, y


def pearson(x, y, mode: Mode = "levels") -> CorrelationResult:
    """Pearson product-moment correlation with a two-sided t-test.

    Parameters
    ----------
    x, y : array_like
        Equal-length vectors with at least 3 observations, neither constant.
    mode : {"levels", "changes"}
        Label carried into the result; it does not alter the computation.

    Returns
    -------
    CorrelationResult
        ``p_two_sided`` uses the t distribution with ``n - 2`` degrees of
        freedom.
    """
    x, y = _as_pair(x, y, 3)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise ConstantInput("correlation is undefined for a constant vector")
    n = len(x)
    dx = x - x.mean()
    dy = y - y.mean()
    r = float(np.sum(dx * dy) / math.sqrt(np.sum(dx * dx) * np.sum(dy * dy)))
    r = min(1.0, max(-1.0, r))
    df = n - 2
    if abs(r) == 1.0:
        t_stat = math.copysign(math.inf, r)
        p = 0.0
    else:
        t_stat = r * math.sqrt(df / (1.0 - r * r))
        p = min(1.0, 2.0 * student_t_sf(abs(t_stat), df))
    return CorrelationResult(r=r, n=n, t_stat=t_stat, p_two_sided=p, mode=mode)


@dataclass(frozen=True, eq=False)
class OlsFit:
    beta0: float
    beta1: float
    residuals: np.ndarray
    r_squared: float
    n: int
    se_beta1: float
    degenerate: bool = False


def ols_simple(y, x) -> OlsFit:
    """Least-squares fit of ``y = beta0 + beta1 * x + error``.

    A constant response is allowed and gives ``beta1 = 0``, ``r_squared = 0``
    with ``degenerate=True``; a constant regressor is an error.
    """
    y, x = _as_pair(y, x, 3)
    if np.ptp(x) == 0:
        raise ConstantRegressor("regressor has zero variance")
    n = len(y)
    xm, ym = x.mean(), y.mean()
    xc = x - xm
    yc = y - ym
    sxx = np.sum(xc * xc)
    sst = np.sum(yc * yc)
    beta1 = float(np.sum(xc * yc) / sxx)
    beta0 = float(ym - beta1 * xm)
    resid = yc - beta1 * xc
    resid.setflags(write=False)
    ssr = float(np.sum(resid * resid))
    degenerate = sst == 0
    r2 = 0.0 if degenerate else min(1.0, max(0.0, 1.0 - ssr / sst))
    se = math.sqrt(ssr / (n - 2) / sxx)
    return OlsFit(beta0, beta1, resid, r2, n, se, degenerate)


@dataclass(frozen=True)
class Ar1Diagnostics:
    rho_hat: float
    n_pairs: int


def residual_lag1_corr(fit) -> Ar1Diagnostics:
    """Correlation between each residual and its predecessor.

    Accepts an :class:`OlsFit` or a bare residual vector.
    """
    e = np.asarray(getattr(fit, "residuals", fit), dtype=float)
    if len(e) < 4:
        raise TooShort(f"need at least 4 residuals, got {len(e)}")
    res = pearson(e[1:], e[:-1])
    return Ar1Diagnostics(rho_hat=res.r, n_pairs=len(e) - 1)


def corr_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise Pearson r between two 2-D arrays (or a 2-D array and a vector).

    Rows with zero variance give NaN.  Each row is reduced on its own, so
    the value for a row does not depend on which other rows are present.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    da = a - a.mean(axis=-1, keepdims=True)
    db = b - b.mean(axis=-1, keepdims=True)
    num = np.sum(da * db, axis=-1)
    den = np.sqrt(np.sum(da * da, axis=-1) * np.sum(db * db, axis=-1))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(den > 0, num / den, np.nan)
    return np.clip(r, -1.0, 1.0)

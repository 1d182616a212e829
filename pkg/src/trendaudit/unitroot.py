"""Augmented Dickey-Fuller unit-root test.

Critical values come from MacKinnon's finite-sample response surfaces,
approximate p-values from MacKinnon's asymptotic tau distribution fits:

    MacKinnon, J.G. (2010) "Critical Values for Cointegration Tests",
        Queen's Economics Department Working Paper 1227, Table 2 (N = 1).
    MacKinnon, J.G. (1994) "Approximate Asymptotic Distribution Functions
        for Unit-Root and Cointegration Tests", JBES 12(2), 167-176.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import ConstantSeries, PreconditionError, TooShort
from .series import TimeSeries

Deterministic = Literal["none", "constant", "constant_trend"]

LEVELS = ("1%", "5%", "10%")

# cv(T) = b0 + b1/T + b2/T**2 + b3/T**3, one row per level in LEVELS
_CRIT_COEFS = {
    "none": ((-2.56574, -2.2358, -3.627, 0.0),
             (-1.94100, -0.2686, -3.365, 31.223),
             (-1.61682, 0.2656, -2.714, 25.364)),
    "constant": ((-3.43035, -6.5393, -16.786, -79.433),
                 (-2.86154, -2.8903, -4.234, -40.040),
                 (-2.56677, -1.5384, -2.809, 0.0)),
    "constant_trend": ((-3.95877, -9.0531, -28.428, -134.155),
                       (-3.41049, -4.3904, -9.036, -45.374),
                       (-3.12705, -2.5856, -3.925, -22.380)),
}

# p = Phi(poly(tau)); small-p fit below tau_star, large-p fit above.
# Coefficients are in ascending powers with the published scalings applied.
_PVAL = {
    "none": dict(tau_min=-19.04, tau_star=-1.04, tau_max=math.inf,
                 small=(0.6344, 1.2378, 3.2496e-2),
                 large=(0.4797, 9.3557e-1, -0.6999e-1, 3.3066e-2)),
    "constant": dict(tau_min=-18.83, tau_star=-1.61, tau_max=2.74,
                     small=(2.1659, 1.4412, 3.8269e-2),
                     large=(1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2)),
    "constant_trend": dict(tau_min=-16.18, tau_star=-2.89, tau_max=0.7,
                           small=(3.2512, 1.6047, 4.9588e-2),
                           large=(2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2)),
}

P_FLOOR, P_CEIL = 0.001, 0.999


def critical_values(nobs: int, deterministic: Deterministic = "constant") -> dict[str, float]:
    """Finite-sample Dickey-Fuller critical values for `nobs` regression rows."""
    coefs = _CRIT_COEFS[deterministic]
    inv = 1.0 / nobs
    return {lvl: b0 + b1 * inv + b2 * inv ** 2 + b3 * inv ** 3
            for lvl, (b0, b1, b2, b3) in zip(LEVELS, coefs)}


def _norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def approx_pvalue(stat: float, deterministic: Deterministic = "constant") -> float:
    """Approximate (asymptotic) p-value, clamped to [0.001, 0.999]."""
    spec = _PVAL[deterministic]
    if stat < spec["tau_min"]:
        p = 0.0
    elif stat > spec["tau_max"]:
        p = 1.0
    else:
        coefs = spec["small"] if stat <= spec["tau_star"] else spec["large"]
        p = _norm_cdf(sum(c * stat ** k for k, c in enumerate(coefs)))
    return min(P_CEIL, max(P_FLOOR, p))


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    lags: int
    deterministic: str
    n_effective: int
    critical_values: dict = field(default_factory=dict)
    reject_at_5pct: bool = False
    approx_p: float | None = None

    @property
    def verdict(self) -> str:
        return "reject unit root" if self.reject_at_5pct else "fail to reject"


def adf_design(y: np.ndarray, lags: int, deterministic: Deterministic):
    """Response vector and regressor matrix of the ADF regression.

    Column 0 is the lagged level; lagged differences follow, then the
    deterministic terms.
    """
    dy = np.diff(y)
    n_eff = len(dy) - lags
    cols = [y[lags:-1]]
    for j in range(1, lags + 1):
        cols.append(dy[lags - j:len(dy) - j])
    if deterministic in ("constant", "constant_trend"):
        cols.append(np.ones(n_eff))
    if deterministic == "constant_trend":
        cols.append(np.arange(1.0, n_eff + 1.0))
    return dy[lags:], np.column_stack(cols)


def adf_test(s: TimeSeries | np.ndarray, lags: int = 1,
             deterministic: Deterministic = "constant") -> AdfResult:
    """Augmented Dickey-Fuller test with a fixed lag order.

    Fits ``dy_t = [a + d*t] + g*y_{t-1} + sum_j f_j*dy_{t-j} + u_t`` by least
    squares and returns the t-ratio on ``g``.  The null of a unit root is
    rejected at 5% only when the statistic is strictly below the 5%
    critical value.

    Parameters
    ----------
    s : TimeSeries or array_like
        Series to test; at least ``lags + 10`` observations.
    lags : int
        Number of lagged differences.
    deterministic : {"none", "constant", "constant_trend"}
    """
    y = np.asarray(getattr(s, "values", s), dtype=float)
    if deterministic not in _CRIT_COEFS:
        raise ValueError(f"unknown deterministic spec {deterministic!r}")
    if lags < 0:
        raise ValueError("lags must be non-negative")
    if len(y) < lags + 10:
        raise TooShort(f"ADF with {lags} lags needs at least {lags + 10} "
                       f"observations, got {len(y)}")
    if np.ptp(y) == 0:
        raise ConstantSeries("ADF regression is degenerate for a constant series")

    resp, X = adf_design(y, lags, deterministic)
    n_eff, k = X.shape
    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-10 * diag.max():
        raise PreconditionError("ADF regressors are collinear")
    beta = np.linalg.solve(r, q.T @ resp)
    resid = resp - X @ beta
    sigma2 = float(resid @ resid) / (n_eff - k)
    r_inv = np.linalg.solve(r, np.eye(k))
    var_gamma = sigma2 * float(r_inv[0] @ r_inv[0])
    if var_gamma <= 0:
        raise PreconditionError("ADF regression fits the data exactly")
    stat = float(beta[0] / math.sqrt(var_gamma))

    cvs = critical_values(n_eff, deterministic)
    return AdfResult(
        statistic=stat,
        lags=lags,
        deterministic=deterministic,
        n_effective=n_eff,
        critical_values=cvs,
        reject_at_5pct=stat < cvs["5%"],
        approx_p=approx_pvalue(stat, deterministic),
    )

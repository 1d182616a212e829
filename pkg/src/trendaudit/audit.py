"""Spurious-correlation audit of a pair of annual series.

The pipeline tests both series for a unit root, correlates them in levels
and in first differences, checks the level regression's residuals for
lag-1 autocorrelation and, optionally, calibrates the level correlation
against random walks with drift.  A verdict summarises the outcome.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from . import __version__
from .errors import DataError, DuplicateTime, MissingColumn, NoRows, OverlapTooShort, PreconditionError
from .montecarlo import RNG_NAME, MonteCarloSummary, WalkParams, run_monte_carlo
from .series import TimeSeries, align, difference
from .stats import Ar1Diagnostics, CorrelationResult, OlsFit, ols_simple, pearson, residual_lag1_corr
from .unitroot import AdfResult, adf_test

_MISSING = {"", ".", "na", "nan", "null", "none", "n/a"}


def parse_series_csv(source, time_column: str = "time", value_column: str = "value",
                     label: str | None = None) -> tuple[TimeSeries, int]:
    """Read one series from a CSV file; return it with the number of dropped rows.

    `source` is a path or an open text stream.  Rows whose value is empty,
    a missing-value marker or non-finite are dropped.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8-sig") as fh:
            return parse_series_csv(fh, time_column, value_column,
                                    label if label is not None else value_column)
    reader = csv.DictReader(source)
    if reader.fieldnames is None:
        raise NoRows("CSV input is empty")
    fields = [f.strip() for f in reader.fieldnames]
    reader.fieldnames = fields
    for col in (time_column, value_column):
        if col not in fields:
            raise MissingColumn(f"column {col!r} not found (have {', '.join(fields)})")

    times, values, dropped, seen = [], [], 0, set()
    for lineno, row in enumerate(reader, 2):
        t_raw = (row.get(time_column) or "").strip()
        v_raw = (row.get(value_column) or "").strip()
        if not t_raw and not v_raw:
            continue
        try:
            t_f = float(t_raw)
            if not t_f.is_integer():
                raise ValueError
            t = int(t_f)
        except ValueError:
            raise DataError(f"line {lineno}: time {t_raw!r} is not an integer") from None
        if t in seen:
            raise DuplicateTime(t)
        seen.add(t)
        if v_raw.lower() in _MISSING:
            dropped += 1
            continue
        try:
            v = float(v_raw)
        except ValueError:
            raise DataError(f"line {lineno}: value {v_raw!r} is not a number") from None
        if not math.isfinite(v):
            dropped += 1
            continue
        times.append(t)
        values.append(v)
    if not times:
        raise NoRows(f"no usable rows for column {value_column!r}")
    order = np.argsort(times, kind="stable")
    series = TimeSeries(np.asarray(times)[order], np.asarray(values)[order],
                        label if label is not None else value_column)
    return series, dropped


def read_series_csv(source, time_column: str = "time", value_column: str = "value",
                    label: str | None = None) -> TimeSeries:
    return parse_series_csv(source, time_column, value_column, label)[0]


class Verdict(str, Enum):
    SPURIOUS_RISK = "SPURIOUS_RISK"
    CHANGES_CONSISTENT = "CHANGES_CONSISTENT"
    LEVELS_ONLY_STATIONARY = "LEVELS_ONLY_STATIONARY"
    INCONCLUSIVE = "INCONCLUSIVE"


def _adf_line(name: str, res: AdfResult) -> str:
    return (f"ADF levels {name}: {res.verdict} (stat {res.statistic:.3f} vs 5% "
            f"critical {res.critical_values['5%']:.3f}, lags {res.lags}, "
            f"{res.deterministic})")


def derive_verdict(adf_a: AdfResult, adf_b: AdfResult, corr_levels: CorrelationResult,
                   corr_changes: CorrelationResult, alpha: float = 0.05,
                   labels: tuple[str, str] = ("a", "b")) -> tuple[Verdict, list[str]]:
    """Classify the pair; uses only quantities symmetric in the two series.

    Rules, first match wins:

    * both levels keep their unit root, levels significantly correlated,
      changes not: ``SPURIOUS_RISK``
    * changes significantly correlated: ``CHANGES_CONSISTENT``
    * both levels reject the unit root: ``LEVELS_ONLY_STATIONARY``
    * otherwise ``INCONCLUSIVE``
    """
    lev_sig = corr_levels.p_two_sided < alpha
    chg_sig = corr_changes.p_two_sided < alpha
    both_unit_root = not adf_a.reject_at_5pct and not adf_b.reject_at_5pct
    both_stationary = adf_a.reject_at_5pct and adf_b.reject_at_5pct

    lines = [_adf_line(labels[0], adf_a), _adf_line(labels[1], adf_b),
             f"levels: r = {corr_levels.r:.3f}, p = {corr_levels.p_two_sided:.4g} "
             f"({'significant' if lev_sig else 'not significant'} at {alpha:g})",
             f"changes: r = {corr_changes.r:.3f}, p = {corr_changes.p_two_sided:.4g} "
             f"({'significant' if chg_sig else 'not significant'} at {alpha:g})"]
    if both_unit_root and lev_sig and not chg_sig:
        v = Verdict.SPURIOUS_RISK
        lines.append("both series behave like unit-root processes and the level "
                     "correlation vanishes in changes; treat it as spurious")
    elif chg_sig:
        v = Verdict.CHANGES_CONSISTENT
        lines.append("period-to-period changes co-move; the association is "
                     "not just a shared trend")
    elif both_stationary:
        v = Verdict.LEVELS_ONLY_STATIONARY
        lines.append("both level series reject a unit root; the level "
                     "correlation can be read directly")
    else:
        v = Verdict.INCONCLUSIVE
        lines.append("mixed unit-root evidence; no rule applies")
    return v, lines


@dataclass(frozen=True)
class AuditConfig:
    alpha: float = 0.05
    lags: int = 1
    deterministic: str = "constant"
    min_overlap: int = 20
    walks: int = 0
    seed: int = 0
    drift_min: float = 0.02
    drift_max: float = 0.2
    bins: int = 40
    threads: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.lags < 0 or self.walks < 0 or self.bins < 1 or self.min_overlap < 3:
            raise ValueError("lags and walks must be >= 0, bins >= 1, min_overlap >= 3")

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("threads")
        d["rng"] = RNG_NAME
        d["version"] = __version__
        return d


@dataclass(frozen=True, eq=False)
class AuditReport:
    inputs: dict
    adf: dict
    corr_levels: CorrelationResult
    corr_changes: CorrelationResult
    ols_levels: OlsFit
    resid_diag: Ar1Diagnostics
    verdict: Verdict
    rationale: tuple
    config: AuditConfig
    mc: MonteCarloSummary | None = None


def _safe_adf(s: TimeSeries, cfg: AuditConfig):
    try:
        return adf_test(s, cfg.lags, cfg.deterministic)
    except PreconditionError as exc:
        return exc


def audit(a: TimeSeries, b: TimeSeries, config: AuditConfig | None = None) -> AuditReport:
    """Run the full audit of `a` against `b`.

    `b` doubles as the Monte Carlo target when ``config.walks > 0``.

    Raises
    ------
    OverlapTooShort
        If fewer than ``config.min_overlap`` time stamps are shared.
    """
    cfg = config or AuditConfig()
    pair = align(a, b)
    if len(pair) < max(cfg.min_overlap, 3):
        raise OverlapTooShort(f"{len(pair)} common observations, need {cfg.min_overlap}")
    sa, sb = pair.a, pair.b
    da, db = difference(sa), difference(sb)

    adf = {
        "a_levels": adf_test(sa, cfg.lags, cfg.deterministic),
        "b_levels": adf_test(sb, cfg.lags, cfg.deterministic),
        "a_changes": _safe_adf(da, cfg),
        "b_changes": _safe_adf(db, cfg),
    }
    corr_levels = pearson(sa.values, sb.values, "levels")
    corr_changes = pearson(da.values, db.values, "changes")
    fit = ols_simple(sa.values, sb.values)
    resid = residual_lag1_corr(fit)

    mc = None
    if cfg.walks > 0:
        params = WalkParams(length=len(sb), drift_min=cfg.drift_min,
                            drift_max=cfg.drift_max, start=sb.start)
        mc = run_monte_carlo(sb, cfg.walks, params, cfg.seed, cfg.threads, cfg.bins)

    labels = (a.label or "a", b.label or "b")
    verdict, lines = derive_verdict(adf["a_levels"], adf["b_levels"], corr_levels,
                                    corr_changes, cfg.alpha, labels)
    inputs = {
        "a": {"label": labels[0], "start": a.start, "end": a.end, "n": len(a),
              "dropped_by_alignment": pair.dropped_a},
        "b": {"label": labels[1], "start": b.start, "end": b.end, "n": len(b),
              "dropped_by_alignment": pair.dropped_b},
        "overlap": {"start": int(pair.times[0]), "end": int(pair.times[-1]),
                    "n": len(pair), "gaps": da.gaps},
    }
    return AuditReport(inputs, adf, corr_levels, corr_changes, fit, resid,
                       verdict, tuple(lines), cfg, mc)

"""Detect spurious correlations between trending annual time series."""

__version__ = "0.1.0"

from .errors import DataError, PreconditionError, TrendAuditError
from .series import AlignedPair, TimeSeries, align, detrend_linear, difference, moving_average
from .stats import (Ar1Diagnostics, CorrelationResult, OlsFit, ols_simple, pearson,
                    residual_lag1_corr, student_t_sf)
from .unitroot import AdfResult, adf_test
from .montecarlo import (Histogram, MonteCarloSummary, WalkParams, gen_random_walk,
                         histogram, run_monte_carlo)
from .lexdiv import (TtrPoint, YearCountTable, ingest_ngram_counts, sample_distinct_types,
                     ttr_series)
from .audit import AuditConfig, AuditReport, Verdict, audit, read_series_csv
from .report import write_report

__all__ = [
    "AdfResult", "AlignedPair", "Ar1Diagnostics", "AuditConfig", "AuditReport",
    "CorrelationResult", "DataError", "Histogram", "MonteCarloSummary", "OlsFit",
    "PreconditionError", "TimeSeries", "TrendAuditError", "TtrPoint", "Verdict",
    "WalkParams", "YearCountTable", "adf_test", "align", "audit", "detrend_linear",
    "difference", "gen_random_walk", "histogram", "ingest_ngram_counts",
    "moving_average", "ols_simple", "pearson", "read_series_csv",
    "residual_lag1_corr", "run_monte_carlo", "sample_distinct_types",
    "student_t_sf", "ttr_series", "write_report",
]

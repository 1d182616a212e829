import os
from pathlib import Path

import numpy as np
import pytest

from trendaudit import TimeSeries, read_series_csv

ROOT = Path(__file__).resolve().parent.parent
REPLICATION_CSV = Path(os.environ.get("TRENDAUDIT_REPLICATION_CSV",
                                      ROOT / "data" / "replication.csv"))

# 20th-century GMSL trend of the Hay et al. (2015) reconstruction, mm/yr
SEA_LEVEL_SLOPE = 1.2
SEA_LEVEL_JITTER = 1.0


def synthetic_sea_level(seed: int = 20150114) -> TimeSeries:
    """Linear 1900-2000 trend with a little white jitter so changes vary."""
    years = np.arange(1900, 2001)
    rng = np.random.default_rng(seed)
    vals = SEA_LEVEL_SLOPE * (years - 1900) + SEA_LEVEL_JITTER * rng.standard_normal(len(years))
    return TimeSeries(years, vals, "synthetic sea level")


def replication_series(column: str) -> TimeSeries:
    if not REPLICATION_CSV.exists():
        pytest.skip(f"replication dataset not bundled ({REPLICATION_CSV} absent); "
                    "replication-data checks skipped")
    return read_series_csv(REPLICATION_CSV, "year", column)


def replication_columns() -> list[str]:
    if not REPLICATION_CSV.exists():
        return []
    with open(REPLICATION_CSV, encoding="utf-8-sig") as fh:
        return [c.strip() for c in fh.readline().split(",")]


@pytest.fixture(scope="session")
def sea_level_target():
    """Bundled sea-level series when present, else the synthetic stand-in."""
    if REPLICATION_CSV.exists() and "sea_level" in replication_columns():
        return read_series_csv(REPLICATION_CSV, "year", "sea_level"), True
    return synthetic_sea_level(), False


def write_series_csv(path, series, time_col="time", value_col="value") -> str:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{time_col},{value_col}\n")
        for t, v in zip(series.times, series.values):
            fh.write(f"{int(t)},{float(v)!r}\n")
    return str(path)


_acceptance = []


def pytest_runtest_logreport(report):
    if "acceptance" not in report.keywords:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome.upper()))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        label = {"PASSED": "PASS", "FAILED": "FAIL", "SKIPPED": "SKIP"}.get(outcome, outcome)
        terminalreporter.write_line(f"[{label}] {name}")

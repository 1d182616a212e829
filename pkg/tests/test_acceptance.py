"""Acceptance criteria, one test per criterion (criterion 8 has two parts).

Run with ``pytest tests/test_acceptance.py``; a PASS/FAIL/SKIP line per
criterion is printed in the terminal summary.
"""
import json
import math
import os
import subprocess
import sys
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from trendaudit import (AuditConfig, Verdict, WalkParams, adf_test, audit, difference,
                        gen_random_walk, ols_simple, pearson, run_monte_carlo,
                        sample_distinct_types, student_t_sf)
from trendaudit.montecarlo import substream

from conftest import replication_series, write_series_csv

pytestmark = pytest.mark.acceptance


@pytest.fixture(scope="module")
def ensemble(sea_level_target):
    target, is_real = sea_level_target
    t0 = time.perf_counter()
    mc = run_monte_carlo(target, 10_000, master_seed=1, threads=1)
    return mc, time.perf_counter() - t0, is_real


def test_c1_walk_correlation_shares(ensemble):
    mc, elapsed, is_real = ensemble
    assert len(mc.level_corrs) == 10_000 and mc.n_excluded == 0
    lo30, hi30 = (0.70, 0.80) if is_real else (0.65, 0.95)
    lo75, hi75 = (0.49, 0.60) if is_real else (0.49, 0.95)
    assert lo30 <= mc.share_above(0.30) <= hi30
    assert lo75 <= mc.share_above(0.75) <= hi75
    assert 0.47 <= mc.level_corrs.mean() <= 0.57
    assert abs(mc.change_corrs.mean()) <= 0.02
    assert np.abs(mc.change_corrs).max() <= 0.45
    assert elapsed <= 10.0


def test_c2_walk_residual_autocorrelation(ensemble):
    mc, _, _ = ensemble
    assert 0.85 <= mc.level_resid_rho.mean() <= 0.95
    assert -0.05 <= mc.change_resid_rho.mean() <= 0.05


def test_c3_adf_size_and_power():
    t0 = time.perf_counter()
    size = np.mean([adf_test(np.cumsum(substream(31, i).standard_normal(100))).reject_at_5pct
                    for i in range(1000)])
    power = np.mean([adf_test(substream(32, i).standard_normal(100)).reject_at_5pct
                     for i in range(1000)])
    elapsed = time.perf_counter() - t0
    assert 0.02 <= size <= 0.08
    assert power >= 0.95
    assert elapsed <= 20.0


TTR_TRENDING = ("us", "gb", "fr", "de", "it", "es")
COUNTRIES = ("us", "gb", "cn", "fr", "de", "it", "ru", "es")


def test_c4_replication_dataset_checks():
    sea = replication_series("sea_level")  # skips when the dataset is not bundled
    assert not adf_test(sea).reject_at_5pct
    for c in COUNTRIES:
        assert not adf_test(replication_series(f"pop_{c}")).reject_at_5pct, c
    for c in TTR_TRENDING:
        assert not adf_test(replication_series(f"ttr_{c}")).reject_at_5pct, c
    for c in ("cn", "ru"):
        assert adf_test(replication_series(f"ttr_{c}")).reject_at_5pct, c

    es = audit(replication_series("ttr_es"), replication_series("pop_es"))
    assert 0.64 <= es.corr_levels.r ** 2 <= 0.74
    de = audit(replication_series("ttr_de"), replication_series("pop_cn"))
    assert 0.84 <= de.corr_levels.r <= 0.94
    assert abs(de.corr_changes.r) <= 0.15 and de.corr_changes.p_two_sided >= 0.20


SAMPLER_FIXTURES = [
    ([1], 1),
    ([5, 5], 3),
    ([4, 3, 2, 1], 5),
    ([1] * 20, 7),
    ([9000, 500, 300, 100, 50, 30, 10, 5, 3, 2], 200),
    (list(range(1, 21)), 60),
    ([499] * 20, 9000),
    ([2, 2, 2, 2, 2000, 1, 1, 1], 1500),
]


def exact_distinct(counts, s):
    """E[# distinct] = sum_i P(type i drawn), each term by the complement rule."""
    n = sum(counts)
    denom = math.comb(n, s)
    return sum(1 - Fraction(math.comb(n - c, s), denom) for c in counts)


def test_c5_sampler_exactness():
    t0 = time.perf_counter()
    for k, (counts, s) in enumerate(SAMPLER_FIXTURES):
        assert len(counts) <= 20 and sum(counts) <= 10_000
        rng = substream(55, k)
        draws = np.array([sample_distinct_types(counts, s, rng) for _ in range(10_000)])
        expected = float(exact_distinct(counts, s))
        se = draws.std(ddof=1) / math.sqrt(len(draws))
        if se == 0:
            assert draws.mean() == expected, counts
        else:
            assert abs(draws.mean() - expected) <= 3 * se, (counts, draws.mean(), expected)
    assert time.perf_counter() - t0 <= 30.0


def _mp_pearson(x, y):
    with mpmath.workdps(50):
        xs, ys = [mpmath.mpf(v) for v in x], [mpmath.mpf(v) for v in y]
        mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
        sxy = sum((a - mx) * (b - my) for a, b in zip(xs, ys))
        sxx = sum((a - mx) ** 2 for a in xs)
        syy = sum((b - my) ** 2 for b in ys)
        return float(sxy / mpmath.sqrt(sxx * syy))


def _exact_ols(y, x):
    xs, ys = [Fraction(v) for v in x], [Fraction(v) for v in y]
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    b1 = sum((a - mx) * (b - my) for a, b in zip(xs, ys)) / sum((a - mx) ** 2 for a in xs)
    return float(my - b1 * mx), float(b1)


def _mp_t_sf(t, df):
    with mpmath.workdps(40):
        t, nu = mpmath.mpf(t), mpmath.mpf(df)
        tail = mpmath.betainc(nu / 2, mpmath.mpf(1) / 2, 0, nu / (nu + t * t), regularized=True) / 2
        return float(tail if t >= 0 else 1 - tail)


def test_c6_kernel_oracles():
    rng = np.random.default_rng(6)
    worst = {"pearson": 0.0, "ols": 0.0, "t_sf": 0.0}
    for _ in range(1000):
        n = int(rng.integers(3, 30))
        x = np.round(rng.normal(0, 10, n), 6)
        y = np.round(0.7 * x + rng.normal(0, 10, n), 6)
        if np.ptp(x) == 0 or np.ptp(y) == 0:
            continue
        worst["pearson"] = max(worst["pearson"], abs(pearson(x, y).r - _mp_pearson(x, y)))
        fit = ols_simple(y, x)
        b0, b1 = _exact_ols(y, x)
        worst["ols"] = max(worst["ols"], abs(fit.beta0 - b0), abs(fit.beta1 - b1))
        t = float(rng.normal(0, 3)) * (10 if rng.random() < 0.1 else 1)
        df = int(rng.integers(1, 300))
        worst["t_sf"] = max(worst["t_sf"], abs(student_t_sf(t, df) - _mp_t_sf(t, df)))
    assert worst["pearson"] <= 1e-9, worst
    assert worst["ols"] <= 1e-9, worst
    assert worst["t_sf"] <= 1e-10, worst


def test_c7_determinism_across_threads(tmp_path):
    wp = WalkParams(length=101, start=1900)
    a = write_series_csv(tmp_path / "a.csv", gen_random_walk(wp, 0, 2024))
    b = write_series_csv(tmp_path / "b.csv", gen_random_walk(wp, 1, 2024))
    outputs = []
    for threads in ("1", "8", "1", "8"):
        env = dict(os.environ, TRENDAUDIT_THREADS=threads)
        proc = subprocess.run(
            [sys.executable, "-m", "trendaudit", "audit", "--a", a, "--b", b,
             "--walks", "3000", "--seed", "12"],
            env=env, capture_output=True, check=True)
        outputs.append(proc.stdout)
    assert all(o == outputs[0] for o in outputs)
    assert json.loads(outputs[0])["monte_carlo"]["n_walks"] == 3000


VERDICT_WALK = WalkParams(length=101, start=1900)


def test_c8a_verdict_independent_walks_spurious():
    hits = 0
    for k in range(500):
        a = gen_random_walk(VERDICT_WALK, 0, 80_000 + k)
        b = gen_random_walk(VERDICT_WALK, 1, 80_000 + k)
        hits += audit(a, b).verdict is Verdict.SPURIOUS_RISK
    assert hits / 500 >= 0.80, f"SPURIOUS_RISK in {hits}/500 pairs"


def test_c8b_verdict_shared_increments_consistent():
    hits = 0
    for k in range(500):
        b = gen_random_walk(VERDICT_WALK, 0, 90_000 + k)
        a = b.with_values(b.values + 0.1 * substream(95_000 + k, 0).standard_normal(101))
        hits += audit(a, b).verdict is Verdict.CHANGES_CONSISTENT
    assert hits / 500 >= 0.95, f"CHANGES_CONSISTENT in {hits}/500 seeds"

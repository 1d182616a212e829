"""Random walks with drift and the spurious-correlation Monte Carlo.

Every walk draws from its own PCG64 stream keyed by ``(master_seed,
walk_index)``, and per-walk statistics are computed row by row, so the
ensemble is identical whatever the chunking or thread count.
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstantInput, DegenerateRange, LengthMismatch
from .series import TimeSeries
from .stats import corr_rows

RNG_NAME = "numpy-PCG64/SeedSequence(master_seed, spawn_key=(index,))"
THREADS_ENV = "TRENDAUDIT_THREADS"
CHUNK = 256


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else CPU count, capped by $TRENDAUDIT_THREADS."""
    n = threads or os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, n)


def substream(master_seed: int, key: int) -> np.random.Generator:
    """Independent generator for one unit of work (a walk, a year)."""
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(master_seed, spawn_key=(key,))))


@dataclass(frozen=True)
class WalkParams:
    length: int
    drift_min: float = 0.02
    drift_max: float = 0.2
    x0: float = 0.0
    noise_scale: float = 1.0  # test hook; 0 gives a deterministic ramp
    start: int = 0

    def __post_init__(self):
        if not 0 < self.drift_min < self.drift_max:
            raise ValueError("need 0 < drift_min < drift_max, got "
                             f"[{self.drift_min}, {self.drift_max})")
        if self.length < 2:
            raise ValueError(f"walk length must be >= 2, got {self.length}")
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be non-negative")


def _walk_values(params: WalkParams, rng: np.random.Generator,
                 drift: float | None = None) -> np.ndarray:
    d = rng.uniform(params.drift_min, params.drift_max) if drift is None else drift
    e = rng.standard_normal(params.length - 1) * params.noise_scale
    # x_t = x_{t-1} + d + e_t, unrolled so the noise-free case is exact
    steps = np.arange(params.length, dtype=float)
    return params.x0 + d * steps + np.concatenate(([0.0], np.cumsum(e)))


def gen_random_walk(params: WalkParams, walk_index: int, master_seed: int,
                    drift: float | None = None) -> TimeSeries:
    """One random walk with drift, ``x_t = d + x_{t-1} + e_t``.

    The drift is uniform on ``[drift_min, drift_max)`` and ``e_t`` is
    standard normal, both drawn from the walk's own sub-stream.  Passing
    `drift` fixes the drift instead of drawing it.
    """
    if walk_index < 0:
        raise ValueError("walk_index must be non-negative")
    vals = _walk_values(params, substream(master_seed, walk_index), drift)
    return TimeSeries.from_values(vals, params.start, f"walk[{walk_index}]")


@dataclass(frozen=True, eq=False)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    overlay: np.ndarray | None = None
    degenerate: bool = False

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def to_dict(self) -> dict:
        d = {"edges": self.edges.tolist(), "counts": self.counts.tolist()}
        if self.overlay is not None:
            d["overlay"] = self.overlay.tolist()
        return d


def histogram(values, n_bins: int = 40, with_normal_overlay: bool = True) -> Histogram:
    """Equal-width histogram over ``[min, max]``, last bin closed on the right.

    The optional overlay is the normal density with the sample mean and
    standard deviation, evaluated at the bin centres and scaled by
    ``n * bin_width`` so it is comparable to the counts.  Zero-range input
    yields a single unit-width bin holding everything and a
    :class:`DegenerateRange` warning.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("cannot build a histogram of no values")
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    lo, hi = float(v.min()), float(v.max())
    if lo == hi:
        warnings.warn(f"all {v.size} values equal {lo}; using a single bin",
                      DegenerateRange, stacklevel=2)
        edges = np.array([lo - 0.5, lo + 0.5])
        return Histogram(edges, np.array([v.size]), None, degenerate=True)
    counts, edges = np.histogram(v, bins=n_bins, range=(lo, hi))
    overlay = None
    if with_normal_overlay:
        mu, sd = v.mean(), v.std(ddof=1) if v.size > 1 else 0.0
        if sd > 0:
            c = 0.5 * (edges[:-1] + edges[1:])
            width = edges[1] - edges[0]
            dens = np.exp(-0.5 * ((c - mu) / sd) ** 2) / (sd * math.sqrt(2 * math.pi))
            overlay = dens * v.size * width
    return Histogram(edges, counts, overlay)


VECTORS = ("level_corrs", "change_corrs", "level_resid_rho", "change_resid_rho")


@dataclass(frozen=True, eq=False)
class MonteCarloSummary:
    n_walks: int
    level_corrs: np.ndarray
    change_corrs: np.ndarray
    level_resid_rho: np.ndarray
    change_resid_rho: np.ndarray
    seed: int
    params: WalkParams
    n_excluded: int = 0
    rng_name: str = RNG_NAME
    n_bins: int = 40
    histograms: dict = field(default_factory=dict)

    def share_above(self, threshold: float, vector: str = "level_corrs") -> float:
        v = getattr(self, vector)
        return float(np.mean(v > threshold)) if v.size else math.nan

    def stats(self, vector: str) -> dict:
        v = getattr(self, vector)
        return {
            "mean": float(v.mean()),
            "sd": float(v.std(ddof=1)) if v.size > 1 else math.nan,
            "min": float(v.min()),
            "max": float(v.max()),
            "max_abs": float(np.abs(v).max()),
        }

    def digest(self, thresholds=(0.30, 0.75)) -> dict:
        """Plot-ready summary without the raw per-walk vectors."""
        out = {
            "n_walks": self.n_walks,
            "n_excluded": self.n_excluded,
            "seed": self.seed,
            "rng": self.rng_name,
            "drift_range": [self.params.drift_min, self.params.drift_max],
            "length": self.params.length,
        }
        for name in VECTORS:
            entry = self.stats(name)
            entry["share_above"] = {f"{t:.2f}": self.share_above(t, name)
                                    for t in thresholds}
            entry["histogram"] = self.histograms[name].to_dict()
            out[name] = entry
        return out


def _chunk_stats(lo: int, hi: int, params: WalkParams, seed: int,
                 target: np.ndarray) -> np.ndarray:
    walks = np.empty((hi - lo, params.length))
    for row, i in enumerate(range(lo, hi)):
        walks[row] = _walk_values(params, substream(seed, i))
    dwalks = np.diff(walks, axis=1)
    dtarget = np.diff(target)

    out = np.empty((hi - lo, 4))
    out[:, 0] = corr_rows(walks, target)
    out[:, 1] = corr_rows(dwalks, dtarget)
    out[:, 2] = _resid_rho_rows(walks, target)
    out[:, 3] = _resid_rho_rows(dwalks, dtarget)
    return out


def _resid_rho_rows(ys: np.ndarray, x: np.ndarray) -> np.ndarray:
    # residuals of each row regressed on x (with intercept), then lag-1 r
    xc = x - x.mean()
    yc = ys - ys.mean(axis=1, keepdims=True)
    slope = np.sum(yc * xc, axis=1, keepdims=True) / np.sum(xc * xc)
    resid = yc - slope * xc
    return corr_rows(resid[:, 1:], resid[:, :-1])


def run_monte_carlo(target: TimeSeries | np.ndarray, n_walks: int = 10_000,
                    params: WalkParams | None = None, master_seed: int = 0,
                    threads: int | None = None, n_bins: int = 40) -> MonteCarloSummary:
    """Correlate `n_walks` random walks with drift against `target`.

    For every walk this records the level correlation, the correlation of
    first differences, and the lag-1 residual correlation of the walk
    regressed on the target, both in levels and in differences.  Walks
    whose statistics are undefined are dropped and counted in
    ``n_excluded``.

    Parameters
    ----------
    target : TimeSeries or array_like
        Series every walk is compared with; its length fixes the walk length.
    n_walks : int
    params : WalkParams, optional
        Defaults to ``WalkParams(length=len(target))``.
    master_seed : int
    threads : int, optional
        Worker threads; the result does not depend on it.
    n_bins : int
        Bins for the stored histograms.
    """
    y = np.asarray(getattr(target, "values", target), dtype=float)
    if params is None:
        params = WalkParams(length=len(y))
    if params.length != len(y):
        raise LengthMismatch(f"walk length {params.length} != target length {len(y)}")
    if n_walks < 1:
        raise ValueError("n_walks must be >= 1")
    if np.ptp(y) == 0 or np.ptp(np.diff(y)) == 0:
        raise ConstantInput("target levels or changes are constant; "
                            "correlations with it are undefined")

    bounds = [(lo, min(lo + CHUNK, n_walks)) for lo in range(0, n_walks, CHUNK)]
    workers = min(resolve_threads(threads), len(bounds))
    if workers == 1:
        parts = [_chunk_stats(lo, hi, params, master_seed, y) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _chunk_stats(*b, params, master_seed, y),
                                  bounds))
    table = np.concatenate(parts)
    ok = np.all(np.isfinite(table), axis=1)
    table = table[ok]

    vectors = {name: np.ascontiguousarray(table[:, k]) for k, name in enumerate(VECTORS)}
    for v in vectors.values():
        v.setflags(write=False)
    hists = {}
    if table.shape[0]:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateRange)
            hists = {name: histogram(v, n_bins, True) for name, v in vectors.items()}
    return MonteCarloSummary(
        n_walks=n_walks,
        seed=master_seed,
        params=params,
        n_excluded=int((~ok).sum()),
        n_bins=n_bins,
        histograms=hists,
        **vectors,
    )

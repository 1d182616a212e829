"""Type-token ratios from Google Books style 1-gram count files.

Input rows are ``token<TAB>year<TAB>match_count<TAB>volume_count``.  Per
year the TTR is computed on a fixed-size random sample of tokens drawn
without replacement; the sample is drawn from the count table directly,
one conditional hypergeometric draw per type, so no token list is ever
built.
"""
from __future__ import annotations

import logging
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import MalformedLine, NoEligibleYears, SampleTooLarge
from .montecarlo import resolve_threads, substream
from .series import TimeSeries

log = logging.getLogger(__name__)

DEFAULT_SAMPLE = 1_000_000


@dataclass
class YearCountTable:
    """Per-year token counts plus the bookkeeping of what ingestion dropped."""

    counts: dict[int, dict[str, int]] = field(default_factory=dict)
    rows_parsed: int = 0
    rows_malformed: int = 0
    rows_out_of_range: int = 0
    count_parsed: int = 0
    count_dropped_range: int = 0
    count_dropped_min: int = 0
    entries_dropped_min: int = 0

    @property
    def years(self) -> list[int]:
        return sorted(self.counts)

    def corpus_total(self, year: int) -> int:
        return sum(self.counts.get(year, {}).values())

    def distinct_types(self, year: int) -> int:
        return len(self.counts.get(year, {}))

    @property
    def count_retained(self) -> int:
        return sum(sum(c.values()) for c in self.counts.values())


def ingest_ngram_counts(lines: Iterable[str], min_count: int = 1,
                        year_range: tuple[int, int] | None = None,
                        strict: bool = False) -> YearCountTable:
    """Aggregate 1-gram rows into per-year count tables in one pass.

    Duplicate ``(token, year)`` rows are summed before `min_count` is
    applied.  Malformed lines raise :class:`MalformedLine` when `strict`,
    otherwise they are logged and counted.
    """
    agg: dict[int, dict[str, int]] = defaultdict(lambda: defaultdict(int))
    table = YearCountTable()
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split("\t")
        try:
            if len(parts) != 4:
                raise ValueError(f"expected 4 tab-separated fields, got {len(parts)}")
            token, year_s, match_s, vol_s = parts
            year = int(year_s)
            match = int(match_s)
            volumes = int(vol_s)
            if match < 0 or volumes < 0:
                raise ValueError("negative count")
        except ValueError as exc:
            if strict:
                raise MalformedLine(lineno, line, str(exc)) from None
            table.rows_malformed += 1
            log.warning("skipping line %d: %s", lineno, exc)
            continue
        table.rows_parsed += 1
        table.count_parsed += match
        if year_range is not None and not year_range[0] <= year <= year_range[1]:
            table.rows_out_of_range += 1
            table.count_dropped_range += match
            continue
        agg[year][token] += match

    for year in sorted(agg):
        kept = {}
        for token, c in agg[year].items():
            if c >= max(min_count, 1):
                kept[token] = c
            else:
                table.entries_dropped_min += 1
                table.count_dropped_min += c
        if kept:
            table.counts[year] = kept
    return table


def _count_vector(counts) -> np.ndarray:
    if isinstance(counts, Mapping):
        # sorted keys fix the draw order independently of file order
        return np.array([counts[k] for k in sorted(counts)], dtype=np.int64)
    return np.asarray(counts, dtype=np.int64)


def sample_counts(counts, sample_size: int, rng: np.random.Generator) -> np.ndarray:
    """Per-type counts in a uniform sample drawn without replacement.

    Walks the types in a fixed order; for each one draws how many of its
    tokens land in the sample given the tokens and sample slots still
    unassigned.  The joint result is an exact multivariate hypergeometric
    draw.
    """
    c = _count_vector(counts)
    if c.size == 0:
        raise ValueError("empty count table")
    total = int(c.sum())
    if sample_size > total:
        raise SampleTooLarge(f"sample of {sample_size} from a corpus of {total} tokens")
    if sample_size < 0:
        raise ValueError("sample_size must be non-negative")
    out = np.zeros(c.size, dtype=np.int64)
    remaining_pop = total
    remaining_sample = sample_size
    hyper = rng.hypergeometric
    for i, ci in enumerate(c.tolist()):
        if remaining_sample == 0:
            break
        rest = remaining_pop - ci
        if rest == 0:
            out[i] = remaining_sample
            break
        if remaining_sample == remaining_pop:
            out[i:] = c[i:]
            break
        if ci:
            k = int(hyper(ci, rest, remaining_sample))
            out[i] = k
            remaining_sample -= k
        remaining_pop = rest
    return out


def sample_distinct_types(counts, sample_size: int, rng: np.random.Generator) -> int:
    """Number of distinct types in a random sample of `sample_size` tokens."""
    return int(np.count_nonzero(sample_counts(counts, sample_size, rng)))


def expected_distinct_types(counts, sample_size: int) -> float:
    """Exact expectation of :func:`sample_distinct_types`.

    Each type is missed with probability ``C(N - c, s) / C(N, s)``.
    """
    c = _count_vector(counts).tolist()
    n = sum(c)
    denom = math.comb(n, sample_size)
    return float(sum(1 - Fraction(math.comb(n - ci, sample_size), denom) for ci in c))


@dataclass(frozen=True)
class TtrPoint:
    year: int
    corpus_total: int
    sample_size: int
    sampled_types: int = 0
    ttr: float = math.nan
    skipped: bool = False
    reason: str = ""
    ttr_draws: tuple = ()

    @property
    def ttr_sd(self) -> float:
        if len(self.ttr_draws) < 2:
            return math.nan
        return float(np.std(self.ttr_draws, ddof=1))


def _year_point(year: int, counts: dict, sample_size: int, min_corpus: int,
                seed: int, repeats: int) -> TtrPoint:
    total = sum(counts.values())
    if total < min_corpus or total < sample_size:
        return TtrPoint(year, total, sample_size, skipped=True,
                        reason="insufficient corpus")
    vec = _count_vector(counts)
    rng = substream(seed, year)
    draws = [int(np.count_nonzero(sample_counts(vec, sample_size, rng)))
             for _ in range(repeats)]
    return TtrPoint(year, total, sample_size, draws[0], draws[0] / sample_size,
                    ttr_draws=tuple(d / sample_size for d in draws))


def ttr_series(table: YearCountTable, sample_size: int = DEFAULT_SAMPLE,
               min_corpus: int = DEFAULT_SAMPLE, master_seed: int = 0,
               repeats: int = 1, threads: int | None = None,
               label: str = "ttr") -> tuple[TimeSeries, list[TtrPoint]]:
    """Type-token ratio per year on fixed-size samples.

    Years whose corpus is smaller than `min_corpus` (or than the sample)
    are reported as skipped and left out of the returned series.  Each
    year samples from its own stream keyed by ``(master_seed, year)``.
    With ``repeats > 1`` extra samples are drawn after the first; the
    series still carries the first draw and the rest feed ``ttr_sd``.
    """
    years = table.years
    if not years:
        raise NoEligibleYears("count table is empty")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")

    def work(year):
        return _year_point(year, table.counts[year], sample_size, min_corpus,
                           master_seed, repeats)

    workers = min(resolve_threads(threads), len(years))
    if workers == 1:
        points = [work(y) for y in years]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(work, years))
    kept = [p for p in points if not p.skipped]
    if not kept:
        raise NoEligibleYears(
            f"no year has at least {max(min_corpus, sample_size)} tokens")
    series = TimeSeries([p.year for p in kept], [p.ttr for p in kept], label)
    return series, points

"""Annual time series container and the transforms used before correlating.

All functions return new objects; arrays held by a ``TimeSeries`` are
marked read-only so instances can be shared freely between threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTime, EmptyIntersection, InvalidSeries, TooShort


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Ordered ``(time, value)`` observations on an integer (year) axis.

    Parameters
    ----------
    times : array_like of int
        Strictly increasing time stamps.
    values : array_like of float
        Finite observations, one per time stamp.
    label : str
        Free-text name used in reports.
    gaps : bool
        Set by :func:`difference` when consecutive stamps were more than one
        unit apart, i.e. some changes span several periods.
    """

    times: np.ndarray
    values: np.ndarray
    label: str = ""
    gaps: bool = False

    def __post_init__(self):
        times = np.asarray(self.times)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or values.ndim != 1:
            raise InvalidSeries("times and values must be one-dimensional")
        if len(times) != len(values):
            raise InvalidSeries(
                f"{len(times)} time stamps but {len(values)} values")
        if len(times) == 0:
            raise InvalidSeries("a series needs at least one observation")
        if times.dtype.kind not in "iu":
            as_int = times.astype(np.int64)
            if not np.array_equal(as_int, times):
                raise InvalidSeries("time stamps must be integers")
            times = as_int
        times = times.astype(np.int64)
        if np.any(np.diff(times) <= 0):
            raise InvalidSeries("time stamps must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise InvalidSeries("values must be finite")
        object.__setattr__(self, "times", _frozen(times))
        object.__setattr__(self, "values", _frozen(values))

    def __len__(self):
        return len(self.values)

    def __repr__(self):
        return (f"TimeSeries(label={self.label!r}, n={len(self)}, "
                f"span={self.start}-{self.end})")

    @property
    def start(self) -> int:
        return int(self.times[0])

    @property
    def end(self) -> int:
        return int(self.times[-1])

    @classmethod
    def from_values(cls, values, start: int = 0, label: str = "") -> "TimeSeries":
        """Build a series on consecutive integer stamps beginning at `start`."""
        values = np.asarray(values, dtype=float)
        return cls(np.arange(start, start + len(values)), values, label)

    def with_values(self, values, label: str | None = None) -> "TimeSeries":
        return TimeSeries(self.times, values,
                          self.label if label is None else label, self.gaps)


@dataclass(frozen=True, eq=False)
class AlignedPair:
    times: np.ndarray
    a_values: np.ndarray
    b_values: np.ndarray
    dropped_a: int
    dropped_b: int
    a_label: str = ""
    b_label: str = ""

    def __len__(self):
        return len(self.times)

    @property
    def a(self) -> TimeSeries:
        return TimeSeries(self.times, self.a_values, self.a_label)

    @property
    def b(self) -> TimeSeries:
        return TimeSeries(self.times, self.b_values, self.b_label)


def align(a: TimeSeries, b: TimeSeries) -> AlignedPair:
    """Pair two series on the intersection of their time stamps.

    Raises
    ------
    EmptyIntersection
        If the series share no time stamp.
    """
    common, ia, ib = np.intersect1d(a.times, b.times, assume_unique=True,
                                    return_indices=True)
    if len(common) == 0:
        raise EmptyIntersection(
            f"{a.label or 'a'} ({a.start}-{a.end}) and "
            f"{b.label or 'b'} ({b.start}-{b.end}) share no time stamps")
    return AlignedPair(
        times=_frozen(common),
        a_values=_frozen(a.values[ia]),
        b_values=_frozen(b.values[ib]),
        dropped_a=len(a) - len(common),
        dropped_b=len(b) - len(common),
        a_label=a.label,
        b_label=b.label,
    )


def difference(s: TimeSeries) -> TimeSeries:
    """First differences ``s(t) - s(t_prev)``, stamped at the later time.

    Gaps in the time axis are not rescaled; the result has ``gaps=True``
    instead so callers can decide what to do about multi-period changes.
    """
    if len(s) < 2:
        raise TooShort(f"differencing needs at least 2 observations, got {len(s)}")
    gaps = bool(np.any(np.diff(s.times) != 1))
    return TimeSeries(s.times[1:], np.diff(s.values), s.label, gaps)


def detrend_linear(s: TimeSeries) -> TimeSeries:
    """Residuals from an OLS fit of the values on the time stamps."""
    if len(s) < 3:
        raise TooShort(f"detrending needs at least 3 observations, got {len(s)}")
    t = s.times.astype(float)
    tc = t - t.mean()
    stt = np.sum(tc * tc)
    if stt == 0:
        raise DegenerateTime("all time stamps are equal")
    yc = s.values - s.values.mean()
    slope = np.sum(tc * yc) / stt
    return s.with_values(yc - slope * tc)


def moving_average(s: TimeSeries, window: int = 11) -> TimeSeries:
    """Centred unweighted moving average with shrinking windows at the edges.

    Each output point is the plain mean of the inputs whose index lies
    within ``window // 2`` of it, so the output has the input's length.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be a positive odd integer, got {window}")
    half = window // 2
    n = len(s)
    padded = np.concatenate((np.zeros(half), s.values, np.zeros(half)))
    present = np.concatenate((np.zeros(half), np.ones(n), np.zeros(half)))
    sums = np.zeros(n)
    counts = np.zeros(n)
    for k in range(window):
        sums += padded[k:k + n]
        counts += present[k:k + n]
    # rounding in the sums can push a mean an ulp past the input range
    out = np.clip(sums / counts, s.values.min(), s.values.max())
    return s.with_values(out)

"""Uniformly sampled time series: ingestion, alignment, differencing, subsampling.

All values are immutable after construction; every operation returns new
objects and is safe to share across concurrent tasks.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DtMismatch,
    EmptyFile,
    LengthMismatch,
    MissingColumn,
    NonFiniteValue,
    TooShortAfterSubsample,
)

_MIN_LENGTH = 3  # two aligned difference points + nondegenerate covariance


def _freeze(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """A uniformly sampled scalar series.

    values are in user units, dt is the sampling step in user time units and
    t0 the time of the first sample. t0 and label are carried for window
    selection and reporting only; no estimate depends on them.
    """

    values: np.ndarray
    dt: float
    t0: float = 0.0
    label: str = ""

    def __post_init__(self):
        arr = _freeze(self.values)
        if arr.ndim != 1:
            raise ValueError(f"series values must be 1-D, got shape {arr.shape}")
        if arr.size < _MIN_LENGTH:
            raise ValueError(f"series needs at least {_MIN_LENGTH} points, got {arr.size}")
        if not np.isfinite(arr).all():
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise NonFiniteValue(f"non-finite value at index {bad}", row=bad)
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be a positive finite real, got {self.dt}")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    @property
    def t_end(self) -> float:
        return self.t0 + (len(self) - 1) * self.dt

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self))


@dataclass(frozen=True)
class AlignedPair:
    """Two equal-grid series with their forward-difference series.

    d1/d2 hold (x[n+1] - x[n]) / dt for n = 0..N-2, so they have m = N-1
    entries. Every covariance downstream is computed on the same window
    0..N-2 of x1/x2, exposed as x1w/x2w.
    """

    x1: TimeSeries
    x2: TimeSeries
    d1: np.ndarray = field(repr=False)
    d2: np.ndarray = field(repr=False)
    m: int = 0

    def __post_init__(self):
        object.__setattr__(self, "d1", _freeze(self.d1))
        object.__setattr__(self, "d2", _freeze(self.d2))

    @property
    def x1w(self) -> np.ndarray:
        return self.x1.values[: self.m]

    @property
    def x2w(self) -> np.ndarray:
        return self.x2.values[: self.m]

    @property
    def dt(self) -> float:
        return self.x1.dt


@dataclass(frozen=True)
class StationaryWindow:
    """Half-open index window [start_index, end_index) into the aligned sample.

    Selects the slab used for the starred covariances of the nonstationary
    flow variant.
    """

    start_index: int
    end_index: int

    def __post_init__(self):
        if self.start_index < 0:
            raise ValueError(f"start_index must be >= 0, got {self.start_index}")
        if self.end_index - self.start_index < _MIN_LENGTH:
            raise ValueError(
                f"window [{self.start_index}, {self.end_index}) has fewer than "
                f"{_MIN_LENGTH} points"
            )

    def __len__(self) -> int:
        return self.end_index - self.start_index


def _data_lines(path):
    """Yield non-comment, non-blank lines of a CSV file."""
    with open(path, newline="") as fh:
        for line in fh:
            if line.lstrip().startswith("#") or not line.strip():
                continue
            yield line


def load_csv(path, column_x1: str, column_x2: str, dt: float) -> tuple[TimeSeries, TimeSeries]:
    """Read two named columns from a headered CSV into TimeSeries.

    Lines starting with '#' are ignored. Every cell of the requested columns
    must parse as a finite real; missing cells and absent columns are errors.
    """
    reader = csv.reader(_data_lines(path))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyFile(f"{path}: no header row")
    header = [h.strip() for h in header]
    cols = {}
    for name in (column_x1, column_x2):
        if name not in header:
            raise MissingColumn(f"{path}: column {name!r} not in header {header}")
        cols[name] = header.index(name)

    out: dict[str, list[float]] = {column_x1: [], column_x2: []}
    for i, row in enumerate(reader, start=1):
        for name, j in cols.items():
            if j >= len(row):
                raise LengthMismatch(f"{path}: row {i} has no cell for column {name!r}")
            cell = row[j].strip()
            try:
                value = float(cell)
            except ValueError:
                raise NonFiniteValue(f"{path}: row {i}, column {name!r}: {cell!r}", row=i)
            if not math.isfinite(value):
                raise NonFiniteValue(f"{path}: row {i}, column {name!r}: {cell!r}", row=i)
            out[name].append(value)
    if not out[column_x1]:
        raise EmptyFile(f"{path}: no data rows")
    return (
        TimeSeries(out[column_x1], dt, label=column_x1),
        TimeSeries(out[column_x2], dt, label=column_x2),
    )


def subsample(s: TimeSeries, delta_n: int) -> TimeSeries:
    """Keep every delta_n-th value starting at index 0; dt scales accordingly."""
    if delta_n < 1:
        raise ValueError(f"delta_n must be >= 1, got {delta_n}")
    values = s.values[::delta_n]
    if values.size < _MIN_LENGTH:
        raise TooShortAfterSubsample(
            f"subsampling by {delta_n} leaves {values.size} points (need {_MIN_LENGTH})"
        )
    return TimeSeries(values, s.dt * delta_n, s.t0, s.label)


def align(x1: TimeSeries, x2: TimeSeries) -> AlignedPair:
    """Pair two series and attach their Euler-forward difference series."""
    if len(x1) != len(x2):
        raise LengthMismatch(f"series lengths differ: {len(x1)} vs {len(x2)}")
    if not math.isclose(x1.dt, x2.dt, rel_tol=1e-12, abs_tol=0.0):
        raise DtMismatch(f"series timesteps differ: {x1.dt} vs {x2.dt}")
    d1 = (x1.values[1:] - x1.values[:-1]) / x1.dt
    d2 = (x2.values[1:] - x2.values[:-1]) / x2.dt
    return AlignedPair(x1=x1, x2=x2, d1=d1, d2=d2, m=len(x1) - 1)


def detrend_values(values: np.ndarray) -> np.ndarray:
    """Residuals of a least-squares linear fit in sample index."""
    n = np.arange(values.size, dtype=float)
    nc = n - n.mean()
    slope = float(nc @ values) / float(nc @ nc)
    return values - (values.mean() + slope * nc)


def detrend_linear(s: TimeSeries) -> TimeSeries:
    """Remove the least-squares linear trend (in index) from a series."""
    return TimeSeries(detrend_values(s.values), s.dt, s.t0, s.label)

"""Annual time-series data model: ingestion, transforms, break dummies.

A Dataset is a set of equal-length annual series over one contiguous year
range. Missing values are a hard error everywhere: with ~40 annual
observations there is no safe imputation, so a gap aborts ingestion.

Break-dummy convention used across the whole package: the break at index
tb (1-based) takes effect the following period, du_t = 1{t > tb} and
dt_t = max(t - tb, 0). Reported break positions therefore print as the
last year of the old regime.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AlignmentMismatch,
    BreakOutOfRange,
    DuplicateColumn,
    EmptyFile,
    GapInYears,
    NonNumericCell,
    SeriesTooShort,
)


@dataclass(frozen=True)
class TimeSeries:
    """Named annual series with no gaps."""

    name: str
    start_year: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise SeriesTooShort(f"series {self.name!r} must be a nonempty vector")
        if not np.all(np.isfinite(v)):
            raise NonNumericCell(f"series {self.name!r} contains non-finite values")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.start_year, self.start_year + len(self))

    def year_of_index(self, idx: int) -> int:
        """Calendar year of a 1-based observation index."""
        return self.start_year + idx - 1


@dataclass(frozen=True)
class Dataset:
    """Aligned collection of TimeSeries sharing one contiguous year range."""

    columns: dict[str, TimeSeries] = field(default_factory=dict)

    def __post_init__(self):
        if not self.columns:
            raise EmptyFile("dataset has no columns")
        lengths = {len(s) for s in self.columns.values()}
        starts = {s.start_year for s in self.columns.values()}
        if len(lengths) != 1 or len(starts) != 1:
            raise AlignmentMismatch("all columns must share length and start year")
        for name, s in self.columns.items():
            if name != s.name:
                raise AlignmentMismatch(f"column key {name!r} does not match series name {s.name!r}")

    @property
    def names(self) -> list[str]:
        return list(self.columns.keys())

    @property
    def start_year(self) -> int:
        return next(iter(self.columns.values())).start_year

    @property
    def n_obs(self) -> int:
        return len(next(iter(self.columns.values())))

    @property
    def years(self) -> np.ndarray:
        return next(iter(self.columns.values())).years

    def __getitem__(self, name: str) -> TimeSeries:
        return self.columns[name]

    def matrix(self, names: list[str] | None = None) -> np.ndarray:
        """Column-stacked values in the requested (or stored) order."""
        names = self.names if names is None else names
        return np.column_stack([self.columns[n].values for n in names])

    def select(self, names: list[str]) -> "Dataset":
        return Dataset({n: self.columns[n] for n in names})

    def with_column(self, s: TimeSeries) -> "Dataset":
        if s.name in self.columns:
            raise DuplicateColumn(f"column {s.name!r} already present")
        if len(s) != self.n_obs or s.start_year != self.start_year:
            raise AlignmentMismatch(f"column {s.name!r} is not aligned with the dataset")
        cols = dict(self.columns)
        cols[s.name] = s
        return Dataset(cols)


def load_dataset(csv_text: str | bytes) -> Dataset:
    """Parse `year,<name>,...` CSV text into a Dataset.

    Strict by design: duplicate headers, any non-numeric cell, and any gap
    or disorder in the year column abort with a specific error.
    """
    if isinstance(csv_text, bytes):
        csv_text = csv_text.decode("utf-8")
    rows = [r for r in csv.reader(io.StringIO(csv_text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise EmptyFile("no data in CSV input")
    header = [c.strip() for c in rows[0]]
    if len(header) < 2 or header[0].lower() != "year":
        raise NonNumericCell(f"header must start with 'year', got {header[:1]}")
    names = header[1:]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise DuplicateColumn(f"duplicate column name(s): {', '.join(dupes)}")
    if len(rows) == 1:
        raise EmptyFile("CSV has a header but no data rows")

    years: list[int] = []
    data: list[list[float]] = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise NonNumericCell(f"row {i} has {len(row)} cells, expected {len(header)}")
        try:
            year = int(row[0])
        except ValueError:
            raise NonNumericCell(f"row {i}: year {row[0]!r} is not an integer") from None
        try:
            vals = [float(c) for c in row[1:]]
        except ValueError:
            bad = next(c for c in row[1:] if not _is_float(c))
            raise NonNumericCell(f"row {i}: cell {bad!r} is not numeric") from None
        if not all(np.isfinite(vals)):
            raise NonNumericCell(f"row {i}: non-finite value")
        years.append(year)
        data.append(vals)

    for prev, cur in zip(years, years[1:]):
        if cur != prev + 1:
            raise GapInYears(f"years must be contiguous ascending; {prev} followed by {cur}")

    arr = np.asarray(data, dtype=float)
    cols = {
        name: TimeSeries(name=name, start_year=years[0], values=arr[:, j])
        for j, name in enumerate(names)
    }
    return Dataset(cols)


def _is_float(c: str) -> bool:
    try:
        float(c)
        return True
    except ValueError:
        return False


def transform(s: TimeSeries, spec: str, k: int = 1) -> TimeSeries:
    """diff / lag / lead / trend transforms.

    diff drops the first observation; lag(k) and lead(k) shorten the usable
    sample by k; trend emits 1..T (same alignment as the input).
    """
    T = len(s)
    if spec == "diff":
        if T < 2:
            raise SeriesTooShort("diff needs at least two observations")
        return TimeSeries(f"d_{s.name}", s.start_year + 1, np.diff(s.values))
    if spec == "lag":
        if k < 1 or T <= k:
            raise SeriesTooShort(f"lag({k}) on a series of length {T}")
        return TimeSeries(f"{s.name}_lag{k}", s.start_year + k, s.values[:-k])
    if spec == "lead":
        if k < 1 or T <= k:
            raise SeriesTooShort(f"lead({k}) on a series of length {T}")
        return TimeSeries(f"{s.name}_lead{k}", s.start_year, s.values[k:])
    if spec == "trend":
        return TimeSeries("trend", s.start_year, np.arange(1.0, T + 1.0))
    raise ValueError(f"unknown transform {spec!r}")


@dataclass(frozen=True)
class BreakDummies:
    """Intercept-shift (du) and trend-shift (dt) dummies for a break at tb."""

    tb: int
    du: np.ndarray | None = None
    dt: np.ndarray | None = None


def break_dummies(T: int, tb: int, model: str = "C") -> BreakDummies:
    """Level/trend break dummies: model A -> du, B -> dt, C -> both.

    tb is 1-based; the shift starts at t = tb + 1.
    """
    if not 1 <= tb < T:
        raise BreakOutOfRange(f"tb={tb} must satisfy 1 <= tb < T={T}")
    if model not in ("A", "B", "C"):
        raise ValueError(f"model must be A, B, or C, got {model!r}")
    t = np.arange(1, T + 1)
    du = (t > tb).astype(float)
    dt = np.maximum(t - tb, 0).astype(float)
    return BreakDummies(
        tb=tb,
        du=du if model in ("A", "C") else None,
        dt=dt if model in ("B", "C") else None,
    )


def interaction(a: TimeSeries, b: TimeSeries, name: str = "TERM") -> TimeSeries:
    """Elementwise product of two aligned series."""
    if len(a) != len(b) or a.start_year != b.start_year:
        raise AlignmentMismatch(
            f"series {a.name!r} and {b.name!r} are not aligned "
            f"({a.start_year}+{len(a)} vs {b.start_year}+{len(b)})"
        )
    return TimeSeries(name, a.start_year, a.values * b.values)


def describe(d: Dataset) -> list[dict]:
    """Per-column mean/sd/min/max (sd with the T-1 divisor)."""
    out = []
    for name in d.names:
        v = d[name].values
        sd = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
        out.append(
            {
                "name": name,
                "n": int(v.size),
                "mean": float(np.mean(v)),
                "sd": sd,
                "min": float(np.min(v)),
                "max": float(np.max(v)),
            }
        )
    return out

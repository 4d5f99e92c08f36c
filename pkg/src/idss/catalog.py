"""Variable catalog and yearly CSV time-series tables.

The interchange format is a plain CSV with a ``year`` header column followed
by one column per variable (UTF-8, ``.`` decimal, empty cell = missing).
Values survive a write/load round trip bit-exactly up to 12 significant
digits.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    DomainError,
    DuplicateYear,
    InvalidInput,
    NonConsecutiveYears,
    ParseError,
    RangeError,
    TransformError,
)

#: significant digits preserved by write_table / load_table round trips
CSV_PRECISION = 12


@dataclass(frozen=True)
class VariableDef:
    """One catalog entry: a named yearly series and how it enters the model."""

    name: str
    description: str = ""
    units: str = ""
    transform: str = "none"  # "none" | "log"
    source_hint: str = ""

    def __post_init__(self):
        if self.transform not in ("none", "log"):
            raise InvalidInput(f"unknown transform {self.transform!r} for {self.name}")


def catalog_by_name(catalog: list[VariableDef]) -> dict[str, VariableDef]:
    out: dict[str, VariableDef] = {}
    for v in catalog:
        if v.name in out:
            raise InvalidInput(f"duplicate catalog variable {v.name!r}")
        out[v.name] = v
    return out


@dataclass
class TimeSeriesTable:
    """Yearly panel: consecutive integer years and one float column per variable.

    Missing cells are NaN. ``transformed`` records which columns already hold
    log values, ``absent`` which catalog variables the source file did not
    carry, and ``warnings`` anything suspicious seen while loading.
    """

    years: list[int]
    columns: dict[str, np.ndarray]
    transformed: frozenset[str] = frozenset()
    absent: tuple[str, ...] = ()
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        t = len(self.years)
        for i in range(1, t):
            if self.years[i] != self.years[i - 1] + 1:
                raise NonConsecutiveYears(
                    f"years must be consecutive, got {self.years[i - 1]} then {self.years[i]}"
                )
        for name, col in self.columns.items():
            col = np.asarray(col, dtype=float)
            if col.shape != (t,):
                raise InvalidInput(f"column {name!r} has shape {col.shape}, expected ({t},)")
            self.columns[name] = col

    @property
    def n_years(self) -> int:
        return len(self.years)

    def mask(self, name: str) -> np.ndarray:
        """Observation mask for a column (True where a value is present)."""
        return np.isfinite(self.columns[name])

    def year_index(self, year: int) -> int:
        if not self.years or not (self.years[0] <= year <= self.years[-1]):
            raise RangeError(f"year {year} outside table range {self.years[0]}..{self.years[-1]}")
        return year - self.years[0]


def load_table(path, catalog: list[VariableDef]) -> TimeSeriesTable:
    """Parse a yearly CSV against a catalog.

    Unknown columns are dropped (noted in ``table.warnings``); catalog
    variables with no column are listed in ``table.absent``.
    """
    known = catalog_by_name(catalog)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", row=1) from None
        header = [h.strip() for h in header]
        if "year" not in header:
            raise ParseError("header must contain a 'year' column", row=1)
        year_idx = header.index("year")
        var_cols = [(i, h) for i, h in enumerate(header) if i != year_idx]

        warnings: list[str] = []
        keep: list[tuple[int, str]] = []
        for i, h in enumerate(header):
            if i == year_idx:
                continue
            if h in known:
                keep.append((i, h))
            else:
                warnings.append(f"ignoring unknown column {h!r}")
        del var_cols

        years: list[int] = []
        raw: dict[str, list[float]] = {h: [] for _, h in keep}
        seen_years: set[int] = set()
        for rownum, row in enumerate(reader, start=2):
            if not any(cell.strip() for cell in row):
                continue
            try:
                year = int(row[year_idx].strip())
            except (ValueError, IndexError):
                raise ParseError(
                    f"row {rownum}: cannot parse year {row[year_idx]!r}",
                    row=rownum,
                    column="year",
                ) from None
            if year in seen_years:
                raise DuplicateYear(f"year {year} appears more than once")
            seen_years.add(year)
            years.append(year)
            for i, name in keep:
                cell = row[i].strip() if i < len(row) else ""
                if cell == "":
                    raw[name].append(math.nan)
                    continue
                try:
                    raw[name].append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"row {rownum}, column {name!r}: non-numeric cell {cell!r}",
                        row=rownum,
                        column=name,
                    ) from None

    if not years:
        raise ParseError("no data rows", row=2)
    order = np.argsort(years)
    years = [years[i] for i in order]
    columns = {name: np.asarray(vals, dtype=float)[order] for name, vals in raw.items()}
    absent = tuple(name for name in known if name not in columns)
    return TimeSeriesTable(
        years=years, columns=columns, absent=absent, warnings=warnings
    )


def write_table(table: TimeSeriesTable, path) -> None:
    """Write a table back to CSV (inverse of load_table up to 12 sig. digits)."""
    names = list(table.columns)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["year"] + names)
        for i, year in enumerate(table.years):
            row = [str(year)]
            for name in names:
                v = table.columns[name][i]
                row.append("" if not math.isfinite(v) else format(v, f".{CSV_PRECISION}g"))
            writer.writerow(row)


def apply_transforms(table: TimeSeriesTable, catalog: list[VariableDef]) -> TimeSeriesTable:
    """Apply the catalog's log transforms, returning a new table.

    Refuses to run twice on the same column: the result's ``transformed``
    set marks what already holds log values.
    """
    known = catalog_by_name(catalog)
    columns = dict(table.columns)
    done = set(table.transformed)
    for name, col in table.columns.items():
        spec = known.get(name)
        if spec is None or spec.transform != "log":
            continue
        if name in done:
            raise TransformError(f"column {name!r} is already log-transformed")
        observed = np.isfinite(col)
        bad = observed & (col <= 0.0)
        if bad.any():
            year = table.years[int(np.argmax(bad))]
            raise DomainError(
                f"cannot log-transform {name!r}: non-positive value in {year}",
                variable=name,
                year=year,
            )
        out = col.copy()
        out[observed] = np.log(col[observed])
        columns[name] = out
        done.add(name)
    return replace(table, columns=columns, transformed=frozenset(done))


def invert_transforms(table: TimeSeriesTable, catalog: list[VariableDef]) -> TimeSeriesTable:
    """Undo apply_transforms (exp the flagged columns)."""
    known = catalog_by_name(catalog)
    columns = dict(table.columns)
    done = set(table.transformed)
    for name in list(done):
        spec = known.get(name)
        if spec is None or spec.transform != "log":
            continue
        col = columns[name].copy()
        observed = np.isfinite(col)
        col[observed] = np.exp(col[observed])
        columns[name] = col
        done.discard(name)
    return replace(table, columns=columns, transformed=frozenset(done))


def slice_window(table: TimeSeriesTable, start_year: int, end_year: int) -> TimeSeriesTable:
    """Contiguous sub-table from start_year to end_year inclusive."""
    if start_year > end_year:
        raise RangeError(f"start {start_year} > end {end_year}")
    lo = table.year_index(start_year)
    hi = table.year_index(end_year)
    columns = {name: col[lo : hi + 1].copy() for name, col in table.columns.items()}
    return replace(table, years=table.years[lo : hi + 1], columns=columns)

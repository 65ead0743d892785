"""Per-theory firm metric series from CSV, and their calibration into channels.

Input files have the header ``date,theory,value`` with ISO dates, one of
the eight theory labels and a decimal value per row. Rows are grouped by
theory; within a theory dates must be strictly increasing.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from firmdyn.dynamics import LogisticMap
from firmdyn.errors import (
    DegenerateSeriesError,
    IngestError,
    NonMonotonicDateError,
    ParseError,
    UnknownTheoryError,
)
from firmdyn.forcing import Calibration, map_to_lambda
from firmdyn.stability import THEORIES, TheoryChannel

HEADER = ["date", "theory", "value"]
X0_BAND = (0.05, 0.95)


@dataclass(frozen=True)
class MetricSeries:
    theory: str
    timestamps: tuple
    values: tuple

    def __post_init__(self):
        if self.theory not in THEORIES:
            raise UnknownTheoryError(f"unknown theory {self.theory!r}")
        if len(self.timestamps) != len(self.values):
            raise IngestError(f"{self.theory}: timestamps and values differ in length")
        if len(self.values) < 2:
            raise IngestError(f"{self.theory}: need at least 2 points")
        for a, b in zip(self.timestamps, self.timestamps[1:]):
            if not b > a:
                raise NonMonotonicDateError(f"{self.theory}: date {b} does not follow {a}")

    def days(self):
        t0 = self.timestamps[0]
        return np.array([(t - t0).days for t in self.timestamps], dtype=float)


def load_series(path):
    """Parse a metrics CSV into one :class:`MetricSeries` per theory, in file order."""
    path = Path(path)
    grouped: dict[str, tuple[list, list]] = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError("empty file", line=1)
        if [h.strip() for h in header] != HEADER:
            raise ParseError(f"header must be {','.join(HEADER)!r}", line=1)
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", line=line)
            date_s, theory, value_s = (cell.strip() for cell in row)
            try:
                date = dt.date.fromisoformat(date_s)
            except ValueError:
                raise ParseError(f"bad date {date_s!r}", line=line) from None
            if theory not in THEORIES:
                raise UnknownTheoryError(f"line {line}: unknown theory {theory!r}")
            try:
                value = float(value_s)
            except ValueError:
                raise ParseError(f"bad value {value_s!r}", line=line) from None
            dates, values = grouped.setdefault(theory, ([], []))
            if dates and not date > dates[-1]:
                raise NonMonotonicDateError(
                    f"line {line}: {theory} date {date} does not follow {dates[-1]}"
                )
            dates.append(date)
            values.append(value)
    if not grouped:
        raise ParseError("no data rows", line=1)
    return [MetricSeries(t, tuple(d), tuple(v)) for t, (d, v) in grouped.items()]


def write_series(series, path):
    """Write series back in the input format (values to 17 significant digits)."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for s in series:
            for d, v in zip(s.timestamps, s.values):
                w.writerow([d.isoformat(), s.theory, format(v, ".17g")])


def detrended_amplitude(series: MetricSeries) -> float:
    """Half the range of the series after removing a least-squares line in time."""
    t = series.days()
    y = np.asarray(series.values, dtype=float)
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    return float(resid.max() - resid.min()) / 2.0


def normalize_to_calibration(series: MetricSeries, cal: Calibration) -> TheoryChannel:
    """Channel whose control parameter is the calibrated detrended amplitude.

    The initial state is the last raw value rescaled from [min, max] into
    [0.05, 0.95], away from the absorbing endpoints.
    """
    values = np.asarray(series.values, dtype=float)
    lo, hi = float(values.min()), float(values.max())
    band_lo, band_hi = X0_BAND
    if hi == lo:
        if not (cal.amplitude_min <= 0.0 <= cal.amplitude_max):
            raise DegenerateSeriesError(
                f"{series.theory}: constant series and calibration excludes zero amplitude"
            )
        return TheoryChannel(
            series.theory, LogisticMap(map_to_lambda(0.0, cal)), 0.5 * (band_lo + band_hi)
        )
    amplitude = detrended_amplitude(series)
    x0 = band_lo + (band_hi - band_lo) * (values[-1] - lo) / (hi - lo)
    return TheoryChannel(series.theory, LogisticMap(map_to_lambda(amplitude, cal)), float(x0))

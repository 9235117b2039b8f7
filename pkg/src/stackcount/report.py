"""Count reports and their CSV form."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

COLUMNS = ("experiment", "B", "observed", "predicted", "ratio", "tolerance", "pass")
MISSING = "-"


@dataclass(frozen=True)
class Row:
    experiment: str
    B: Fraction | int | float | None
    observed: int | float | None
    predicted: float | None = None
    tolerance: float | None = None
    passed: bool | None = None

    @property
    def ratio(self) -> float | None:
        if self.observed is None or not self.predicted:
            return None
        r = self.observed / self.predicted
        return r if math.isfinite(r) else None


def relative_row(experiment: str, B, observed, predicted, tol: float | None) -> Row:
    """Row that passes when |observed/predicted - 1| <= tol."""
    passed = None
    if tol is not None and predicted:
        passed = abs(observed / predicted - 1) <= tol
    return Row(experiment, B, observed, predicted, tol, passed)


def absolute_row(experiment: str, B, observed, predicted, tol: float | None) -> Row:
    """Row that passes when |observed - predicted| <= tol."""
    passed = None if tol is None else abs(observed - predicted) <= tol
    return Row(experiment, B, observed, predicted, tol, passed)


@dataclass
class CountReport:
    rows: list[Row] = field(default_factory=list)

    def add(self, row: Row) -> None:
        self.rows.append(row)

    @property
    def ok(self) -> bool:
        return all(r.passed is not False for r in self.rows)

    def failing(self) -> list[Row]:
        return [r for r in self.rows if r.passed is False]


def _fmt(v) -> str:
    if v is None:
        return MISSING
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        return format(float(v), ".12g")
    return format(float(v), ".12g")


def format_row(row: Row) -> list[str]:
    return [
        row.experiment,
        _fmt(row.B),
        _fmt(row.observed),
        _fmt(row.predicted),
        _fmt(row.ratio),
        _fmt(row.tolerance),
        _fmt(row.passed),
    ]


def render_csv(report: CountReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in report.rows:
        w.writerow(format_row(row))
    return buf.getvalue()


def emit_csv(report: CountReport, path) -> None:
    """Write the report as UTF-8 CSV.  OSError propagates to the caller."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(report))

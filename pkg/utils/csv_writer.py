# =====================================================
# utils/csv_writer.py - Sweep CSV output
# =====================================================

import csv
import math
import sys
from contextlib import contextmanager
from typing import Iterable, List, Optional, TextIO

from pydantic import BaseModel, Field

from models.results import ProbabilityResult

HEADER = ["index", "variable", "value", "P", "log10P", "theta", "planck", "warnings"]


class SweepRow(BaseModel):
    index: int
    variable: str
    value: float
    result: Optional[ProbabilityResult] = None
    warnings: List[str] = Field(default_factory=list)
    # exit code of the error that replaced the result
    exit_code: Optional[int] = None


def format_number(x: Optional[float]) -> str:
    """17 significant digits, fixed scientific notation."""
    if x is None:
        return ""
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    if math.isnan(x):
        return "nan"
    return "%.16e" % x


def _cells(row: SweepRow) -> List[str]:
    result = row.result
    warnings = list(row.warnings)
    if result is not None:
        warnings = result.warnings + warnings
    return [
        str(row.index),
        row.variable,
        format_number(row.value),
        format_number(result.value if result else None),
        format_number(result.log10_value if result else None),
        format_number(result.angles.primary() if result else None),
        format_number(result.planck_factor if result else None),
        ";".join(w.replace(",", " ").replace("\n", " ") for w in warnings),
    ]


@contextmanager
def open_output(path: str):
    """'-' is stdout; anything else is opened for writing with '\\n' line ends."""
    if path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as stream:
        yield stream


def write_sweep_csv(rows: Iterable[SweepRow], stream: TextIO) -> int:
    """Write header and rows in index order; returns the number of data rows."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(HEADER)
    count = 0
    for row in sorted(rows, key=lambda r: r.index):
        writer.writerow(_cells(row))
        count += 1
    return count

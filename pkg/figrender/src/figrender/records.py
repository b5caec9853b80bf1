"""Reading the simulator's CSV export.

The renderer knows nothing about the simulator's internals; the fifteen
column export schema is the entire interface between the two packages.
The header is matched column by column so a mismatch can name the first
offending column instead of failing opaquely somewhere downstream.
"""

import csv
import math
from dataclasses import dataclass
from typing import Optional

HEADER = (
    "experiment", "kappa1", "kappa2", "p", "eps_P", "eps_R", "seed",
    "replicate", "final_kind", "mean_alpha", "distinct_actions",
    "welfare_raw", "welfare_norm", "converged", "oscillating",
)


class SchemaError(ValueError):
    """Input does not follow the export schema.

    ``column`` holds the name of the first offending column when the
    failure is positional, None for structural problems (no header at
    all, short rows).
    """

    def __init__(self, message: str, column: Optional[str] = None):
        super().__init__(message)
        self.column = column


@dataclass(frozen=True)
class Row:
    experiment: str
    kappa1: float
    kappa2: float
    p: float
    eps_p: float
    eps_r: float
    seed: int
    replicate: int
    final_kind: str
    mean_alpha: float  # nan when the final population has no rational member
    distinct_actions: int
    welfare_raw: float
    welfare_norm: float
    converged: bool
    oscillating: bool


def _float(text: str) -> float:
    if text == "":
        return math.nan
    return float(text)


def _bool(text: str, column: str, line: int) -> bool:
    if text == "true":
        return True
    if text == "false":
        return False
    raise SchemaError(f"line {line}: column {column!r} must be true/false, "
                      f"got {text!r}", column=column)


def check_header(header: list[str]) -> None:
    for i, expected in enumerate(HEADER):
        if i >= len(header):
            raise SchemaError(f"missing column {expected!r} "
                              f"(header has {len(header)} of {len(HEADER)})",
                              column=expected)
        if header[i] != expected:
            raise SchemaError(f"column {i + 1}: expected {expected!r}, "
                              f"found {header[i]!r}", column=expected)
    if len(header) > len(HEADER):
        raise SchemaError(f"unexpected extra column {header[len(HEADER)]!r}",
                          column=header[len(HEADER)])


def read_rows(path: str) -> list[Row]:
    """Parse one export file; raises SchemaError on any shape problem."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError("file has no header row")
        check_header(header)
        rows = []
        for line_no, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(HEADER):
                raise SchemaError(f"line {line_no}: expected {len(HEADER)} "
                                  f"fields, got {len(rec)}")
            try:
                rows.append(Row(
                    experiment=rec[0],
                    kappa1=_float(rec[1]),
                    kappa2=_float(rec[2]),
                    p=_float(rec[3]),
                    eps_p=_float(rec[4]),
                    eps_r=_float(rec[5]),
                    seed=int(rec[6]),
                    replicate=int(rec[7]),
                    final_kind=rec[8],
                    mean_alpha=_float(rec[9]),
                    distinct_actions=int(rec[10]),
                    welfare_raw=_float(rec[11]),
                    welfare_norm=_float(rec[12]),
                    converged=_bool(rec[13], "converged", line_no),
                    oscillating=_bool(rec[14], "oscillating", line_no),
                ))
            except SchemaError:
                raise
            except ValueError as exc:
                raise SchemaError(f"line {line_no}: {exc}") from exc
        return rows

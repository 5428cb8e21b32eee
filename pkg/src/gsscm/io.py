"""CSV input/output.

Numbers are written with ``repr`` (shortest decimal that round-trips), so a
matrix written and read back is bit-identical.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, is_dataclass

import numpy as np

from .errors import DataError


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def parse_csv(text: str):
    """Parse numeric CSV text. Returns ``(array, header or None)``.

    A first line with any non-numeric cell is taken as the header.
    """
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise DataError("CSV input contains no rows")
    header = None
    if not all(_is_number(c.strip()) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise DataError("CSV input has a header but no data rows")
    width = len(rows[0])
    out = np.empty((len(rows), width))
    first_line = 2 if header is not None else 1
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"row {i + first_line}: expected {width} columns, found {len(row)}")
        for j, cell in enumerate(row):
            try:
                out[i, j] = float(cell)
            except ValueError:
                raise DataError(
                    f"row {i + first_line}, column {j + 1}: non-numeric cell {cell.strip()!r}"
                ) from None
    if not np.all(np.isfinite(out)):
        raise DataError("CSV input contains non-finite values")
    return out, header


def read_csv_matrix(path):
    try:
        with open(path, newline="") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise DataError(f"input file not found: {path}") from None
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    return parse_csv(text)[0]


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return "nan" if math.isnan(v) else repr(v)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def matrix_to_csv(M, header=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header is not None:
        w.writerow(header)
    for row in np.atleast_2d(M):
        w.writerow([fmt(float(v)) for v in row])
    return buf.getvalue()


def records_to_csv(records, columns=None) -> str:
    dicts = [asdict(r) if is_dataclass(r) else dict(r) for r in records]
    if columns is None:
        columns = list(dicts[0]) if dicts else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for d in dicts:
        w.writerow([fmt(d[c]) for c in columns])
    return buf.getvalue()


def write_text(path, text: str):
    if path is None or path == "-":
        import sys

        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)

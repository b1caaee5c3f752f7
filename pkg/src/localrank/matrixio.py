"""Matrix file formats: CSV and a raw little-endian binary.

CSV is comma-separated, '.' decimal, UTF-8, one case per row, with an
optional single header row (detected, then skipped).  The binary format is
an 8-byte header of two little-endian uint32 (n, d) followed by n*d
little-endian float64 values in row-major order.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import FormatError

_BINARY_HEADER = struct.Struct("<II")


def detect_format(path) -> str:
    """'binary' for .bin/.dat suffixes, 'csv' otherwise."""
    return "binary" if Path(path).suffix.lower() in {".bin", ".dat"} else "csv"


def _parse_csv_rows(path) -> list[list[float]]:
    rows: list[list[float]] = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cells = [c.strip() for c in line.split(",")]
            parsed = []
            for colno, cell in enumerate(cells, start=1):
                try:
                    value = float(cell)
                except ValueError:
                    if lineno == 1 and not rows:
                        parsed = None  # header row
                        break
                    raise FormatError(
                        f"{path}: row {lineno}, column {colno}: "
                        f"not a number: {cell!r}"
                    ) from None
                if not np.isfinite(value):
                    raise FormatError(
                        f"{path}: row {lineno}, column {colno}: non-finite value {cell!r}"
                    )
                parsed.append(value)
            if parsed is None:
                continue
            if width is None:
                width = len(parsed)
            elif len(parsed) != width:
                raise FormatError(
                    f"{path}: row {lineno} has {len(parsed)} columns, expected {width}"
                )
            rows.append(parsed)
    if not rows:
        raise FormatError(f"{path}: no numeric rows found")
    return rows


def read_matrix(path, fmt: str | None = None) -> np.ndarray:
    """Load a matrix, inferring the format from the suffix unless given."""
    fmt = fmt or detect_format(path)
    if fmt == "csv":
        return np.asarray(_parse_csv_rows(path), dtype=np.float64)
    if fmt == "binary":
        raw = Path(path).read_bytes()
        if len(raw) < _BINARY_HEADER.size:
            raise FormatError(f"{path}: truncated binary header")
        n, d = _BINARY_HEADER.unpack_from(raw)
        expected = _BINARY_HEADER.size + 8 * n * d
        if len(raw) != expected:
            raise FormatError(
                f"{path}: binary payload is {len(raw)} bytes, expected {expected} "
                f"for a {n}x{d} matrix"
            )
        values = np.frombuffer(raw, dtype="<f8", offset=_BINARY_HEADER.size)
        matrix = values.reshape(n, d).astype(np.float64)
        if not np.isfinite(matrix).all():
            bad = np.argwhere(~np.isfinite(matrix))[0]
            raise FormatError(
                f"{path}: non-finite value at row {bad[0] + 1}, column {bad[1] + 1}"
            )
        return matrix
    raise FormatError(f"unknown matrix format {fmt!r}")


def write_matrix(path, matrix, fmt: str | None = None, header: list[str] | None = None) -> None:
    """Write a matrix in full precision; ``header`` only applies to CSV."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    fmt = fmt or detect_format(path)
    if fmt == "csv":
        with open(path, "w", encoding="utf-8") as fh:
            if header is not None:
                fh.write(",".join(header) + "\n")
            for row in matrix:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    elif fmt == "binary":
        n, d = matrix.shape
        with open(path, "wb") as fh:
            fh.write(_BINARY_HEADER.pack(n, d))
            fh.write(np.ascontiguousarray(matrix, dtype="<f8").tobytes())
    else:
        raise FormatError(f"unknown matrix format {fmt!r}")

"""Read and write dense real matrices as Matrix Market or headerless CSV.

Matrix Market input may be ``array`` or ``coordinate`` format with field
``real`` or ``integer`` and symmetry ``general``.  Output is always the
``array`` format with 17 significant digits, which round-trips float64
exactly.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .dense import as_matrix
from .errors import InvalidMatrix, ParseError

MM_BANNER = "%%MatrixMarket"


def _float(token, path, line, column):
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"cannot parse {token!r} as a real number", path, line, column) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {token!r}", path, line, column)
    return value


def _int(token, path, line, column):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", path, line, column) from None


def _data_lines(lines, start):
    """Yield ``(lineno, tokens)`` for non-blank, non-comment lines."""
    for lineno, text in enumerate(lines[start:], start=start + 1):
        stripped = text.strip()
        if not stripped or stripped.startswith("%"):
            continue
        yield lineno, stripped.split()


def parse_matrix_market(text, path=None):
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", path, 1)
    header = lines[0].split()
    if len(header) != 5 or header[0] != MM_BANNER or header[1].lower() != "matrix":
        raise ParseError("expected '%%MatrixMarket matrix <format> <field> <symmetry>'", path, 1)
    fmt, fld, sym = (h.lower() for h in header[2:])
    if fmt not in ("array", "coordinate"):
        raise ParseError(f"unsupported format {fmt!r}", path, 1, 3)
    if fld not in ("real", "integer", "double"):
        raise ParseError(f"unsupported field {fld!r}; only real matrices are read", path, 1, 4)
    if sym != "general":
        raise ParseError(f"unsupported symmetry {sym!r}; only general is read", path, 1, 5)

    body = _data_lines(lines, 1)
    try:
        lineno, size = next(body)
    except StopIteration:
        raise ParseError("missing size line", path, len(lines)) from None

    if fmt == "array":
        if len(size) != 2:
            raise ParseError("array size line needs 'rows cols'", path, lineno)
        rows, cols = (_int(t, path, lineno, k + 1) for k, t in enumerate(size))
        values = []
        for lineno, tokens in body:
            if len(tokens) != 1:
                raise ParseError("array entries need one value per line", path, lineno, 2)
            values.append(_float(tokens[0], path, lineno, 1))
        if len(values) != rows * cols:
            raise ParseError(f"expected {rows * cols} entries, found {len(values)}", path, lineno)
        return np.array(values, dtype=np.float64).reshape((rows, cols), order="F")

    if len(size) != 3:
        raise ParseError("coordinate size line needs 'rows cols nnz'", path, lineno)
    rows, cols, nnz = (_int(t, path, lineno, k + 1) for k, t in enumerate(size))
    out = np.zeros((rows, cols))
    count = 0
    for lineno, tokens in body:
        if len(tokens) != 3:
            raise ParseError("coordinate entries need 'row col value'", path, lineno)
        i = _int(tokens[0], path, lineno, 1)
        j = _int(tokens[1], path, lineno, 2)
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise ParseError(f"index ({i}, {j}) out of range", path, lineno)
        out[i - 1, j - 1] += _float(tokens[2], path, lineno, 3)
        count += 1
    if count != nnz:
        raise ParseError(f"expected {nnz} entries, found {count}", path, lineno)
    return out


def parse_csv(text, path=None):
    rows = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        fields = raw.split(",")
        row = [_float(tok.strip(), path, lineno, col) for col, tok in enumerate(fields, start=1)]
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"expected {width} fields, found {len(row)}", path, lineno)
        rows.append(row)
    if not rows:
        raise ParseError("no data rows", path, 1)
    return np.array(rows, dtype=np.float64)


def read_matrix(path):
    """Read a matrix, choosing the format from the banner line."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read matrix file {path}: {exc.strerror or exc}") from exc
    if text.lstrip().startswith(MM_BANNER):
        return parse_matrix_market(text, path)
    return parse_csv(text, path)


def format_matrix_market(m, comment=None):
    m = as_matrix(m)
    lines = [f"{MM_BANNER} matrix array real general"]
    if comment:
        lines.extend(f"% {c}" for c in comment.splitlines())
    lines.append(f"{m.shape[0]} {m.shape[1]}")
    lines.extend(format(float(x), ".17g") for x in m.ravel(order="F"))
    return "\n".join(lines) + "\n"


def format_csv(m):
    m = as_matrix(m)
    return "".join(",".join(format(float(x), ".17g") for x in row) + "\n" for row in m)


def write_matrix(path, m, fmt=None, comment=None):
    """Write ``m``; ``fmt`` is ``"mtx"`` or ``"csv"`` (default from the suffix, else mtx)."""
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "mtx"
    if fmt == "csv":
        text = format_csv(m)
    elif fmt == "mtx":
        text = format_matrix_market(m, comment)
    else:
        raise InvalidMatrix(f"unknown matrix format {fmt!r}")
    path.write_text(text, encoding="utf-8")

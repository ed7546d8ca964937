"""Plain-text matrix/vector files and ``key = value`` config files.

Matrix format: the first non-comment line is ``m n``; the next m
non-comment lines hold n whitespace-separated decimals each. Lines starting
with ``#`` and blank lines are ignored. A vector is a matrix with header
``1 n``.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import SensingMatrix
from .errors import MalformedFile


def _content_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def _parse_ints(line, lineno, path):
    parts = line.split()
    if len(parts) != 2:
        raise MalformedFile(f"header must be 'm n', got {line!r}", lineno, path)
    try:
        m, n = (int(p) for p in parts)
    except ValueError:
        raise MalformedFile(f"header must hold two integers, got {line!r}", lineno, path) from None
    if m < 1 or n < 1:
        raise MalformedFile(f"dimensions must be positive, got {m} {n}", lineno, path)
    return m, n


def parse_matrix(text: str, path=None) -> np.ndarray:
    lines = _content_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise MalformedFile("empty file", None, path) from None
    m, n = _parse_ints(header, lineno, path)
    rows = []
    for lineno, line in lines:
        if len(rows) == m:
            raise MalformedFile(f"more than {m} rows", lineno, path)
        parts = line.split()
        if len(parts) != n:
            raise MalformedFile(f"expected {n} entries, found {len(parts)}", lineno, path)
        try:
            row = [float(p) for p in parts]
        except ValueError as exc:
            raise MalformedFile(str(exc), lineno, path) from None
        if not all(np.isfinite(row)):
            raise MalformedFile("non-finite entry", lineno, path)
        rows.append(row)
    if len(rows) != m:
        raise MalformedFile(f"expected {m} rows, found {len(rows)}", None, path)
    return np.array(rows, dtype=np.float64)


def read_matrix(path) -> SensingMatrix:
    return SensingMatrix(parse_matrix(Path(path).read_text(), path))


def read_vector(path) -> np.ndarray:
    arr = parse_matrix(Path(path).read_text(), path)
    if arr.shape[0] != 1:
        raise MalformedFile(f"vector file must have header '1 n', got {arr.shape[0]} rows", 1, path)
    return arr[0].copy()


def format_matrix(A) -> str:
    a = A.entries if isinstance(A, SensingMatrix) else np.asarray(A, dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    out = [f"{a.shape[0]} {a.shape[1]}"]
    out.extend(" ".join(repr(float(v)) for v in row) for row in a)
    return "\n".join(out) + "\n"


def write_matrix(path, A):
    Path(path).write_text(format_matrix(A))


def write_vector(path, x):
    Path(path).write_text(format_matrix(np.asarray(x, dtype=np.float64)))


def parse_index_list(text: str) -> tuple:
    """'1,2, 5' -> (1, 2, 5); an empty string gives the empty set."""
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ValueError(f"bad index list {text!r}") from None


def parse_config(text: str, path=None) -> dict:
    """Flat ``key = value`` pairs; values stay strings."""
    out = {}
    for lineno, line in _content_lines(text):
        if "=" not in line:
            raise MalformedFile(f"expected 'key = value', got {line!r}", lineno, path)
        key, value = (p.strip() for p in line.split("=", 1))
        if not key:
            raise MalformedFile("empty key", lineno, path)
        if key in out:
            raise MalformedFile(f"duplicate key {key!r}", lineno, path)
        out[key] = (value, lineno)
    return out

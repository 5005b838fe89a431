"""Plain-text (de)serialization for matrices and vectors.

Format: optional ``#`` comment lines, then a line ``rows cols``, then the
entries row-major, whitespace-separated, written with 17 significant digits
so float64 values round-trip exactly.  A CSV reader is provided for
interoperability with spreadsheet-style dumps.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp

from .linalg import as_matrix, as_vector


def write_matrix(path: str | os.PathLike, a, comments: tuple[str, ...] = ()) -> None:
    """Write a matrix in the text format, densifying sparse input."""
    if sp.issparse(a):
        a = a.toarray()
    a = as_matrix(a)
    with open(path, "w", encoding="utf-8") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write(f"{a.shape[0]} {a.shape[1]}\n")
        for row in a:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def write_vector(path: str | os.PathLike, v, comments: tuple[str, ...] = ()) -> None:
    """Write a vector as an n-by-1 matrix."""
    v = as_vector(v)
    write_matrix(path, v.reshape(-1, 1), comments=comments)


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    """Read a matrix written by :func:`write_matrix`, skipping comments."""
    with open(path, encoding="utf-8") as fh:
        tokens: list[str] = []
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tokens.extend(line.split())
    if len(tokens) < 2:
        raise ValueError(f"{path}: missing 'rows cols' header line")
    rows, cols = int(tokens[0]), int(tokens[1])
    data = tokens[2:]
    if len(data) != rows * cols:
        raise ValueError(
            f"{path}: expected {rows * cols} entries for a {rows}x{cols} matrix, "
            f"got {len(data)}"
        )
    return as_matrix(np.array(data, dtype=np.float64).reshape(rows, cols))


def read_vector(path: str | os.PathLike) -> np.ndarray:
    """Read a vector (a one-column or one-row matrix) from the text format."""
    a = read_matrix(path)
    if 1 not in a.shape:
        raise ValueError(f"{path}: expected a vector, got shape {a.shape}")
    return a.reshape(-1)


def read_csv_matrix(path: str | os.PathLike) -> np.ndarray:
    """Read a comma-separated matrix; ``#`` comment lines are ignored."""
    a = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    return as_matrix(a)

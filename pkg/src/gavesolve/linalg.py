"""Dense linear-algebra primitives shared by the iterative solvers.

Triangular splittings, the infinity norm, comparison-matrix / Z-matrix /
M-matrix predicates, and thin wrappers around LAPACK solves.  Matrices are
plain float64 numpy arrays (row-major); the block-structured problem
generators may hand around ``scipy.sparse`` matrices instead, and the few
functions here that can exploit that accept both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg
from numpy.linalg import LinAlgError


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite float64 2-D array, rejecting NaN/Inf entries."""
    if sp.issparse(a):
        raise TypeError("expected a dense matrix, got a sparse one")
    out = np.ascontiguousarray(a, dtype=np.float64)
    if out.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={out.ndim}")
    if not np.isfinite(out).all():
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return out


def as_vector(v) -> np.ndarray:
    """Coerce to a finite float64 1-D array."""
    out = np.ascontiguousarray(v, dtype=np.float64)
    if out.ndim != 1:
        out = out.reshape(-1)
    if not np.isfinite(out).all():
        raise ValueError("vector entries must be finite (no NaN/Inf)")
    return out


def _require_square(a) -> None:
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")


@dataclass(frozen=True)
class TriangularSplit:
    """Additive splitting A = diag - strict_lower - strict_upper.

    Note the sign convention: ``strict_lower`` / ``strict_upper`` are the
    *negated* strict triangles of A, so that the three parts subtract back
    to A exactly.
    """

    diag: np.ndarray
    strict_lower: np.ndarray
    strict_upper: np.ndarray


def split_dlu(a: np.ndarray) -> TriangularSplit:
    """Split a square matrix as A = D - L - U (diagonal, strict lower, strict upper)."""
    a = as_matrix(a)
    _require_square(a)
    d = np.diag(np.diag(a))
    l = -np.tril(a, -1)
    u = -np.triu(a, 1)
    return TriangularSplit(diag=d, strict_lower=l, strict_upper=u)


def inf_norm(a) -> float:
    """Infinity norm of a matrix: the maximum absolute row sum."""
    if sp.issparse(a):
        return float(abs(a).sum(axis=1).max()) if a.shape[0] else 0.0
    a = as_matrix(a)
    return float(np.abs(a).sum(axis=1).max())


def abs_matrix(a: np.ndarray) -> np.ndarray:
    """Entrywise absolute value |A|."""
    return np.abs(as_matrix(a))


def comparison_matrix(a: np.ndarray) -> np.ndarray:
    """Comparison matrix: |a_ii| on the diagonal, -|a_ij| off it."""
    a = as_matrix(a)
    _require_square(a)
    out = -np.abs(a)
    np.fill_diagonal(out, np.abs(np.diag(a)))
    return out


def is_z_matrix(a, tol: float = 0.0) -> bool:
    """True iff every off-diagonal entry is <= tol (a Z-matrix, up to round-off)."""
    if tol < 0:
        raise ValueError("tol must be >= 0")
    if sp.issparse(a):
        coo = a.tocoo()
        off = coo.data[coo.row != coo.col]
        return bool((off <= tol).all())
    a = as_matrix(a)
    _require_square(a)
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return bool((off <= tol).all())


def is_m_matrix(a, tol: float | None = None) -> bool:
    """Test whether a square matrix is a (nonsingular) M-matrix.

    A Z-matrix with an entrywise-nonnegative inverse.  Rather than forming
    the inverse, we use the semipositivity characterization: solve A x = e
    (all-ones right side) and require every component of x to exceed ``tol``.
    A singular factorization means "not an M-matrix", not an error.

    ``tol`` defaults to 1e-12 scaled down by the matrix norm, since the
    components of A^{-1} e shrink like 1 / ||A||.
    """
    if not is_z_matrix(a):
        return False
    n = a.shape[0]
    if tol is None:
        tol = 1e-12 / max(1.0, inf_norm(a))
    try:
        x = solve_linear(a, np.ones(n))
    except LinAlgError:
        return False
    if not np.isfinite(x).all():
        return False
    return bool((x > tol).all())


def solve_linear(a, rhs: np.ndarray) -> np.ndarray:
    """Solve the dense system A x = rhs by LU with partial pivoting.

    Sparse inputs are routed through a sparse LU instead of being densified.
    Raises ``LinAlgError`` when the factorization hits a singular pivot.
    """
    rhs = np.asarray(rhs, dtype=np.float64)
    if sp.issparse(a):
        if a.shape[0] != a.shape[1]:
            raise ValueError(f"matrix must be square, got shape {a.shape}")
        if a.shape[1] != rhs.shape[0]:
            raise ValueError("matrix/vector dimensions do not agree")
        try:
            lu = scipy.sparse.linalg.splu(a.tocsc())
        except RuntimeError as exc:  # SuperLU signals singularity this way
            raise LinAlgError(str(exc)) from exc
        return lu.solve(rhs)
    a = np.asarray(a, dtype=np.float64)
    _require_square(a)
    if a.shape[1] != rhs.shape[0]:
        raise ValueError("matrix/vector dimensions do not agree")
    return np.linalg.solve(a, rhs)


def lower_triangular_solve(l: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Forward substitution for a lower-triangular system L x = rhs."""
    l = np.asarray(l, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    _require_square(l)
    if l.shape[1] != rhs.shape[0]:
        raise ValueError("matrix/vector dimensions do not agree")
    if (np.diag(l) == 0.0).any():
        idx = int(np.argmax(np.diag(l) == 0.0))
        raise LinAlgError(f"zero diagonal entry at index {idx}")
    return scipy.linalg.solve_triangular(l, rhs, lower=True)

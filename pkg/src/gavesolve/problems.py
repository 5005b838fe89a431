"""Reproducible test-problem generators.

Two families: a deterministic block-tridiagonal complementarity problem on
an m-by-m grid (the classic five-point stencil plus a diagonal shift, with
a known solution), and a random diagonally dominant absolute value system
with an optional rank-deficient B.  Randomness comes from numpy's PCG64
generator with a fixed draw order (the A field row-major first, then the B
field row-major), so identical specs give identical problems on every
platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .lcp import LcpProblem
from .solvers import GaveProblem


def default_x0(rule: str, n: int) -> np.ndarray:
    """Named starting vectors: 'zeros' or 'alt10' = (1,0,1,0,...)."""
    if n < 1:
        raise ValueError("n must be positive")
    if rule == "zeros":
        return np.zeros(n)
    if rule in ("alt10", "ones-zeros-alternating"):
        x = np.zeros(n)
        x[::2] = 1.0
        return x
    raise ValueError(f"unknown x0 rule {rule!r} (expected 'zeros' or 'alt10')")


def tile_pattern(pattern, n: int) -> np.ndarray:
    """Repeat a short pattern out to length n."""
    pattern = np.asarray(pattern, dtype=np.float64)
    reps = -(-n // pattern.shape[0])
    return np.tile(pattern, reps)[:n]


@dataclass(frozen=True)
class BlockTridiagonalSpec:
    """Grid-Laplacian-style LCP family: n = m^2, diagonal shift mu, and the
    repeating pattern that defines the designed solution z*."""

    m: int
    mu: float = 4.0
    z_star_pattern: tuple[float, ...] = (1.0, 2.0)

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("m must be at least 2")
        if len(self.z_star_pattern) == 0:
            raise ValueError("z_star_pattern must be nonempty")


def gen_lcp_example(spec: BlockTridiagonalSpec) -> tuple[LcpProblem, np.ndarray]:
    """Build M = blocktridiag(-I, S, -I) + mu*I with S = tridiag(-1, 4, -1).

    q is synthesized as -M z* so the tiled pattern z* is the exact solution.
    M is returned in CSR form; n = m^2.
    """
    m = spec.m
    n = m * m
    ones = np.ones(m)
    s_blk = sp.diags([-ones[1:], 4.0 * ones, -ones[1:]], [-1, 0, 1], format="csr")
    coupling = sp.diags([ones[1:], ones[1:]], [-1, 1], format="csr")
    eye = sp.eye(m, format="csr")
    mat = sp.kron(eye, s_blk, format="csr") + sp.kron(coupling, -eye, format="csr")
    mat = (mat + spec.mu * sp.eye(n, format="csr")).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    z_star = tile_pattern(spec.z_star_pattern, n)
    q = -(mat @ z_star)
    return LcpProblem(mat, q), z_star


@dataclass(frozen=True)
class RandomGaveSpec:
    """Random dense GAVE family: n = m^2, uniform draws with seed control.

    A gets diagonal entries diag_a_offset + diag_a_scale * u and small
    negative off-diagonals -offdiag_scale * u; B gets diagonal
    diag_b_scale * u with the same off-diagonal law.  With
    ``make_b_singular`` the last row of B is overwritten by the row above
    it, making B rank-deficient.
    """

    m: int
    seed: int = 42
    diag_a_offset: float = 20.0
    diag_a_scale: float = 10.0
    offdiag_scale: float = 0.001
    diag_b_scale: float = 4.0
    make_b_singular: bool = True

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")
        for name in ("diag_a_scale", "offdiag_scale", "diag_b_scale"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def gen_random_gave(spec: RandomGaveSpec) -> GaveProblem:
    """Generate the random GAVE instance for a spec (deterministic per seed).

    The right-hand side is synthesized as b = A x* - B|x*| for the
    alternating reference vector x* = (1,-1,1,-1,...), so the system has a
    known target solution and a nonzero residual denominator.
    """
    n = spec.m * spec.m
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    a = rng.random((n, n))
    diag_a = spec.diag_a_offset + spec.diag_a_scale * np.diag(a).copy()
    a *= -spec.offdiag_scale
    np.fill_diagonal(a, diag_a)
    b = rng.random((n, n))
    diag_b = spec.diag_b_scale * np.diag(b).copy()
    b *= -spec.offdiag_scale
    np.fill_diagonal(b, diag_b)
    if spec.make_b_singular and n >= 2:
        b[-1, :] = b[-2, :]
    x_star = tile_pattern((1.0, -1.0), n)
    rhs = a @ x_star - b @ np.abs(x_star)
    return GaveProblem(a, b, rhs)

"""Linear complementarity problems via the modulus reformulation.

The LCP (find z >= 0 with w = Mz + q >= 0 and z'w = 0) is rewritten as the
absolute value system (M + W)x - (W - M)|x| = -gamma*q with W a positive
diagonal matrix, and z is recovered as (|x| + x)/gamma.  Two solvers work
in this x-space: an accelerated modulus Gauss-Seidel sweep (AMGS, with its
implicit |x_new| term resolved by forward substitution) and the
parameter-free GGS iteration applied to the reformulated system.  Both stop
on the complementarity residual ||min(Mz + q, z)||_2.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numpy.linalg import LinAlgError

from . import _kernels
from .linalg import as_vector
from .solvers import (
    GaveProblem,
    SolveReport,
    SolverConfig,
    _coerce_square,
    _iterate,
    _resolve_x0,
    solve_ggs,
)


@dataclass(eq=False)
class LcpProblem:
    """The pair (M, q) of the complementarity problem."""

    m_mat: np.ndarray | sp.spmatrix
    q: np.ndarray

    def __post_init__(self):
        self.m_mat = _coerce_square(self.m_mat, "m_mat")
        self.q = as_vector(self.q)
        if self.q.shape[0] != self.m_mat.shape[0]:
            raise ValueError(
                f"dimension mismatch: m_mat is {self.m_mat.shape}, "
                f"q has length {self.q.shape[0]}"
            )

    @property
    def n(self) -> int:
        return self.m_mat.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.m_mat)


@dataclass(frozen=True, eq=False)
class ModulusConfig:
    """Reformulation parameters: gamma > 0 and the diagonal shift.

    The shift is theta * diag(M) unless an explicit positive diagonal is
    given; it must come out strictly positive wherever it is used.
    """

    gamma: float = 1.0
    theta: float = 1.0
    omega_diag: np.ndarray | None = None

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.theta < 0:
            raise ValueError("theta must be nonnegative")

    def omega_vector(self, m_diag: np.ndarray) -> np.ndarray:
        if self.omega_diag is not None:
            om = as_vector(self.omega_diag)
            if om.shape[0] != m_diag.shape[0]:
                raise ValueError("omega_diag length does not match the problem size")
        else:
            om = self.theta * m_diag
        if not (om > 0).all():
            raise ValueError("the diagonal shift must be strictly positive")
        return om


def lcp_to_gave(lcp: LcpProblem, cfg: ModulusConfig) -> GaveProblem:
    """Build the equivalent system (M+W)x - (W-M)|x| = -gamma*q."""
    m_diag = np.asarray(lcp.m_mat.diagonal(), dtype=np.float64)
    omega = cfg.omega_vector(m_diag)
    if lcp.is_sparse:
        shift = sp.diags(omega)
        a = (lcp.m_mat + shift).tocsr()
        b = (shift - lcp.m_mat).tocsr()
    else:
        idx = np.arange(lcp.n)
        a = lcp.m_mat.copy()
        a[idx, idx] += omega
        b = -lcp.m_mat
        b[idx, idx] += omega
    return GaveProblem(a, b, -cfg.gamma * lcp.q)


def recover_z(x: np.ndarray, gamma: float) -> np.ndarray:
    """Map the modulus variable back to the LCP variable: z = (|x| + x)/gamma."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    x = np.asarray(x, dtype=np.float64)
    return (np.abs(x) + x) / gamma


def lcp_residual(lcp: LcpProblem, z: np.ndarray) -> float:
    """||min(Mz + q, z)||_2 with the minimum taken componentwise."""
    z = np.asarray(z, dtype=np.float64)
    w = lcp.m_mat @ z + lcp.q
    return float(np.linalg.norm(np.minimum(w, z)))


def _z_residual_fn(lcp: LcpProblem, gamma: float):
    return lambda x: lcp_residual(lcp, recover_z(x, gamma))


def solve_amgs(
    lcp: LcpProblem,
    cfg: ModulusConfig,
    config: SolverConfig | None = None,
) -> SolveReport:
    """Accelerated modulus Gauss-Seidel iteration for the LCP.

    Each step solves (D_M - L_M + W) x_new = U_M x + (W - D_M + U_M)|x|
    + L_M |x_new| - gamma*q; the |x_new| entries sit strictly below the
    diagonal, so a single forward sweep resolves the implicit term.  Stops
    on the complementarity residual of z = (|x|+x)/gamma.
    """
    config = config or SolverConfig()
    _kernels.warmup()
    t0 = time.perf_counter()
    m_diag = np.asarray(lcp.m_mat.diagonal(), dtype=np.float64)
    omega = cfg.omega_vector(m_diag)
    pivots = m_diag + omega
    if (pivots == 0.0).any():
        i = int(np.argmax(pivots == 0.0))
        raise LinAlgError(f"zero sweep pivot at index {i}: diag(M) + shift vanishes")
    neg_gamma_q = -cfg.gamma * lcp.q
    if lcp.is_sparse:
        m = lcp.m_mat

        def run(x_prev, x_next):
            _kernels.amgs_sweep_csr(
                m.data, m.indices, m.indptr, m_diag,
                omega, neg_gamma_q, x_prev, x_next,
            )

    else:
        m = lcp.m_mat

        def run(x_prev, x_next):
            _kernels.amgs_sweep_dense(m, omega, neg_gamma_q, x_prev, x_next)

    def step(x):
        x_next = np.empty_like(x)
        run(x, x_next)
        return x_next

    x0 = _resolve_x0(config.x0, lcp.n)
    return _iterate(step, x0, _z_residual_fn(lcp, cfg.gamma), config, "amgs", t_start=t0)


def solve_ggs_lcp(
    lcp: LcpProblem,
    cfg: ModulusConfig,
    config: SolverConfig | None = None,
) -> SolveReport:
    """Run the parameter-free GGS sweep on the modulus reformulation.

    The reformulated pair always meets the sweep's diagonal condition when
    the shift is positive and diag(M) > 0.  The report carries z-space
    residuals.
    """
    config = config or SolverConfig()
    gave = lcp_to_gave(lcp, cfg)
    return solve_ggs(
        gave, config, residual_fn=_z_residual_fn(lcp, cfg.gamma), method="ggs-lcp"
    )


def sweep_optimal_theta(
    lcp: LcpProblem,
    cfg_template: ModulusConfig,
    config: SolverConfig,
    grid,
) -> tuple[float, SolveReport, float]:
    """Run AMGS once per theta and keep the fewest-iterations value.

    Values with a non-positive resulting shift (theta <= 0) are skipped;
    non-converged runs count as max_iter iterations; ties go to the smallest
    theta.  Returns (theta_opt, report at theta_opt, total sweep seconds).
    """
    grid = [float(t) for t in grid]
    if not grid:
        raise ValueError("theta grid must be nonempty")
    t0 = time.perf_counter()
    best: tuple[float, float, SolveReport] | None = None
    for theta in grid:
        if theta <= 0.0:
            continue
        cfg = dataclasses.replace(cfg_template, theta=theta, omega_diag=None)
        rep = solve_amgs(lcp, cfg, config)
        score = rep.iterations if rep.converged else config.max_iter
        if best is None or (score, theta) < (best[0], best[1]):
            best = (score, theta, rep)
    if best is None:
        raise ValueError("theta grid contains no positive value")
    return best[1], best[2], time.perf_counter() - t0

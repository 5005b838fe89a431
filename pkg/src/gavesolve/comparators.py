"""Comparator iterations for Ax - B|x| = b.

All methods here are dense solvers built on LAPACK factorizations; sparse
problems are densified on entry.  Methods with a constant iteration matrix
(Picard, MN, SSMN, and the two-sequence GNMS/RMS/FPI) factor once and reuse
the factorization; GN and MNMS solve a fresh linear system every step
because their matrix depends on the current sign pattern.
"""

from __future__ import annotations

import dataclasses
import time
import warnings

import numpy as np
import scipy.linalg
from numpy.linalg import LinAlgError

from .solvers import (
    GaveProblem,
    SolveReport,
    SolverConfig,
    _iterate,
    _resolve_x0,
    relative_residual,
    solve_ggs,
)


def _dense_parts(problem: GaveProblem):
    a = problem.a.toarray() if problem.is_sparse else problem.a
    b = problem.b_mat.toarray() if problem.is_sparse else problem.b_mat
    return a, b, problem.rhs


def _lu(a: np.ndarray):
    """LU-factor, raising LinAlgError on a singular pivot instead of warning."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    if (np.diag(lu) == 0.0).any():
        raise LinAlgError("matrix is singular")
    return lu, piv


def _lu_solve(fac, rhs):
    return scipy.linalg.lu_solve(fac, rhs, check_finite=False)


def _gave_setup(problem, config):
    a, b, rhs = _dense_parts(problem)
    x0 = _resolve_x0(config.x0, problem.n)
    residual_fn = lambda x: relative_residual(problem, x)
    return a, b, rhs, x0, residual_fn


def solve_picard(problem: GaveProblem, config: SolverConfig | None = None) -> SolveReport:
    """Fixed-point iteration x <- A^{-1}(B|x| + b); A is factored once."""
    config = config or SolverConfig()
    t0 = time.perf_counter()
    a, b, rhs, x0, residual_fn = _gave_setup(problem, config)
    fac = _lu(a)

    def step(x):
        return _lu_solve(fac, b @ np.abs(x) + rhs)

    return _iterate(step, x0, residual_fn, config, "picard", t_start=t0)


def solve_mn(problem: GaveProblem, config: SolverConfig | None = None) -> SolveReport:
    """Shifted fixed-point update x <- (A+W)^{-1}(W x + B|x| + b).

    W is the diagonal shift from the config (default 0.5 * diag(A)); with
    W = 0 the iterate sequence coincides with Picard's.
    """
    config = config or SolverConfig()
    t0 = time.perf_counter()
    a, b, rhs, x0, residual_fn = _gave_setup(problem, config)
    omega = config.omega_vector(np.diag(a))
    shifted = a.copy()
    idx = np.arange(problem.n)
    shifted[idx, idx] += omega
    fac = _lu(shifted)

    def step(x):
        return _lu_solve(fac, omega * x + b @ np.abs(x) + rhs)

    return _iterate(step, x0, residual_fn, config, "mn", t_start=t0)


def solve_ssmn(problem: GaveProblem, config: SolverConfig | None = None) -> SolveReport:
    """Shift-splitting update x <- (A+W)^{-1}((W-A)x + 2B|x| + 2b)."""
    config = config or SolverConfig()
    t0 = time.perf_counter()
    a, b, rhs, x0, residual_fn = _gave_setup(problem, config)
    omega = config.omega_vector(np.diag(a))
    idx = np.arange(problem.n)
    shifted = a.copy()
    shifted[idx, idx] += omega
    fac = _lu(shifted)
    omega_minus_a = -a
    omega_minus_a[idx, idx] += omega
    two_rhs = 2.0 * rhs

    def step(x):
        return _lu_solve(fac, omega_minus_a @ x + 2.0 * (b @ np.abs(x)) + two_rhs)

    return _iterate(step, x0, residual_fn, config, "ssmn", t_start=t0)


def solve_gn(problem: GaveProblem, config: SolverConfig | None = None) -> SolveReport:
    """Generalized Newton: x <- (A - B diag(sign(x)))^{-1} b, refactoring each step.

    sign(0) is taken as 0.  A singular Jacobian at some iterate terminates
    the run as a numerical breakdown.
    """
    config = config or SolverConfig()
    t0 = time.perf_counter()
    a, b, rhs, x0, residual_fn = _gave_setup(problem, config)

    def step(x):
        return np.linalg.solve(a - b * np.sign(x), rhs)

    return _iterate(step, x0, residual_fn, config, "gn", t_start=t0)


def _gs_like_split(a: np.ndarray):
    """The splitting A = M - N with M = diag(A) + (3/4) strict-lower(A)."""
    strict_lower = np.tril(a, -1)
    m_mat = np.diag(np.diag(a)) + 0.75 * strict_lower
    n_mat = -(0.25 * strict_lower + np.triu(a, 1))
    return m_mat, n_mat


def solve_mnms(problem: GaveProblem, config: SolverConfig | None = None) -> SolveReport:
    """Sign-dependent splitting update, refactoring each step.

    Splits A = M1 - N1 and B = M2 - N2 with M1 = D_A + (3/4) strict-lower(A)
    and M2 = D_B + (1/4) strict-lower(B), then iterates
    x <- (W + M1 - M2 diag(sign x))^{-1} (W x + N1 x - N2 |x| + b).
    """
    config = config or SolverConfig()
    t0 = time.perf_counter()
    a, b, rhs, x0, residual_fn = _gave_setup(problem, config)
    m1, n1 = _gs_like_split(a)
    b_strict_lower = np.tril(b, -1)
    m2 = np.diag(np.diag(b)) + 0.25 * b_strict_lower
    n2 = -(0.75 * b_strict_lower + np.triu(b, 1))
    omega = config.omega_vector(np.diag(a))
    idx = np.arange(problem.n)
    base = m1.copy()
    base[idx, idx] += omega

    def step(x):
        k = base - m2 * np.sign(x)
        return np.linalg.solve(k, omega * x + n1 @ x - n2 @ np.abs(x) + rhs)

    return _iterate(step, x0, residual_fn, config, "mnms", t_start=t0)


def _check_triangular_nonsingular(a_diag: np.ndarray):
    if (a_diag == 0.0).any():
        i = int(np.argmax(a_diag == 0.0))
        raise LinAlgError(f"splitting matrix is singular: zero diagonal at index {i}")


def _tri_solve(m_mat, rhs):
    return scipy.linalg.solve_triangular(m_mat, rhs, lower=True, check_finite=False)


def _gnms_core(problem, config, b, rhs, m_mat, n_mat, t0) -> SolveReport:
    x0 = _resolve_x0(config.x0, problem.n)
    residual_fn = lambda x: relative_residual(problem, x)
    q1, q2, tau = config.q1_scale, config.q2_scale, config.tau
    if q1 == 0.0:
        raise ValueError("q1_scale must be nonzero")
    y = rhs.copy() if config.y0_rule == "rhs" else np.zeros(problem.n)

    def step(x):
        nonlocal y
        y_next = (1.0 - tau) * y + tau * ((q2 * y + np.abs(x)) / q1)
        x_next = _tri_solve(m_mat, n_mat @ x + b @ (q1 * y_next) - b @ (q2 * y) + rhs)
        y = y_next
        return x_next

    return _iterate(step, x0, residual_fn, config, "gnms", t_start=t0)


def solve_gnms(problem: GaveProblem, config: SolverConfig | None = None) -> SolveReport:
    """Two-sequence splitting method with relaxed auxiliary update.

    y <- (1-tau) y + tau Q1^{-1}(Q2 y + |x|), then
    x <- M^{-1}(N x + B Q1 y_new - B Q2 y_old + b), with Q1 = q1_scale * I,
    Q2 = q2_scale * I (defaults 10 and 0.5) and the 3/4-lower splitting of A.
    """
    config = config or SolverConfig()
    t0 = time.perf_counter()
    a, b, rhs = _dense_parts(problem)
    _check_triangular_nonsingular(np.diag(a))
    m_mat, n_mat = _gs_like_split(a)
    return _gnms_core(problem, config, b, rhs, m_mat, n_mat, t0)


def _rms_core(problem, config, b, rhs, m_mat, n_mat, t0) -> SolveReport:
    x0 = _resolve_x0(config.x0, problem.n)
    residual_fn = lambda x: relative_residual(problem, x)
    tau = config.tau
    y = rhs.copy() if config.y0_rule == "rhs" else np.zeros(problem.n)

    def step(x):
        nonlocal y
        x_next = _tri_solve(m_mat, n_mat @ x + b @ y + rhs)
        y = (1.0 - tau) * y + tau * np.abs(x_next)
        return x_next

    return _iterate(step, x0, residual_fn, config, "rms", t_start=t0)


def solve_rms(problem: GaveProblem, config: SolverConfig | None = None) -> SolveReport:
    """Relaxation method: x <- M^{-1}(N x + B y + b), y <- (1-tau) y + tau |x|."""
    config = config or SolverConfig()
    t0 = time.perf_counter()
    a, b, rhs = _dense_parts(problem)
    _check_triangular_nonsingular(np.diag(a))
    m_mat, n_mat = _gs_like_split(a)
    return _rms_core(problem, config, b, rhs, m_mat, n_mat, t0)


def _fpi_core(problem, config, b, rhs, fac, t0) -> SolveReport:
    x0 = _resolve_x0(config.x0, problem.n)
    residual_fn = lambda x: relative_residual(problem, x)
    tau = config.tau
    y = rhs.copy() if config.y0_rule == "rhs" else np.zeros(problem.n)

    def step(x):
        nonlocal y
        x_next = _lu_solve(fac, b @ y + rhs)
        y = (1.0 - tau) * y + tau * np.abs(x_next)
        return x_next

    return _iterate(step, x0, residual_fn, config, "fpi", t_start=t0)


def solve_fpi(problem: GaveProblem, config: SolverConfig | None = None) -> SolveReport:
    """Relaxed fixed-point method: x <- A^{-1}(B y + b), y <- (1-tau) y + tau |x|."""
    config = config or SolverConfig()
    t0 = time.perf_counter()
    a, b, rhs = _dense_parts(problem)
    fac = _lu(a)
    return _fpi_core(problem, config, b, rhs, fac, t0)


GAVE_SOLVERS = {
    "ggs": solve_ggs,
    "picard": solve_picard,
    "mn": solve_mn,
    "ssmn": solve_ssmn,
    "gn": solve_gn,
    "mnms": solve_mnms,
    "gnms": solve_gnms,
    "rms": solve_rms,
    "fpi": solve_fpi,
}

TAU_METHODS = ("gnms", "rms", "fpi")


def sweep_optimal_tau(
    problem: GaveProblem,
    config: SolverConfig,
    grid,
    method: str,
) -> tuple[float, SolveReport, float]:
    """Pick the relaxation weight with the fewest iterations over a grid.

    Runs the method once per admissible tau (values outside (0, 2] are
    skipped), reusing the expensive setup across the sweep.  Non-converged
    runs count as max_iter iterations; ties go to the smallest tau.
    Returns (tau_opt, report at tau_opt, total sweep seconds).
    """
    if method not in TAU_METHODS:
        raise ValueError(f"{method!r} takes no relaxation parameter")
    grid = [float(t) for t in grid]
    if not grid:
        raise ValueError("tau grid must be nonempty")
    t0 = time.perf_counter()
    a, b, rhs = _dense_parts(problem)
    if method == "fpi":
        fac = _lu(a)
    else:
        _check_triangular_nonsingular(np.diag(a))
        m_mat, n_mat = _gs_like_split(a)
    best: tuple[float, float, SolveReport] | None = None
    for tau in grid:
        if not 0.0 < tau <= 2.0:
            continue
        cfg = dataclasses.replace(config, tau=tau)
        if method == "fpi":
            rep = _fpi_core(problem, cfg, b, rhs, fac, time.perf_counter())
        elif method == "rms":
            rep = _rms_core(problem, cfg, b, rhs, m_mat, n_mat, time.perf_counter())
        else:
            rep = _gnms_core(problem, cfg, b, rhs, m_mat, n_mat, time.perf_counter())
        score = rep.iterations if rep.converged else config.max_iter
        if best is None or (score, tau) < (best[0], best[1]):
            best = (score, tau, rep)
    if best is None:
        raise ValueError("tau grid contains no value in (0, 2]")
    return best[1], best[2], time.perf_counter() - t0

"""Shared construction helpers for the test suite."""

import numpy as np

import gavesolve as g


def admissible_problem(rng, n, offdiag=0.3, b_diag=1.0):
    """Random dense problem whose comparison matrix minus |B| is strictly
    diagonally dominant, so both convergence conditions hold and the sweep
    precondition diag(A) > |diag(B)| is satisfied."""
    a = rng.uniform(-1.0, 1.0, (n, n)) * (offdiag / n)
    np.fill_diagonal(a, rng.uniform(4.0, 6.0, n))
    b = rng.uniform(-1.0, 1.0, (n, n)) * (offdiag / n)
    np.fill_diagonal(b, rng.uniform(-b_diag, b_diag, n))
    rhs = rng.uniform(-5.0, 5.0, n)
    return g.GaveProblem(a, b, rhs)


def sweepable_problem(rng, n, offdiag=2.0):
    """Random dense problem satisfying only the sweep precondition
    diag(A) > |diag(B)|; the off-diagonal parts are unconstrained, so the
    iteration need not converge."""
    a = rng.uniform(-offdiag, offdiag, (n, n))
    np.fill_diagonal(a, rng.uniform(1.0, 3.0, n))
    b = rng.uniform(-offdiag, offdiag, (n, n)) * 0.5
    np.fill_diagonal(b, np.diag(a) * rng.uniform(-0.9, 0.9, n))
    rhs = rng.uniform(-3.0, 3.0, n)
    return g.GaveProblem(a, b, rhs)


def lower_triangular_gave_residual(problem, x_prev, x_next):
    """Residual of the triangular system one GGS sweep is meant to solve."""
    a = problem.a if not problem.is_sparse else problem.a.toarray()
    b = problem.b_mat if not problem.is_sparse else problem.b_mat.toarray()
    lhs = np.tril(a) @ x_next - np.tril(b) @ np.abs(x_next)
    rhs = -np.triu(a, 1) @ x_prev + np.triu(b, 1) @ np.abs(x_prev) + problem.rhs
    return float(np.max(np.abs(lhs - rhs)))

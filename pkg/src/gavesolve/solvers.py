"""Core problem types and the generalized Gauss-Seidel (GGS) solver.

The central problem is Ax - B|x| = b with |x| taken componentwise.  GGS
performs a forward sweep that solves one scalar equation
``a_ii * x - b_ii * |x| = s`` per component and needs no tuning parameter.
Two executable convergence checks are provided: a norm-based condition on
the triangular parts, and an M-matrix condition on <A> - |B|.  A sign
enumeration oracle gives an independent reference for small systems.
"""

from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from numpy.linalg import LinAlgError

from . import _kernels
from .linalg import as_matrix, as_vector, comparison_matrix, abs_matrix, is_m_matrix


class Termination(enum.Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    NUMERICAL_BREAKDOWN = "numerical_breakdown"


class DiagonalDominanceError(ValueError):
    """diag(A) fails to strictly dominate |diag(B)| at some row."""

    def __init__(self, index: int, a_ii: float, b_ii: float):
        self.index = index
        super().__init__(
            f"need diag(A) > |diag(B)| for the componentwise sweep; "
            f"row {index} has a_ii={a_ii:g}, b_ii={b_ii:g}"
        )


def _coerce_square(m, name: str):
    if sp.issparse(m):
        out = m.tocsr().astype(np.float64)
        if not np.isfinite(out.data).all():
            raise ValueError(f"{name}: entries must be finite (no NaN/Inf)")
        out.sort_indices()
    else:
        out = as_matrix(m)
    if out.shape[0] != out.shape[1]:
        raise ValueError(f"{name}: must be square, got shape {out.shape}")
    return out


@dataclass(eq=False)
class GaveProblem:
    """The triple (A, B, b) defining Ax - B|x| = b.

    A and B must both be dense arrays or both scipy.sparse matrices
    (generators use CSR for the large block-structured instances).
    """

    a: np.ndarray | sp.spmatrix
    b_mat: np.ndarray | sp.spmatrix
    rhs: np.ndarray

    def __post_init__(self):
        self.a = _coerce_square(self.a, "a")
        self.b_mat = _coerce_square(self.b_mat, "b_mat")
        self.rhs = as_vector(self.rhs)
        if sp.issparse(self.a) != sp.issparse(self.b_mat):
            raise ValueError("a and b_mat must use the same storage (both dense or both sparse)")
        n = self.a.shape[0]
        if self.b_mat.shape[0] != n or self.rhs.shape[0] != n:
            raise ValueError(
                f"dimension mismatch: a is {self.a.shape}, b_mat is "
                f"{self.b_mat.shape}, rhs has length {self.rhs.shape[0]}"
            )

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.a)

    def diagonals(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.asarray(self.a.diagonal(), dtype=np.float64),
            np.asarray(self.b_mat.diagonal(), dtype=np.float64),
        )


@dataclass(frozen=True, eq=False)
class SolverConfig:
    """Shared solver knobs.

    ``x0`` is an explicit start vector or a rule name ("zeros", "alt10").
    ``tau`` is the relaxation weight of the two-sequence methods; ``omega_scale``
    scales diag(A) into the shift matrix unless an explicit ``omega_diag`` is
    given; ``q1_scale``/``q2_scale`` parameterize the auxiliary update of the
    Newton-based splitting method.  The GGS solver reads none of these.
    """

    tol: float = 1e-8
    max_iter: int = 100
    x0: np.ndarray | str = "zeros"
    tau: float = 1.0
    omega_scale: float = 0.5
    omega_diag: np.ndarray | None = None
    y0_rule: str = "rhs"
    q1_scale: float = 10.0
    q2_scale: float = 0.5
    record_iterates: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not 0.0 < self.tau <= 2.0:
            raise ValueError("tau must lie in (0, 2]")
        if self.y0_rule not in ("rhs", "zeros"):
            raise ValueError(f"unknown y0_rule {self.y0_rule!r}")

    def omega_vector(self, a_diag: np.ndarray) -> np.ndarray:
        """The diagonal of the shift matrix: explicit, or omega_scale * diag(A)."""
        if self.omega_diag is not None:
            om = as_vector(self.omega_diag)
            if om.shape[0] != a_diag.shape[0]:
                raise ValueError("omega_diag length does not match the problem size")
            return om
        return self.omega_scale * a_diag


@dataclass(eq=False)
class SolveReport:
    """Outcome of one solver run.

    ``residual_history[0]`` is the residual of the initial guess, so the
    list always has ``iterations + 1`` entries.
    """

    method: str
    iterations: int
    residual_history: list[float]
    final_x: np.ndarray
    wall_time_seconds: float
    termination: Termination
    x_history: list[np.ndarray] | None = field(default=None, repr=False)

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1]

    @property
    def converged(self) -> bool:
        return self.termination is Termination.CONVERGED

    def to_record(self) -> dict:
        return {
            "method": self.method,
            "n": int(self.final_x.shape[0]),
            "IT": self.iterations,
            "RES": self.final_residual,
            "wall_time": self.wall_time_seconds,
            "termination": self.termination.value,
        }


def scalar_branch_solve(a: float, b: float, c: float) -> float:
    """Solve a*x - b*|x| = c for the unique real root, assuming a > |b|.

    The sign of c selects the branch: x = c/(a-b) when c >= 0, else
    x = c/(a+b); a > |b| makes either denominator positive and the branch
    choice self-consistent.
    """
    if not a > abs(b):
        raise ValueError(f"unique solvability needs a > |b|, got a={a:g}, b={b:g}")
    if c >= 0:
        return c / (a - b)
    return c / (a + b)


def relative_residual(problem: GaveProblem, x: np.ndarray) -> float:
    """||Ax - B|x| - b||_2 / ||b||_2 (absolute when b is the zero vector)."""
    r = problem.a @ x - problem.b_mat @ np.abs(x) - problem.rhs
    denom = float(np.linalg.norm(problem.rhs))
    nr = float(np.linalg.norm(r))
    return nr / denom if denom > 0 else nr


def _resolve_x0(x0, n: int) -> np.ndarray:
    if isinstance(x0, str):
        from .problems import default_x0

        return default_x0(x0, n)
    v = as_vector(x0)
    if v.shape[0] != n:
        raise ValueError(f"x0 has length {v.shape[0]}, problem has n={n}")
    return v.copy()


def _iterate(step, x0, residual_fn, config, method, t_start=None):
    """Run a fixed-point iteration with the shared stopping and reporting rules.

    Stops when the residual drops to config.tol or max_iter is hit; a
    non-finite iterate or a singular solve inside ``step`` ends the run with
    NUMERICAL_BREAKDOWN instead of raising, so parameter sweeps survive bad
    parameter values.
    """
    if t_start is None:
        t_start = time.perf_counter()
    x = np.array(x0, dtype=np.float64, copy=True)
    history = [float(residual_fn(x))]
    iterates = [x.copy()] if config.record_iterates else None
    iterations = 0
    termination = Termination.MAX_ITERATIONS
    if history[0] <= config.tol:
        termination = Termination.CONVERGED
    else:
        for k in range(1, config.max_iter + 1):
            iterations = k
            try:
                x = step(x)
            except LinAlgError:
                history.append(float("nan"))
                termination = Termination.NUMERICAL_BREAKDOWN
                break
            if iterates is not None:
                iterates.append(np.array(x, copy=True))
            if not np.isfinite(x).all():
                history.append(float("nan"))
                termination = Termination.NUMERICAL_BREAKDOWN
                break
            res = float(residual_fn(x))
            history.append(res)
            if res <= config.tol:
                termination = Termination.CONVERGED
                break
    return SolveReport(
        method=method,
        iterations=iterations,
        residual_history=history,
        final_x=x,
        wall_time_seconds=time.perf_counter() - t_start,
        termination=termination,
        x_history=iterates,
    )


def _ggs_sweep_runner(problem: GaveProblem):
    """Validate the diagonal condition and return a closure running one sweep."""
    a_diag, b_diag = problem.diagonals()
    bad = ~(a_diag > np.abs(b_diag))
    if bad.any():
        i = int(np.argmax(bad))
        raise DiagonalDominanceError(i, a_diag[i], b_diag[i])
    _kernels.warmup()
    rhs = problem.rhs
    if problem.is_sparse:
        a, b = problem.a, problem.b_mat

        def run(x_prev, x_next):
            _kernels.ggs_sweep_csr(
                a.data, a.indices, a.indptr, a_diag,
                b.data, b.indices, b.indptr, b_diag,
                rhs, x_prev, x_next,
            )

    else:
        a, b = problem.a, problem.b_mat

        def run(x_prev, x_next):
            _kernels.ggs_sweep_dense(a, b, rhs, x_prev, x_next)

    return run


def ggs_sweep(problem: GaveProblem, x_prev: np.ndarray) -> np.ndarray:
    """One forward GGS sweep.

    Components are updated in order i = 1..n; each solves the scalar branch
    equation with the already-updated components on the left of i and the
    previous iterate on the right.  The result exactly solves the lower
    triangular system (D_A - L_A) x - (D_B - L_B)|x| = U_A x_prev - U_B |x_prev| + b.
    """
    run = _ggs_sweep_runner(problem)
    x_prev = as_vector(x_prev)
    if x_prev.shape[0] != problem.n:
        raise ValueError("x_prev length does not match the problem size")
    x_next = np.empty_like(x_prev)
    run(x_prev, x_next)
    return x_next


def solve_ggs(
    problem: GaveProblem,
    config: SolverConfig | None = None,
    residual_fn=None,
    method: str = "ggs",
) -> SolveReport:
    """Solve Ax - B|x| = b by repeated GGS sweeps.

    Parameter-free: the config's relaxation/shift fields are ignored.
    ``residual_fn`` overrides the stopping residual (the LCP pipeline passes
    a complementarity residual); the default is :func:`relative_residual`.
    """
    config = config or SolverConfig()
    run = _ggs_sweep_runner(problem)
    x0 = _resolve_x0(config.x0, problem.n)
    if residual_fn is None:
        residual_fn = lambda x: relative_residual(problem, x)

    def step(x):
        x_next = np.empty_like(x)
        run(x, x_next)
        return x_next

    return _iterate(step, x0, residual_fn, config, method)


@dataclass(frozen=True)
class Theorem31Result:
    """Outcome of the norm-based convergence check.

    ``inf_norm_value`` is the sum of the three triangular-solve norms; the
    check passes when the diagonal condition, strict row dominance of
    D_A - |L_A| - D_B - |L_B|, and inf_norm_value < 1 all hold.
    """

    holds: bool
    inf_norm_value: float
    dominance_holds: bool
    diagonal_ok: bool


def _abs_rowsum_of_tri_solve(lower: np.ndarray, source: np.ndarray, part: str,
                             block: int = 256) -> float:
    """inf-norm of lower^{-1} C without materializing all of C or the result.

    C is built from ``source`` column-block by column-block: its strict upper
    triangle ("upper") or its diagonal plus |strict lower| ("diag_abslower").
    """
    n = lower.shape[0]
    acc = np.zeros(n)
    src_diag = np.asarray(source.diagonal()).copy()
    for j0 in range(0, n, block):
        j1 = min(j0 + block, n)
        cols = np.array(source[:, j0:j1], dtype=np.float64)
        if part == "upper":
            cols = np.triu(cols, 1 - j0)
        else:
            cols = np.tril(np.abs(cols), -1 - j0)
            for j in range(j0, j1):
                cols[j, j - j0] = src_diag[j]
        x = scipy.linalg.solve_triangular(lower, cols, lower=True)
        acc += np.abs(x).sum(axis=1)
    return float(acc.max())


def check_theorem31(problem: GaveProblem) -> Theorem31Result:
    """Evaluate the norm-based sufficient condition for GGS convergence.

    Computes ||(D_A-L_A)^{-1} U_A||_inf + ||(D_A-L_A)^{-1} U_B||_inf
    + ||(D_A-L_A)^{-1}(D_B+|L_B|)||_inf by forward substitution, plus the
    strict row-dominance test of D_A - |L_A| - D_B - |L_B| and the diagonal
    condition diag(A) > |diag(B)|.
    """
    a = problem.a.toarray() if problem.is_sparse else problem.a
    b = problem.b_mat.toarray() if problem.is_sparse else problem.b_mat
    da = np.diag(a).copy()
    db = np.diag(b).copy()
    if (da == 0.0).any():
        i = int(np.argmax(da == 0.0))
        raise LinAlgError(f"D_A - L_A is singular: zero diagonal at index {i}")
    diagonal_ok = bool((da > np.abs(db)).all())

    n = problem.n
    lower_abs = np.empty(n)
    for i in range(n):
        lower_abs[i] = np.abs(a[i, :i]).sum() + np.abs(b[i, :i]).sum()
    dominance_holds = bool((np.abs(da - db) > lower_abs).all())

    lower = np.tril(a)
    norm_ua = _abs_rowsum_of_tri_solve(lower, a, "upper")
    norm_ub = _abs_rowsum_of_tri_solve(lower, b, "upper")
    norm_db_lb = _abs_rowsum_of_tri_solve(lower, b, "diag_abslower")
    inf_norm_value = norm_ua + norm_ub + norm_db_lb
    holds = diagonal_ok and dominance_holds and inf_norm_value < 1.0
    return Theorem31Result(
        holds=holds,
        inf_norm_value=inf_norm_value,
        dominance_holds=dominance_holds,
        diagonal_ok=diagonal_ok,
    )


def check_theorem32(problem: GaveProblem, tol: float | None = None) -> bool:
    """True iff diag(A) > |diag(B)| and <A> - |B| is an M-matrix."""
    da, db = problem.diagonals()
    if not (da > np.abs(db)).all():
        return False
    if problem.is_sparse:
        comp = sp.diags(2.0 * np.abs(da)) - abs(problem.a)
        arg = (comp - abs(problem.b_mat)).tocsr()
    else:
        arg = comparison_matrix(problem.a) - abs_matrix(problem.b_mat)
    return is_m_matrix(arg, tol)


def oracle_sign_enumeration(problem: GaveProblem, max_n: int = 20) -> list[np.ndarray]:
    """Find all solutions of Ax - B|x| = b by enumerating sign patterns.

    For each s in {-1,+1}^n the linear system (A - B diag(s)) x = b is solved
    and x is accepted when s_i * x_i >= 0 for all i (a zero component is
    consistent with either sign).  Singular branches are skipped; duplicate
    solutions are merged at 1e-10.  Cost is 2^n linear solves, so n is capped.
    """
    n = problem.n
    if n > max_n:
        raise ValueError(f"sign enumeration needs 2^n solves; n={n} exceeds the cap {max_n}")
    a = problem.a.toarray() if problem.is_sparse else problem.a
    b = problem.b_mat.toarray() if problem.is_sparse else problem.b_mat
    rhs = problem.rhs
    solutions: list[np.ndarray] = []
    for signs in itertools.product((1.0, -1.0), repeat=n):
        s = np.array(signs)
        try:
            x = np.linalg.solve(a - b * s, rhs)
        except LinAlgError:
            continue
        if not np.isfinite(x).all():
            continue
        if ((s * x) >= 0.0).all():
            if not any(np.max(np.abs(x - y)) <= 1e-10 for y in solutions):
                solutions.append(x)
    return solutions

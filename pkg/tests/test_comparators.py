import numpy as np
import pytest
import scipy.linalg
from numpy.linalg import LinAlgError

import gavesolve as g
from gavesolve import (
    GaveProblem,
    SolverConfig,
    Termination,
    oracle_sign_enumeration,
    solve_fpi,
    solve_gn,
    solve_gnms,
    solve_mn,
    solve_mnms,
    solve_picard,
    solve_rms,
    solve_ssmn,
    sweep_optimal_tau,
)
from helpers import admissible_problem

ALL = [solve_picard, solve_mn, solve_ssmn, solve_gn, solve_mnms, solve_gnms, solve_rms, solve_fpi]


def exact_solution(problem):
    sols = oracle_sign_enumeration(problem)
    assert len(sols) == 1
    return sols[0]


class TestPicard:
    def test_positive_fixed_point(self):
        p = GaveProblem(2 * np.eye(4), np.eye(4), np.ones(4))
        rep = solve_picard(p, SolverConfig(tol=1e-12))
        assert rep.converged
        assert np.allclose(rep.final_x, np.ones(4), atol=1e-12)

    def test_zero_b_is_direct_solve(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(5, 5)) + 5 * np.eye(5)
        rhs = rng.normal(size=5)
        p = GaveProblem(a, np.zeros((5, 5)), rhs)
        rep = solve_picard(p, SolverConfig(tol=1e-10))
        assert rep.iterations == 1
        assert np.allclose(rep.final_x, np.linalg.solve(a, rhs), atol=1e-12)

    def test_singular_a_raises(self):
        p = GaveProblem(np.zeros((2, 2)), np.eye(2) * 0.0, np.ones(2))
        with pytest.raises(LinAlgError):
            solve_picard(p)


class TestMn:
    def test_omega_zero_reduces_to_picard(self):
        rng = np.random.default_rng(42)
        for _ in range(3):
            p = admissible_problem(rng, 12)
            cfg = SolverConfig(tol=1e-300, max_iter=30, record_iterates=True)
            mn = solve_mn(p, SolverConfig(tol=1e-300, max_iter=30, record_iterates=True,
                                          omega_scale=0.0))
            pic = solve_picard(p, cfg)
            assert mn.iterations == pic.iterations
            for xa, xb in zip(mn.x_history, pic.x_history):
                assert np.max(np.abs(xa - xb)) <= 1e-15

    def test_identity_shift(self):
        p = GaveProblem(2 * np.eye(3), np.eye(3), np.ones(3))
        rep = solve_mn(p, SolverConfig(tol=1e-12, omega_diag=np.ones(3)))
        assert rep.converged
        assert np.allclose(rep.final_x, np.ones(3), atol=1e-12)


class TestSsmn:
    def test_fixed_point_identity(self):
        rng = np.random.default_rng(3)
        p = admissible_problem(rng, 8)
        x_star = exact_solution(p)
        rep = solve_ssmn(p, SolverConfig(tol=1e-300, max_iter=1, x0=x_star,
                                         record_iterates=True))
        scale = np.max(np.abs(x_star)) + 1.0
        assert np.max(np.abs(rep.x_history[1] - x_star)) <= 1e-12 * scale


class TestGn:
    def test_exact_after_sign_pattern_fixed(self):
        p = GaveProblem(2 * np.eye(4), np.eye(4), np.ones(4))
        rep = solve_gn(p, SolverConfig(tol=1e-12, x0=np.ones(4)))
        assert rep.converged
        assert rep.iterations <= 2
        assert np.allclose(rep.final_x, np.ones(4), atol=1e-14)

    def test_singular_jacobian_is_breakdown(self):
        a = np.array([[1.0, 1.0], [1.0, 1.0]])
        p = GaveProblem(a, np.zeros((2, 2)), np.ones(2))
        rep = solve_gn(p)
        assert rep.termination is Termination.NUMERICAL_BREAKDOWN
        assert rep.iterations == 1


class TestMnms:
    def test_fixed_point_identity(self):
        rng = np.random.default_rng(6)
        p = admissible_problem(rng, 8)
        x_star = exact_solution(p)
        rep = solve_mnms(p, SolverConfig(tol=1e-300, max_iter=1, x0=x_star,
                                         record_iterates=True))
        scale = np.max(np.abs(x_star)) + 1.0
        assert np.max(np.abs(rep.x_history[1] - x_star)) <= 1e-12 * scale


class TestGnms:
    def test_reduction_to_splitting_picard(self):
        # With tau=1, Q1=I, Q2=0 the auxiliary sequence is y = |x|, so the
        # update must equal x <- M^{-1}(N x + B|x| + b) step for step.
        rng = np.random.default_rng(10)
        p = admissible_problem(rng, 9)
        cfg = SolverConfig(tol=1e-300, max_iter=25, tau=1.0, q1_scale=1.0,
                           q2_scale=0.0, record_iterates=True)
        rep = solve_gnms(p, cfg)
        a, b = p.a, p.b_mat
        m_mat = np.diag(np.diag(a)) + 0.75 * np.tril(a, -1)
        n_mat = -(0.25 * np.tril(a, -1) + np.triu(a, 1))
        x = np.zeros(9)
        for k in range(1, 26):
            x = scipy.linalg.solve_triangular(
                m_mat, n_mat @ x + b @ np.abs(x) + p.rhs, lower=True, check_finite=False
            )
            assert np.max(np.abs(rep.x_history[k] - x)) <= 1e-15


class TestRms:
    def test_reduces_to_classical_splitting(self):
        rng = np.random.default_rng(11)
        a = rng.uniform(-0.2, 0.2, (6, 6))
        np.fill_diagonal(a, rng.uniform(3.0, 4.0, 6))
        rhs = rng.normal(size=6)
        p = GaveProblem(a, np.zeros((6, 6)), rhs)
        rep = solve_rms(p, SolverConfig(tol=1e-12, tau=1.0))
        assert rep.converged
        assert np.allclose(rep.final_x, np.linalg.solve(a, rhs), atol=1e-10)


class TestFpi:
    def test_two_step_convergence_on_diagonal(self):
        p = GaveProblem(2 * np.eye(4), np.eye(4), np.ones(4))
        rep = solve_fpi(p, SolverConfig(tol=1e-12, tau=1.0))
        assert rep.converged
        assert rep.iterations <= 2
        assert np.allclose(rep.final_x, np.ones(4), atol=1e-14)


class TestCrossMethodAgreement:
    def test_all_methods_reach_the_oracle_solution(self):
        rng = np.random.default_rng(2718)
        for _ in range(4):
            p = admissible_problem(rng, 10)
            x_star = exact_solution(p)
            for solver in ALL:
                rep = solver(p, SolverConfig(tol=1e-12, max_iter=2000))
                assert rep.converged, solver.__name__
                assert np.max(np.abs(rep.final_x - x_star)) <= 1e-8, solver.__name__


class TestTauSweep:
    def test_singleton_grid(self):
        rng = np.random.default_rng(1)
        p = admissible_problem(rng, 8)
        tau, rep, secs = sweep_optimal_tau(p, SolverConfig(tol=1e-9), [0.9], "fpi")
        assert tau == 0.9
        assert rep.converged
        assert secs >= 0

    def test_out_of_range_values_skipped(self):
        rng = np.random.default_rng(2)
        p = admissible_problem(rng, 8)
        tau, _, _ = sweep_optimal_tau(p, SolverConfig(tol=1e-9), [0.0, -1.0, 1.0], "rms")
        assert tau == 1.0
        with pytest.raises(ValueError, match="no value"):
            sweep_optimal_tau(p, SolverConfig(tol=1e-9), [0.0, 2.5], "rms")

    def test_unknown_method(self):
        rng = np.random.default_rng(3)
        p = admissible_problem(rng, 6)
        with pytest.raises(ValueError, match="relaxation"):
            sweep_optimal_tau(p, SolverConfig(), [1.0], "picard")

    def test_picks_fewest_iterations(self):
        rng = np.random.default_rng(4)
        p = admissible_problem(rng, 10)
        grid = [0.5, 0.8, 1.0, 1.2]
        tau, rep, _ = sweep_optimal_tau(p, SolverConfig(tol=1e-10), grid, "fpi")
        its = {}
        for t in grid:
            r = solve_fpi(p, SolverConfig(tol=1e-10, tau=t))
            its[t] = r.iterations if r.converged else 100
        assert its[tau] == min(its.values())
        assert tau == min(t for t in grid if its[t] == its[tau])
        assert rep.iterations == its[tau]

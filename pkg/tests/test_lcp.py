import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.linalg import LinAlgError

import gavesolve as g
from gavesolve import (
    BlockTridiagonalSpec,
    LcpProblem,
    ModulusConfig,
    SolverConfig,
    gen_lcp_example,
    lcp_residual,
    lcp_to_gave,
    recover_z,
    solve_amgs,
    solve_ggs,
    solve_ggs_lcp,
    sweep_optimal_theta,
)


def example_lcp(m, pattern=(1.0, 2.0), mu=4.0):
    return gen_lcp_example(BlockTridiagonalSpec(m=m, mu=mu, z_star_pattern=pattern))


class TestReformulation:
    def test_direct_substitution(self):
        lcp = LcpProblem(np.eye(2), -np.ones(2))
        gave = lcp_to_gave(lcp, ModulusConfig(gamma=1.0, omega_diag=np.ones(2)))
        assert np.array_equal(gave.a, 2 * np.eye(2))
        assert np.array_equal(gave.b_mat, np.zeros((2, 2)))
        assert np.array_equal(gave.rhs, np.ones(2))

    def test_theta_rule(self):
        cfg = ModulusConfig(gamma=1.0, theta=1.0)
        assert np.array_equal(cfg.omega_vector(np.full(3, 4.0)), np.full(3, 4.0))

    def test_nonpositive_shift_rejected(self):
        lcp = LcpProblem(np.eye(2), np.ones(2))
        with pytest.raises(ValueError, match="strictly positive"):
            lcp_to_gave(lcp, ModulusConfig(gamma=1.0, theta=0.0))
        with pytest.raises(ValueError, match="strictly positive"):
            lcp_to_gave(lcp, ModulusConfig(gamma=1.0, omega_diag=np.array([1.0, -1.0])))

    def test_gamma_validation(self):
        with pytest.raises(ValueError, match="gamma"):
            ModulusConfig(gamma=0.0)

    def test_sparse_stays_sparse(self):
        lcp, _ = example_lcp(3)
        gave = lcp_to_gave(lcp, ModulusConfig(gamma=1.0, theta=0.5))
        assert gave.is_sparse
        md = lcp.m_mat.toarray()
        omega = 0.5 * np.diag(md)
        assert np.allclose(gave.a.toarray(), md + np.diag(omega), atol=0)
        assert np.allclose(gave.b_mat.toarray(), np.diag(omega) - md, atol=0)


class TestRecoverZ:
    def test_mixed_signs(self):
        assert np.array_equal(recover_z(np.array([1.0, -2.0]), 1.0), [2.0, 0.0])

    def test_nonpositive_input(self):
        assert np.array_equal(recover_z(np.array([-3.0, -0.5, 0.0]), 1.0), np.zeros(3))

    def test_gamma_scaling(self):
        assert np.array_equal(recover_z(np.array([3.0, -1.0]), 2.0), [3.0, 0.0])

    @given(arrays(np.float64, (6,), elements=st.floats(-1e6, 1e6, allow_nan=False)))
    def test_nonnegative(self, x):
        assert (recover_z(x, 0.7) >= 0).all()


class TestLcpResidual:
    def test_designed_solution_is_exact(self):
        lcp, z_star = example_lcp(4)
        assert lcp_residual(lcp, z_star) <= 1e-12

    def test_zero_z_with_nonnegative_q(self):
        lcp = LcpProblem(np.eye(3), np.array([1.0, 0.0, 2.0]))
        assert lcp_residual(lcp, np.zeros(3)) == 0.0

    def test_matches_direct_recomputation(self):
        rng = np.random.default_rng(123)
        m = rng.normal(size=(7, 7))
        q = rng.normal(size=7)
        z = rng.normal(size=7)
        lcp = LcpProblem(m, q)
        expected = np.linalg.norm(np.minimum(m @ z + q, z))
        assert lcp_residual(lcp, z) == pytest.approx(expected, rel=1e-15)


class TestAmgs:
    def test_identity_lcp(self):
        lcp = LcpProblem(np.eye(4), -np.ones(4))
        rep = solve_amgs(lcp, ModulusConfig(gamma=1.0, theta=1.0), SolverConfig(tol=1e-10))
        assert rep.converged
        z = recover_z(rep.final_x, 1.0)
        assert np.allclose(z, np.ones(4), atol=1e-9)
        assert lcp_residual(lcp, z) <= 1e-10

    def test_sweep_satisfies_update_equation(self):
        lcp, _ = example_lcp(3)
        cfg = ModulusConfig(gamma=1.0, theta=0.8)
        rep = solve_amgs(lcp, cfg, SolverConfig(tol=1e-8, x0="alt10", record_iterates=True))
        m = lcp.m_mat.toarray()
        dm = np.diag(np.diag(m))
        lm = -np.tril(m, -1)
        um = -np.triu(m, 1)
        omega = np.diag(cfg.omega_vector(np.diag(m)))
        scale = g.inf_norm(m) * max(np.max(np.abs(x)) for x in rep.x_history) + np.max(np.abs(lcp.q))
        for x_prev, x_next in zip(rep.x_history, rep.x_history[1:]):
            lhs = (dm - lm + omega) @ x_next
            rhs = (um @ x_prev + (omega - dm + um) @ np.abs(x_prev)
                   + lm @ np.abs(x_next) - cfg.gamma * lcp.q)
            assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale

    def test_dense_matches_sparse(self):
        lcp_sparse, _ = example_lcp(4)
        lcp_dense = LcpProblem(lcp_sparse.m_mat.toarray(), lcp_sparse.q)
        cfg = ModulusConfig(gamma=1.0, theta=0.9)
        sc = SolverConfig(tol=1e-9, x0="alt10")
        r1 = solve_amgs(lcp_sparse, cfg, sc)
        r2 = solve_amgs(lcp_dense, cfg, sc)
        assert r1.iterations == r2.iterations
        assert np.allclose(r1.final_x, r2.final_x, rtol=1e-13, atol=1e-13)

    def test_zero_pivot_rejected(self):
        lcp = LcpProblem(np.diag([1.0, -1.0]), np.ones(2))
        with pytest.raises(LinAlgError, match="pivot"):
            solve_amgs(lcp, ModulusConfig(gamma=1.0, omega_diag=np.array([1.0, 1.0])),
                       SolverConfig())


class TestGgsLcp:
    def test_recovers_designed_solution(self):
        lcp, z_star = example_lcp(10)
        rep = solve_ggs_lcp(lcp, ModulusConfig(gamma=1.0, theta=1.0),
                            SolverConfig(tol=1e-5, max_iter=100, x0="alt10"))
        assert rep.converged
        z = recover_z(rep.final_x, 1.0)
        assert np.max(np.abs(z - z_star)) <= 1e-4
        assert lcp_residual(lcp, z) <= 1e-5

    def test_theta_independence_of_iteration_count(self):
        lcp, _ = example_lcp(20)
        its = set()
        for theta in (0.1, 0.5, 1.0, 1.5, 2.0):
            rep = solve_ggs_lcp(lcp, ModulusConfig(gamma=1.0, theta=theta),
                                SolverConfig(tol=1e-5, max_iter=100, x0="alt10"))
            its.add(rep.iterations)
        assert len(its) == 1

    def test_residual_history_is_z_space(self):
        lcp, _ = example_lcp(5)
        rep = solve_ggs_lcp(lcp, ModulusConfig(gamma=1.0, theta=1.0),
                            SolverConfig(tol=1e-6, x0="alt10"))
        z = recover_z(rep.final_x, 1.0)
        assert rep.final_residual == pytest.approx(lcp_residual(lcp, z), rel=1e-12)

    def test_consistency_with_gave_solve(self):
        # Solving the reformulated system with the plain solver and tight
        # tolerance must recover a z with a tiny complementarity residual.
        lcp, _ = example_lcp(6)
        cfg = ModulusConfig(gamma=2.0, theta=0.7)
        gave = lcp_to_gave(lcp, cfg)
        rep = solve_ggs(gave, SolverConfig(tol=1e-12, max_iter=500))
        z = recover_z(rep.final_x, cfg.gamma)
        scale = g.inf_norm(lcp.m_mat) * max(1.0, float(np.max(np.abs(z))))
        assert lcp_residual(lcp, z) <= 1e-8 * scale


class TestThetaSweep:
    def test_singleton_grid(self):
        lcp, _ = example_lcp(5)
        theta, rep, secs = sweep_optimal_theta(
            lcp, ModulusConfig(gamma=1.0), SolverConfig(tol=1e-5, x0="alt10"), [0.9]
        )
        assert theta == 0.9
        assert rep.converged
        assert secs >= 0.0

    def test_nonpositive_values_skipped(self):
        lcp, _ = example_lcp(5)
        theta, _, _ = sweep_optimal_theta(
            lcp, ModulusConfig(gamma=1.0), SolverConfig(tol=1e-5, x0="alt10"), [0.0, 1.0]
        )
        assert theta == 1.0
        with pytest.raises(ValueError, match="no positive"):
            sweep_optimal_theta(lcp, ModulusConfig(gamma=1.0), SolverConfig(), [0.0, -0.5])

    def test_minimizes_iterations_with_ties_to_smallest(self):
        lcp, _ = example_lcp(5)
        sc = SolverConfig(tol=1e-5, x0="alt10")
        grid = [0.8, 0.85, 0.9, 0.95, 1.0]
        its = {}
        for t in grid:
            r = solve_amgs(lcp, ModulusConfig(gamma=1.0, theta=t), sc)
            its[t] = r.iterations if r.converged else sc.max_iter
        best = min(its.values())
        theta, rep, _ = sweep_optimal_theta(lcp, ModulusConfig(gamma=1.0), sc, grid)
        assert theta == min(t for t in grid if its[t] == best)
        assert rep.iterations == best

    def test_example52_grid_pair(self):
        lcp, _ = example_lcp(60, pattern=(1.0, 10.0))
        sc = SolverConfig(tol=1e-5, max_iter=100, x0="alt10")
        theta, rep, _ = sweep_optimal_theta(lcp, ModulusConfig(gamma=1.0), sc, [0.79, 0.80])
        assert theta == 0.79
        assert rep.converged

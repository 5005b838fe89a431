"""Solvers and benchmarks for generalized absolute value equations Ax - B|x| = b."""

__version__ = "0.1.0"

from .linalg import (
    TriangularSplit,
    abs_matrix,
    comparison_matrix,
    inf_norm,
    is_m_matrix,
    is_z_matrix,
    lower_triangular_solve,
    solve_linear,
    split_dlu,
)
from .solvers import (
    DiagonalDominanceError,
    GaveProblem,
    SolveReport,
    SolverConfig,
    Termination,
    Theorem31Result,
    check_theorem31,
    check_theorem32,
    ggs_sweep,
    oracle_sign_enumeration,
    relative_residual,
    scalar_branch_solve,
    solve_ggs,
)
from .comparators import (
    GAVE_SOLVERS,
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
from .lcp import (
    LcpProblem,
    ModulusConfig,
    lcp_residual,
    lcp_to_gave,
    recover_z,
    solve_amgs,
    solve_ggs_lcp,
    sweep_optimal_theta,
)
from .problems import (
    BlockTridiagonalSpec,
    RandomGaveSpec,
    default_x0,
    gen_lcp_example,
    gen_random_gave,
)

__all__ = [
    "__version__",
    "TriangularSplit",
    "abs_matrix",
    "comparison_matrix",
    "inf_norm",
    "is_m_matrix",
    "is_z_matrix",
    "lower_triangular_solve",
    "solve_linear",
    "split_dlu",
    "DiagonalDominanceError",
    "GaveProblem",
    "SolveReport",
    "SolverConfig",
    "Termination",
    "Theorem31Result",
    "check_theorem31",
    "check_theorem32",
    "ggs_sweep",
    "oracle_sign_enumeration",
    "relative_residual",
    "scalar_branch_solve",
    "solve_ggs",
    "GAVE_SOLVERS",
    "solve_fpi",
    "solve_gn",
    "solve_gnms",
    "solve_mn",
    "solve_mnms",
    "solve_picard",
    "solve_rms",
    "solve_ssmn",
    "sweep_optimal_tau",
    "LcpProblem",
    "ModulusConfig",
    "lcp_residual",
    "lcp_to_gave",
    "recover_z",
    "solve_amgs",
    "solve_ggs_lcp",
    "sweep_optimal_theta",
    "BlockTridiagonalSpec",
    "RandomGaveSpec",
    "default_x0",
    "gen_lcp_example",
    "gen_random_gave",
]

from .bnb import (
    BRANCHING_RULES,
    STATUS_NODE_LIMIT,
    STATUS_OPTIMAL,
    STATUS_TIMEOUT,
    IlpSolution,
    InternalSolverError,
    LPRelaxation,
    SolverConfig,
    SolverStats,
    solve_ilp,
    solve_lp_relaxation,
)
from .lp import BasisState, BoundedSimplex, LPNumericalError, LPResult

__all__ = [
    "BRANCHING_RULES",
    "STATUS_NODE_LIMIT",
    "STATUS_OPTIMAL",
    "STATUS_TIMEOUT",
    "BasisState",
    "BoundedSimplex",
    "IlpSolution",
    "InternalSolverError",
    "LPNumericalError",
    "LPRelaxation",
    "LPResult",
    "SolverConfig",
    "SolverStats",
    "solve_ilp",
    "solve_lp_relaxation",
]

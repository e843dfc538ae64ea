"""Optimal multi-agent path finding with deadlines via time-expanded flow ILPs."""
from .extract import SolveReport, encode_plan, extract_plan, solve_instance
from .generator import generate_random_instance
from .ilp import IlpModel, build_compact_ilp, build_full_ilp, export_lp, export_mps
from .instance import (
    Collision,
    Graph,
    Instance,
    Plan,
    Violation,
    count_successful,
    make_instance,
    parse_grid_map,
    validate_plan,
)
from .network import EdgePairIndex, FlowNetwork, build_abstracted_network, build_full_network, reduce_network
from .oracle import brute_force_optimal
from .solver import IlpSolution, SolverConfig, solve_ilp, solve_lp_relaxation

__version__ = "0.1.0"

__all__ = [
    "Collision",
    "EdgePairIndex",
    "FlowNetwork",
    "Graph",
    "IlpModel",
    "IlpSolution",
    "Instance",
    "Plan",
    "SolveReport",
    "SolverConfig",
    "Violation",
    "brute_force_optimal",
    "build_abstracted_network",
    "build_compact_ilp",
    "build_full_ilp",
    "build_full_network",
    "count_successful",
    "encode_plan",
    "export_lp",
    "export_mps",
    "extract_plan",
    "generate_random_instance",
    "make_instance",
    "parse_grid_map",
    "reduce_network",
    "solve_ilp",
    "solve_instance",
    "solve_lp_relaxation",
    "validate_plan",
]

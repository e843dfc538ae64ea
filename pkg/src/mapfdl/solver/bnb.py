"""Depth-first branch-and-bound for the 0/1 flow models."""
from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..ilp import IlpModel
from .lp import INFEASIBLE, OPTIMAL, TIME_LIMIT, BasisState, BoundedSimplex

STATUS_OPTIMAL = "optimal"
STATUS_TIMEOUT = "timeout"
STATUS_NODE_LIMIT = "node_limit"

BRANCHING_RULES = ("most_fractional", "first_fractional")


@dataclass(frozen=True)
class SolverConfig:
    time_limit: float = 60.0
    integrality_tol: float = 1e-6
    lp_tol: float = 1e-9
    branching: str = "most_fractional"
    node_limit: Optional[int] = None
    deterministic: bool = True
    verbose: bool = False

    def __post_init__(self):
        if not self.time_limit > 0:
            raise ValueError("time_limit must be positive")
        if not (self.integrality_tol > 0 and self.lp_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.integrality_tol >= 0.5:
            raise ValueError("integrality_tol must be below 0.5")
        if self.branching not in BRANCHING_RULES:
            raise ValueError(f"unknown branching rule {self.branching!r}; choose from {BRANCHING_RULES}")
        if self.node_limit is not None and self.node_limit <= 0:
            raise ValueError("node_limit must be positive")


@dataclass
class SolverStats:
    nodes: int = 0
    lp_iterations: int = 0
    bland_iterations: int = 0
    max_depth: int = 0
    wall_time: float = 0.0
    root_bound: float = float("nan")
    bound_increases: int = 0
    bound_trace: list = field(default_factory=list, repr=False)


@dataclass
class IlpSolution:
    status: str
    objective: Optional[int]
    x: Optional[np.ndarray]
    stats: SolverStats

    def record(self) -> str:
        """One-line ``key=value`` summary."""
        s = self.stats
        return (f"status={self.status} objective={self.objective} nodes={s.nodes} "
                f"lp_iterations={s.lp_iterations} bland_iterations={s.bland_iterations} "
                f"max_depth={s.max_depth} root_bound={s.root_bound:.6g} wall_time={s.wall_time:.4f}")


@dataclass
class LPRelaxation:
    x: np.ndarray
    bound: float
    basis: BasisState
    iterations: int


class InternalSolverError(AssertionError):
    pass


def solve_lp_relaxation(model: IlpModel, basis_hint: Optional[BasisState] = None,
                        config: SolverConfig = SolverConfig()) -> LPRelaxation:
    """Continuous relaxation (``0 <= x <= 1``) of ``model``; its objective bounds the integer optimum."""
    lp = BoundedSimplex(model.A, model.sense, model.rhs, model.objective, tol=config.lp_tol)
    n = model.num_vars
    res = lp.solve(np.zeros(n), np.ones(n), basis_hint)
    if res.status != OPTIMAL:
        # zero flow satisfies every row of these models
        raise InternalSolverError(f"relaxation reported {res.status}")
    return LPRelaxation(res.x, res.objective, res.basis, res.iterations)


def _branch_variable(x: np.ndarray, frac: np.ndarray, rule: str) -> int:
    idx = np.flatnonzero(frac)
    if rule == "first_fractional":
        return int(idx[0])
    dist = np.minimum(x[idx] - np.floor(x[idx]), np.ceil(x[idx]) - x[idx])
    return int(idx[np.argmax(dist)])  # argmax keeps the lowest index on ties


@dataclass
class _Node:
    lo: np.ndarray
    hi: np.ndarray
    basis: Optional[BasisState]
    parent_bound: float
    depth: int


def solve_ilp(model: IlpModel, config: SolverConfig = SolverConfig(), deadline: Optional[float] = None,
              trace_bounds: bool = False) -> IlpSolution:
    """Maximize the model's objective over binary assignments.

    ``deadline`` is an absolute ``time.perf_counter()`` value; when given it
    overrides ``config.time_limit`` (callers use it to charge model
    construction against the same budget).  The all-zero assignment is the
    starting incumbent.  A node is pruned once
    ``floor(bound + integrality_tol) <= incumbent``.
    """
    start = time.perf_counter()
    if deadline is None:
        deadline = start + config.time_limit
    stats = SolverStats()
    n = model.num_vars
    tol = config.integrality_tol

    best_x = np.zeros(n, dtype=np.int64)
    best = 0
    if not model.is_feasible(best_x):
        raise InternalSolverError("zero flow violates the model")

    lp = BoundedSimplex(model.A, model.sense, model.rhs, model.objective, tol=config.lp_tol)
    stack = [_Node(np.zeros(n), np.ones(n), None, math.inf, 0)]
    status = STATUS_OPTIMAL
    while stack:
        if config.node_limit is not None and stats.nodes >= config.node_limit:
            status = STATUS_NODE_LIMIT
            break
        if time.perf_counter() > deadline:
            status = STATUS_TIMEOUT
            break
        node = stack.pop()
        res = lp.solve(node.lo, node.hi, node.basis, deadline=deadline)
        stats.nodes += 1
        stats.lp_iterations += res.iterations
        stats.bland_iterations += res.bland_iterations
        stats.max_depth = max(stats.max_depth, node.depth)
        if res.status == TIME_LIMIT:
            status = STATUS_TIMEOUT
            break
        if res.status == INFEASIBLE:
            continue
        if node.depth == 0:
            stats.root_bound = res.objective
        if res.objective > node.parent_bound + 1e-6:
            stats.bound_increases += 1
        if trace_bounds:
            stats.bound_trace.append((node.depth, node.parent_bound, res.objective))
        if math.floor(res.objective + tol) <= best:
            continue
        x = res.x
        frac = np.abs(x - np.rint(x)) > tol
        if not frac.any():
            xi = np.rint(x).astype(np.int64)
            bad = model.violated_rows(xi)
            if len(bad):
                raise InternalSolverError(f"integral LP point violates rows {bad[:5].tolist()}")
            value = model.objective_value(xi)
            if value > best:
                best, best_x = value, xi
            continue
        j = _branch_variable(x, frac, config.branching)
        down_hi = node.hi.copy()
        down_hi[j] = 0.0
        up_lo = node.lo.copy()
        up_lo[j] = 1.0
        # up branch is popped first
        stack.append(_Node(node.lo, down_hi, res.basis, res.objective, node.depth + 1))
        stack.append(_Node(up_lo, node.hi, res.basis.copy(), res.objective, node.depth + 1))

    stats.wall_time = time.perf_counter() - start
    bad = model.violated_rows(best_x)
    if len(bad):
        raise InternalSolverError(f"incumbent violates rows {bad[:5].tolist()}")
    sol = IlpSolution(status, int(best), best_x, stats)
    if config.verbose:
        print(sol.record(), file=sys.stderr)
    return sol

import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from mapfdl.generator import generate_random_instance
from mapfdl.ilp import build_compact_ilp
from mapfdl.instance import make_instance
from mapfdl.network import build_abstracted_network, reduce_network
from mapfdl.solver import (
    STATUS_NODE_LIMIT,
    STATUS_OPTIMAL,
    STATUS_TIMEOUT,
    BoundedSimplex,
    SolverConfig,
    solve_ilp,
    solve_lp_relaxation,
)
from mapfdl.solver.lp import INFEASIBLE, OPTIMAL


def model_for(inst, reduce=True):
    net, pairs = build_abstracted_network(inst)
    if reduce:
        net, pairs, sets = reduce_network(net, pairs, inst)
        return build_compact_ilp(net, pairs, inst, sets)
    return build_compact_ilp(net, pairs, inst)


def congested():
    return generate_random_instance(6, 6, 0.2, 10, (3, 6), 6, seed=4)


def scipy_bound(model):
    eq, le = model.sense == "E", model.sense == "L"
    A = model.A.astype(float)
    res = linprog(-model.objective, A_ub=A[le] if le.any() else None, b_ub=model.rhs[le] if le.any() else None,
                  A_eq=A[eq] if eq.any() else None, b_eq=model.rhs[eq] if eq.any() else None,
                  bounds=(0, 1), method="highs")
    assert res.status == 0
    return -res.fun


# -- LP layer -----------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(1, 12))
def test_simplex_matches_scipy(seed, m, n):
    """Random bounded LPs, feasible by construction, including nonzero equality rows."""
    rng = np.random.default_rng(seed)
    A = rng.integers(-2, 3, size=(m, n))
    sense = rng.choice(["E", "L"], size=m)
    x0 = rng.random(n)
    rhs = A @ x0 + np.where(sense == "L", rng.random(m), 0.0)
    c = rng.integers(-3, 4, size=n).astype(float)
    lp = BoundedSimplex(A, sense, rhs, c)
    res = lp.solve(np.zeros(n), np.ones(n))
    assert res.status == OPTIMAL
    eq, le = sense == "E", sense == "L"
    ref = linprog(-c, A_ub=A[le] if le.any() else None, b_ub=rhs[le] if le.any() else None,
                  A_eq=A[eq] if eq.any() else None, b_eq=rhs[eq] if eq.any() else None,
                  bounds=(0, 1), method="highs")
    assert res.objective == pytest.approx(-ref.fun, abs=1e-6)
    x = res.x
    assert np.all(x >= -1e-9) and np.all(x <= 1 + 1e-9)
    assert np.allclose(A[eq] @ x, rhs[eq], atol=1e-7)
    assert np.all(A[le] @ x <= rhs[le] + 1e-7)


def test_simplex_detects_infeasibility():
    lp = BoundedSimplex(np.array([[1, 1]]), np.array(["E"]), np.array([3.0]), np.array([1.0, 0.0]))
    assert lp.solve(np.zeros(2), np.ones(2)).status == INFEASIBLE
    assert lp.solve(np.ones(2), np.zeros(2)).status == INFEASIBLE


def test_warm_start_agrees_with_cold():
    model = model_for(congested())
    root = solve_lp_relaxation(model)
    lp = BoundedSimplex(model.A, model.sense, model.rhs, model.objective)
    lo, hi = np.zeros(model.num_vars), np.ones(model.num_vars)
    j = int(np.argmax(np.minimum(root.x, 1 - root.x)))
    hi[j] = 0.0
    warm = lp.solve(lo, hi, root.basis)
    cold = lp.solve(lo, hi)
    assert warm.objective == pytest.approx(cold.objective, abs=1e-7)
    assert warm.objective <= root.bound + 1e-9


# -- relaxation ---------------------------------------------------------------

def test_relaxation_single_edge(single_edge):
    assert solve_lp_relaxation(model_for(single_edge, reduce=False)).bound == pytest.approx(1.0)


def test_relaxation_shared_node():
    # both agents must be on vertex 1 at time 1
    inst = make_instance(3, [(0, 1), (1, 2)], [(0, 2), (2, 0)], 2)
    model = model_for(inst, reduce=False)
    assert solve_lp_relaxation(model).bound == pytest.approx(1.0)
    assert solve_ilp(model).objective == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_relaxation_matches_scipy_and_bounds_ilp(seed):
    inst = generate_random_instance(6, 6, 0.2, 5, (2, 5), 5, seed)
    model = model_for(inst)
    relax = solve_lp_relaxation(model)
    assert relax.bound == pytest.approx(scipy_bound(model), abs=1e-6)
    assert solve_ilp(model).objective <= relax.bound + 1e-6


# -- branch and bound ---------------------------------------------------------

def test_congested_needs_branching_and_bounds_never_rise():
    model = model_for(congested())
    sol = solve_ilp(model, trace_bounds=True)
    assert sol.status == STATUS_OPTIMAL
    assert sol.stats.nodes > 1
    assert sol.stats.bound_increases == 0
    for depth, parent, bound in sol.stats.bound_trace:
        assert bound <= parent + 1e-6
    assert model.is_feasible(sol.x) and model.objective_value(sol.x) == sol.objective
    assert sol.objective <= sol.stats.root_bound + 1e-6


def test_deterministic_search():
    model = model_for(congested())
    a, b = solve_ilp(model), solve_ilp(model)
    assert (a.objective, a.stats.nodes, a.stats.lp_iterations) == (b.objective, b.stats.nodes, b.stats.lp_iterations)
    assert np.array_equal(a.x, b.x)


def test_branching_rules_agree():
    model = model_for(congested())
    a = solve_ilp(model, SolverConfig(branching="most_fractional"))
    b = solve_ilp(model, SolverConfig(branching="first_fractional"))
    assert a.objective == b.objective


def test_timeout_keeps_zero_incumbent():
    model = model_for(congested())
    sol = solve_ilp(model, deadline=time.perf_counter() - 1.0)
    assert sol.status == STATUS_TIMEOUT
    assert sol.objective == 0 and not sol.x.any()


def test_node_limit():
    model = model_for(congested())
    sol = solve_ilp(model, SolverConfig(node_limit=1))
    assert sol.status == STATUS_NODE_LIMIT
    assert sol.stats.nodes == 1
    assert model.is_feasible(sol.x)


def test_empty_model():
    inst = make_instance(2, [(0, 1)], [], 3)
    sol = solve_ilp(model_for(inst))
    assert (sol.status, sol.objective, len(sol.x)) == (STATUS_OPTIMAL, 0, 0)


def test_verbose_record(capsys, single_edge):
    solve_ilp(model_for(single_edge), SolverConfig(verbose=True))
    err = capsys.readouterr().err.strip()
    assert err.startswith("status=optimal objective=1 nodes=")
    fields = dict(kv.split("=") for kv in err.split())
    assert {"lp_iterations", "bland_iterations", "max_depth", "root_bound", "wall_time"} <= set(fields)


@pytest.mark.parametrize("kwargs", [
    {"time_limit": 0}, {"integrality_tol": 0.5}, {"lp_tol": -1.0},
    {"branching": "random"}, {"node_limit": 0},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)

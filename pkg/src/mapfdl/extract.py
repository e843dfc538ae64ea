"""Flow <-> plan conversion and the end-to-end solve pipeline."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ilp import IlpModel, build_compact_ilp, build_full_ilp
from .instance import Instance, Plan, count_successful, validate_plan
from .network import (
    GADGET,
    IN,
    LAYER,
    OUT,
    SPLIT,
    W1,
    WAIT,
    FlowNetwork,
    build_abstracted_network,
    build_full_network,
    commodity_edges,
    reduce_network,
)
from .solver import IlpSolution, InternalSolverError, SolverConfig, solve_ilp

FORMULATIONS = ("abstracted", "full")


class FlowInconsistency(InternalSolverError):
    pass


def extract_plan(solution: IlpSolution, model: IlpModel, network: FlowNetwork, instance: Instance) -> Plan:
    """Follow each commodity's unit flow from its supply node to its demand node."""
    if solution.x is None:
        raise ValueError("solution carries no assignment")
    x = np.asarray(solution.x)
    T = instance.deadline
    paths = []
    for i in range(instance.num_agents):
        s, g = network.supply[i], network.demand[i]
        if s is None or g is None:
            paths.append(None)
            continue
        if s == g:
            paths.append((int(network.node_vertex[s]),))
            continue
        on = model.commodity_vars(i)
        on = on[x[on] == 1]
        next_edges: dict[int, list[int]] = {}
        for j in on:
            e = int(model.var_edge[j])
            next_edges.setdefault(int(network.tail[e]), []).append(e)
        if s not in next_edges:
            paths.append(None)
            continue
        path = [int(network.node_vertex[s])]
        cur = s
        while cur != g:
            outs = next_edges.get(cur, [])
            if len(outs) != 1:
                raise FlowInconsistency(f"commodity {i} has {len(outs)} unit out-edges at {network.label(cur)}")
            cur = int(network.head[outs[0]])
            if network.node_tag[cur] in (LAYER, OUT):
                path.append(int(network.node_vertex[cur]))
        if len(path) != T + 1:
            raise FlowInconsistency(f"commodity {i} path has {len(path)} layers, expected {T + 1}")
        paths.append(tuple(path))
    return Plan(tuple(paths))


def plan_edges(plan: Plan, network: FlowNetwork, instance: Instance) -> list[list[int]]:
    """Network edge ids traversed by each agent's path (empty for unsuccessful agents)."""
    out = []
    graph = instance.graph
    edge_index = {e: k for k, e in enumerate(graph.edges)}
    for path in plan.paths:
        if path is None:
            out.append([])
            continue
        used = []
        for t in range(len(path) - 1):
            u, v = path[t], path[t + 1]
            if network.form == "full":
                used.extend(_full_route(network, edge_index, u, v, t))
            else:
                a, b = network.node_id(u, t), network.node_id(v, t + 1)
                if a is None or b is None:
                    raise KeyError(f"step {u}->{v} at t={t} is not in the network")
                cand = [int(e) for e in network.out_edges(a) if network.head[e] == b]
                if len(cand) != 1:
                    raise KeyError(f"step {u}->{v} at t={t} is not in the network")
                used.append(cand[0])
        out.append(used)
    return out


def _full_route(network: FlowNetwork, edge_index, u, v, t):
    src = network.node_id(u, t, OUT)
    dst_in = network.node_id(v, t + 1, IN)
    dst_out = network.node_id(v, t + 1, OUT)
    outs = network.out_edges(src)
    route = []
    if u == v:
        route += [int(e) for e in outs if network.edge_kind[e] == WAIT]
    else:
        k = edge_index[(min(u, v), max(u, v))]
        w1 = next(int(network.head[e]) for e in outs
                  if network.node_tag[network.head[e]] == W1 and network.node_vertex[network.head[e]] == k)
        route.append(next(int(e) for e in outs if network.head[e] == w1))
        mid = int(network.out_edges(w1)[0])
        route.append(mid)
        w2 = int(network.head[mid])
        route.append(next(int(e) for e in network.out_edges(w2) if network.head[e] == dst_in))
    route.append(next(int(e) for e in network.out_edges(dst_in) if network.head[e] == dst_out))
    assert all(network.edge_kind[e] in (WAIT, GADGET, SPLIT) for e in route)
    return route


def encode_plan(plan: Plan, model: IlpModel, network: FlowNetwork, instance: Instance) -> np.ndarray:
    """0/1 assignment of ``model`` that routes each successful agent along its path."""
    lookup = {(int(c), int(e)): j for j, (c, e) in enumerate(zip(model.var_commodity, model.var_edge))}
    x = np.zeros(model.num_vars, dtype=np.int64)
    for i, edges in enumerate(plan_edges(plan, network, instance)):
        for e in edges:
            j = lookup.get((i, e))
            if j is None:
                raise KeyError(f"agent {i} uses edge {e}, which has no variable")
            x[j] = 1
    return x


@dataclass
class SolveReport:
    status: str
    m_succ: int
    plan: Plan
    timings: dict = field(default_factory=dict)
    sizes: dict = field(default_factory=dict)
    solution: Optional[IlpSolution] = None
    model: Optional[IlpModel] = field(default=None, repr=False)
    network: Optional[FlowNetwork] = field(default=None, repr=False)

    def summary(self) -> str:
        t = " ".join(f"{k}={v:.4f}" for k, v in self.timings.items())
        s = " ".join(f"{k}={v}" for k, v in self.sizes.items())
        return f"status={self.status} M_succ={self.m_succ} {s} {t}".strip()


def solve_instance(
    instance: Instance,
    config: SolverConfig = SolverConfig(),
    use_reduction: bool = True,
    use_per_commodity: bool = True,
    formulation: str = "abstracted",
) -> SolveReport:
    """Build the network and model, solve, extract and verify a plan.

    Model construction counts against ``config.time_limit``.  The full gadget
    formulation ignores the reduction flags.  With a zero deadline no flow is
    needed: exactly the agents already on their goals succeed.
    """
    if formulation not in FORMULATIONS:
        raise ValueError(f"formulation must be one of {FORMULATIONS}")
    t0 = time.perf_counter()
    deadline = t0 + config.time_limit
    timings: dict[str, float] = {}
    sizes: dict[str, int] = {}
    T = instance.deadline

    if T == 0 or instance.num_agents == 0:
        plan = Plan(tuple((s,) if s == g else None for s, g in instance.agents))
        return _finish("optimal", plan, instance, timings, sizes, None, None, None, t0)

    reachable = [instance.graph.bfs_distances(s)[g] <= T for s, g in instance.agents]
    timings["reachability"] = time.perf_counter() - t0
    if not any(reachable):
        return _finish("optimal", Plan.empty(instance.num_agents), instance, timings, sizes, None, None, None, t0)

    t = time.perf_counter()
    if formulation == "full":
        network = build_full_network(instance)
        timings["build"] = time.perf_counter() - t
        t = time.perf_counter()
        model = build_full_ilp(network, instance)
    else:
        network, pairs = build_abstracted_network(instance)
        timings["build"] = time.perf_counter() - t
        edge_sets = None
        if use_reduction:
            t = time.perf_counter()
            network, pairs, edge_sets = reduce_network(network, pairs, instance)
            timings["reduce"] = time.perf_counter() - t
        if use_per_commodity and edge_sets is None:
            edge_sets = commodity_edges(network, instance)
        if not use_per_commodity:
            edge_sets = None
        t = time.perf_counter()
        model = build_compact_ilp(network, pairs, instance, edge_sets)
    timings["model"] = time.perf_counter() - t
    sizes.update(nodes=network.num_nodes, edges=network.num_edges, vars=model.num_vars, rows=model.num_rows)

    if model.num_vars == 0:
        return _finish("optimal", Plan.empty(instance.num_agents), instance, timings, sizes, None, model, network, t0)

    t = time.perf_counter()
    solution = solve_ilp(model, config, deadline=deadline)
    timings["solve"] = time.perf_counter() - t
    t = time.perf_counter()
    plan = extract_plan(solution, model, network, instance)
    timings["extract"] = time.perf_counter() - t
    if count_successful(plan) != solution.objective:
        raise FlowInconsistency(f"plan has {count_successful(plan)} agents, objective is {solution.objective}")
    return _finish(solution.status, plan, instance, timings, sizes, solution, model, network, t0)


def _finish(status, plan, instance, timings, sizes, solution, model, network, t0):
    t = time.perf_counter()
    problems = validate_plan(instance, plan)
    if problems:
        raise InternalSolverError(f"extracted plan fails verification: {problems[:3]}")
    timings["verify"] = time.perf_counter() - t
    timings["total"] = time.perf_counter() - t0
    return SolveReport(status, count_successful(plan), plan, timings, sizes, solution, model, network)

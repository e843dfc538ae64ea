"""Brute-force optimum for small instances, independent of the flow models.

Agent subsets are tried from largest to smallest (lexicographic within a
size).  For each subset a breadth-first search over joint configurations,
one layer per time step, looks for a collision-free joint plan that puts
every agent of the subset on its goal at the deadline.  The first subset
that succeeds gives the optimum.
"""
from __future__ import annotations

from collections import deque
from itertools import combinations, product

from .instance import Instance, Plan


class OracleLimitError(RuntimeError):
    pass


def _distances(instance: Instance, source: int) -> list[float]:
    adj = [instance.graph.neighbors(v) for v in range(instance.graph.num_vertices)]
    dist = [float("inf")] * len(adj)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if dist[w] == float("inf"):
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


class _Budget:
    def __init__(self, max_states):
        self.left = max_states

    def spend(self, k=1):
        self.left -= k
        if self.left < 0:
            raise OracleLimitError("state budget exhausted")


def _joint_search(instance: Instance, subset, to_goal, budget: _Budget):
    """Joint paths (one tuple per agent in ``subset``) or ``None``."""
    T = instance.deadline
    graph = instance.graph
    starts = tuple(instance.agents[i][0] for i in subset)
    goals = tuple(instance.agents[i][1] for i in subset)
    moves = [tuple(sorted((v,) + graph.neighbors(v))) for v in range(graph.num_vertices)]
    # layer t: config -> parent config (None at t=0)
    layers = [{starts: None}]
    budget.spend()
    for t in range(T):
        remaining = T - t - 1
        nxt = {}
        for config in layers[-1]:
            options = [
                [w for w in moves[v] if to_goal[i][w] <= remaining]
                for i, v in zip(subset, config)
            ]
            for cand in product(*options):
                if cand in nxt or len(set(cand)) != len(cand):
                    continue
                swap = False
                for a in range(len(cand)):
                    for b in range(a + 1, len(cand)):
                        if cand[a] == config[b] and cand[b] == config[a]:
                            swap = True
                            break
                    if swap:
                        break
                if swap:
                    continue
                nxt[cand] = config
                budget.spend()
        if not nxt:
            return None
        layers.append(nxt)
    if goals not in layers[-1]:
        return None
    configs = [goals]
    for t in range(T, 0, -1):
        configs.append(layers[t][configs[-1]])
    configs.reverse()
    return [tuple(c[k] for c in configs) for k in range(len(subset))]


def brute_force_optimal(instance: Instance, max_agents: int = 4, max_states: int = 2_000_000):
    """Return ``(M_succ, witness plan)``; raises :class:`OracleLimitError` past the limits."""
    M = instance.num_agents
    if M > max_agents:
        raise OracleLimitError(f"{M} agents exceeds max_agents={max_agents}")
    T = instance.deadline
    to_goal = [_distances(instance, g) for _, g in instance.agents]
    possible = [to_goal[i][s] <= T for i, (s, _) in enumerate(instance.agents)]
    budget = _Budget(max_states)
    for size in range(M, 0, -1):
        for subset in combinations(range(M), size):
            if not all(possible[i] for i in subset):
                continue
            found = _joint_search(instance, subset, to_goal, budget)
            if found is not None:
                paths = [None] * M
                for i, p in zip(subset, found):
                    paths[i] = p
                return size, Plan(tuple(paths))
    return 0, Plan.empty(M)

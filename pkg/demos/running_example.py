"""
Five vertices, two agents, deadline two
=======================================

A tiny instance solved end to end: build the time-expanded networks, the
compact ILP, solve it with the built-in branch and bound, and read the plan
back out of the flow.
"""

from mapfdl import (
    build_abstracted_network,
    build_full_network,
    make_instance,
    solve_instance,
    validate_plan,
)

# v1 hangs off v2; v2 v3 v5 v4 form a square
edges = [(0, 1), (1, 2), (1, 3), (2, 4), (3, 4)]
# a1 starts on v1 and wants v5 (three steps away); a2 goes v2 -> v4
instance = make_instance(5, edges, [(0, 4), (1, 3)], deadline=2)

# The abstracted network has one copy of each vertex per time step.
# The full network splits every vertex and adds a gadget per edge and step.
abstracted, pairs = build_abstracted_network(instance)
full = build_full_network(instance)
print("abstracted:", abstracted.num_nodes, "nodes,", abstracted.num_edges, "edges,", len(pairs), "move pairs")
print("full:      ", full.num_nodes, "nodes,", full.num_edges, "edges")

report = solve_instance(instance)
print()
print(report.summary())

# a1 cannot reach v5 by t=2, so it is dropped at time 0
for i, path in enumerate(report.plan.paths, start=1):
    print(f"a{i}:", "unsuccessful" if path is None else " -> ".join(f"v{v + 1}" for v in path))
assert validate_plan(instance, report.plan) == []

# The full gadget formulation gives the same optimum
print("full formulation M_succ:", solve_instance(instance, formulation="full").m_succ)

# With one more time step both agents make it
longer = make_instance(5, edges, instance.agents, deadline=3)
print("deadline 3 M_succ:", solve_instance(longer).m_succ)

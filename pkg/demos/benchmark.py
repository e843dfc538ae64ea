"""
A small success-rate table
==========================

The benchmark harness draws seeded random grids, places agents at a fixed
start/goal distance, solves each instance under a time limit and reports the
fraction proven optimal.  This is a shrunken version of the desk-scale run
(20x20, T=24, 25 instances per point) used in the acceptance suite.
"""

import sys

from mapfdl.bench import parse_config, run_benchmark

config = parse_config("""
width = 12
height = 12
block_probability = 0.2
agents = 2,4,6,8
instances = 5
distance_min = 12
distance_max = 14
deadline = 14
time_limit = 20
seed = 0
""")


def progress(row):
    print(f"  agents={row.agents} #{row.instance}: {row.status}, M_succ={row.m_succ}, {row.time:.2f}s",
          file=sys.stderr)


result = run_benchmark(config, progress)
print(result.table())

# the CSV is the durable output; the table above is computed from it
print(result.summary_csv())

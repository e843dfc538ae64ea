"""Seeded random grid instances.

Random numbers come from numpy's PCG64 bit generator read as raw 64-bit
words (``RNG_VERSION = "pcg64-raw-v1"``), so seeds are reproducible without
relying on numpy's higher-level sampling routines, whose streams are not
guaranteed stable across releases:

* ``random()``: ``(word >> 11) * 2**-53``
* ``below(n)``: rejection sampling, accept ``word < floor(2**64 / n) * n``,
  return ``word % n``

Grid cells are blocked in row-major order, one ``random()`` draw each.
"""
from __future__ import annotations

import numpy as np

from .instance import Instance, grid_graph

RNG_VERSION = "pcg64-raw-v1"
_TWO64 = 1 << 64


class PlacementError(RuntimeError):
    def __init__(self, agent: int, message: str):
        self.agent = agent
        super().__init__(f"agent {agent}: {message}")


class PortableRng:
    def __init__(self, seed: int):
        self._bits = np.random.PCG64(seed)

    def word(self) -> int:
        return int(self._bits.random_raw())

    def random(self) -> float:
        return (self.word() >> 11) * (1.0 / (1 << 53))

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("below() needs n > 0")
        limit = (_TWO64 // n) * n
        while True:
            w = self.word()
            if w < limit:
                return w % n


def random_grid_rows(width: int, height: int, block_probability: float, rng: PortableRng) -> list[str]:
    return [
        "".join("@" if rng.random() < block_probability else "." for _ in range(width))
        for _ in range(height)
    ]


def largest_component_rows(rows: list[str]) -> list[str]:
    """Block every free cell outside the largest 4-connected free region.

    Ties go to the region holding the earliest free cell in row-major order.
    """
    graph = grid_graph(rows)
    comps = graph.components()
    if not comps:
        return rows
    best = max(comps, key=len)  # max() keeps the first of equal-size regions
    keep = {graph.cells[v] for v in best}
    return [
        "".join("." if (x, y) in keep else "@" for x in range(len(row)))
        for y, row in enumerate(rows)
    ]


def generate_random_instance(
    width: int,
    height: int,
    block_probability: float,
    num_agents: int,
    distance_range: tuple[int, int],
    deadline: int,
    seed: int,
    max_attempts: int = 200,
) -> Instance:
    """Random grid instance with start/goal distances inside ``distance_range``.

    Starts are drawn uniformly from unused free cells, then the goal uniformly
    from unused cells whose BFS distance to the start lies in the range.  A
    start with no admissible goal is redrawn, up to ``max_attempts`` times per
    agent before :class:`PlacementError` is raised.
    """
    lo, hi = distance_range
    if lo > hi or lo < 0:
        raise ValueError(f"bad distance range {distance_range}")
    if hi > deadline:
        raise ValueError(f"distance range upper bound {hi} exceeds deadline {deadline}")
    if not 0.0 <= block_probability <= 1.0:
        raise ValueError("block_probability must lie in [0, 1]")

    rng = PortableRng(seed)
    rows = largest_component_rows(random_grid_rows(width, height, block_probability, rng))
    graph = grid_graph(rows)

    used_starts: set[int] = set()
    used_goals: set[int] = set()
    agents = []
    for i in range(num_agents):
        for _ in range(max_attempts):
            free_starts = [v for v in range(graph.num_vertices) if v not in used_starts]
            if not free_starts:
                raise PlacementError(i, "no free start cell left")
            s = free_starts[rng.below(len(free_starts))]
            dist = graph.bfs_distances(s)
            goals = [v for v in np.flatnonzero((dist >= lo) & (dist <= hi)) if v not in used_goals]
            if goals:
                g = int(goals[rng.below(len(goals))])
                break
        else:
            raise PlacementError(i, f"no start/goal pair at distance {lo}..{hi} after {max_attempts} attempts")
        used_starts.add(s)
        used_goals.add(g)
        agents.append((s, g))
    return Instance(graph, deadline, tuple(agents))

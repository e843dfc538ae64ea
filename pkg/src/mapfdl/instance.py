"""Problem representation: graphs, instances, plans and the plan verifier.

Grid maps use the common benchmark text layout::

    type octile
    height H
    width W
    map
    <H rows of W characters>

where ``.`` and ``G`` are free cells and ``@`` and ``T`` are blocked.  Free
cells become vertices numbered in row-major order.  Scenario files list one
agent per line as ``start_x start_y goal_x goal_y`` (column, row, 0-based).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

FREE_CHARS = frozenset(".G")
BLOCKED_CHARS = frozenset("@T")

Cell = tuple[int, int]


class InstanceError(ValueError):
    """Raised for instances that break the problem's structural rules."""


class ParseError(ValueError):
    """Malformed map, scenario or plan text.  ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None, source: str = "map"):
        self.line = line
        self.source = source
        where = f"{source} line {line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


class PlanShapeError(ValueError):
    """Plan does not fit the instance (wrong agent count or path length)."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..num_vertices-1``.

    ``width``/``height``/``cells`` are set for graphs built from grid maps;
    ``cells[v]`` is the ``(x, y)`` cell of vertex ``v``.
    """

    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    width: Optional[int] = None
    height: Optional[int] = None
    cells: Optional[tuple[Cell, ...]] = None
    _adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        norm = []
        seen = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise InstanceError(f"self-loop at vertex {u}")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise InstanceError(f"edge ({u}, {v}) has an endpoint outside 0..{self.num_vertices - 1}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InstanceError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        norm.sort()
        object.__setattr__(self, "edges", tuple(norm))
        adj: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for u, v in norm:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))
        if self.cells is not None:
            if len(self.cells) != self.num_vertices:
                raise InstanceError("grid cell table does not match vertex count")
            object.__setattr__(self, "cells", tuple((int(x), int(y)) for x, y in self.cells))

    @property
    def is_grid(self) -> bool:
        return self.cells is not None

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def vertex_of(self, cell: Cell) -> int:
        """Vertex id of grid cell ``(x, y)``; ``KeyError`` if blocked or absent."""
        if self.cells is None:
            raise InstanceError("graph has no grid metadata")
        lookup = self.__dict__.get("_cell_index")
        if lookup is None:
            lookup = {c: i for i, c in enumerate(self.cells)}
            object.__setattr__(self, "_cell_index", lookup)
        return lookup[tuple(cell)]

    def bfs_distances(self, source: int) -> np.ndarray:
        """Unweighted hop distances from ``source``; unreachable vertices get ``inf``."""
        dist = np.full(self.num_vertices, np.inf)
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            du = dist[u] + 1
            for w in self._adj[u]:
                if dist[w] == np.inf:
                    dist[w] = du
                    queue.append(w)
        return dist

    def components(self) -> list[list[int]]:
        seen = np.zeros(self.num_vertices, dtype=bool)
        comps = []
        for s in range(self.num_vertices):
            if seen[s]:
                continue
            comp = [s]
            seen[s] = True
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in self._adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        queue.append(w)
            comps.append(sorted(comp))
        return comps


def grid_graph(rows: Sequence[str]) -> Graph:
    """4-neighbor graph over the free cells of a character grid."""
    height = len(rows)
    width = len(rows[0]) if height else 0
    cells = []
    index = {}
    for y, row in enumerate(rows):
        if len(row) != width:
            raise InstanceError(f"row {y} has width {len(row)}, expected {width}")
        for x, ch in enumerate(row):
            if ch in FREE_CHARS:
                index[(x, y)] = len(cells)
                cells.append((x, y))
            elif ch not in BLOCKED_CHARS:
                raise InstanceError(f"unknown cell character {ch!r} at ({x}, {y})")
    edges = []
    for (x, y), v in index.items():
        right = index.get((x + 1, y))
        if right is not None:
            edges.append((v, right))
        down = index.get((x, y + 1))
        if down is not None:
            edges.append((v, down))
    return Graph(len(cells), tuple(edges), width=width, height=height, cells=tuple(cells))


@dataclass(frozen=True)
class Instance:
    """A graph, a deadline ``deadline`` (time steps) and agents ``(start, goal)``."""

    graph: Graph
    deadline: int
    agents: tuple[tuple[int, int], ...]

    def __post_init__(self):
        agents = tuple((int(s), int(g)) for s, g in self.agents)
        object.__setattr__(self, "agents", agents)
        if int(self.deadline) != self.deadline or self.deadline < 0:
            raise InstanceError(f"deadline must be a nonnegative integer, got {self.deadline!r}")
        object.__setattr__(self, "deadline", int(self.deadline))
        n = self.graph.num_vertices
        for i, (s, g) in enumerate(agents):
            if not (0 <= s < n and 0 <= g < n):
                raise InstanceError(f"agent {i} has a vertex outside 0..{n - 1}")
        starts = [s for s, _ in agents]
        goals = [g for _, g in agents]
        if len(set(starts)) != len(starts):
            raise InstanceError("agents share a start vertex")
        if len(set(goals)) != len(goals):
            raise InstanceError("agents share a goal vertex")

    @property
    def num_agents(self) -> int:
        return len(self.agents)

    @property
    def starts(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.agents)

    @property
    def goals(self) -> tuple[int, ...]:
        return tuple(g for _, g in self.agents)


@dataclass(frozen=True)
class Plan:
    """One optional path per agent; ``None`` marks an agent removed at time zero."""

    paths: tuple[Optional[tuple[int, ...]], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "paths", tuple(None if p is None else tuple(int(v) for v in p) for p in self.paths)
        )

    @classmethod
    def empty(cls, num_agents: int) -> "Plan":
        return cls((None,) * num_agents)

    @property
    def successful(self) -> list[int]:
        return [i for i, p in enumerate(self.paths) if p is not None]


@dataclass(frozen=True)
class Collision:
    """``kind='vertex'``: ``location=(v,)``; ``kind='edge'``: ``location=(u, v)``.

    For an edge collision agent ``agents[0]`` moves u -> v while ``agents[1]``
    moves v -> u between ``t`` and ``t + 1``.
    """

    kind: str
    agents: tuple[int, int]
    location: tuple[int, ...]
    t: int


@dataclass(frozen=True)
class Violation:
    """Breach of the start rule (``kind='start'``) or movement rule (``kind='move'``)."""

    kind: str
    agent: int
    t: int
    detail: str = ""


def count_successful(plan: Plan) -> int:
    return sum(p is not None for p in plan.paths)


def validate_plan(instance: Instance, plan: Plan) -> list:
    """Return every violation of the plan (an empty list means the plan is a solution).

    Raises :class:`PlanShapeError` before any semantic check when the plan has
    the wrong number of agents or a path of the wrong length.
    """
    T = instance.deadline
    if len(plan.paths) != instance.num_agents:
        raise PlanShapeError(f"plan has {len(plan.paths)} agents, instance has {instance.num_agents}")
    n = instance.graph.num_vertices
    for i, path in enumerate(plan.paths):
        if path is None:
            continue
        if len(path) != T + 1:
            raise PlanShapeError(f"agent {i} path has {len(path)} entries, expected {T + 1}")
        if any(not 0 <= v < n for v in path):
            raise PlanShapeError(f"agent {i} path leaves the vertex range")

    graph = instance.graph
    out: list = []
    active = plan.successful
    for i in active:
        path = plan.paths[i]
        if path[0] != instance.agents[i][0]:
            out.append(Violation("start", i, 0, f"starts at {path[0]}, expected {instance.agents[i][0]}"))
        if path[-1] != instance.agents[i][1]:
            out.append(Violation("goal", i, T, f"ends at {path[-1]}, expected {instance.agents[i][1]}"))
        for t in range(1, T + 1):
            a, b = path[t - 1], path[t]
            if a != b and not graph.has_edge(a, b):
                out.append(Violation("move", i, t, f"{a} -> {b} is not an edge"))

    for t in range(T + 1):
        occupied: dict[int, int] = {}
        for i in active:
            v = plan.paths[i][t]
            if v in occupied:
                out.append(Collision("vertex", (occupied[v], i), (v,), t))
            else:
                occupied[v] = i
    for t in range(T):
        moves = {}
        for i in active:
            u, v = plan.paths[i][t], plan.paths[i][t + 1]
            if u != v:
                moves[(u, v)] = i
        for (u, v), i in moves.items():
            j = moves.get((v, u))
            if j is not None and i < j:
                out.append(Collision("edge", (i, j), (u, v), t))
    out.sort(key=_violation_order)
    return out


def _violation_order(item):
    if isinstance(item, Violation):
        return (0, item.t, item.agent, item.kind)
    return (1, item.t, item.kind, item.agents, item.location)


def is_valid(instance: Instance, plan: Plan) -> bool:
    return not validate_plan(instance, plan)


# -- text formats -----------------------------------------------------------

def parse_map_rows(map_text: str) -> list[str]:
    """Grid rows of a map file, checking header and characters."""
    lines = map_text.splitlines()
    if len(lines) < 4:
        raise ParseError("expected 4 header lines", line=len(lines) + 1)
    header = {}
    for lineno in (1, 2):
        parts = lines[lineno].split()
        if len(parts) != 2 or parts[0] not in ("height", "width"):
            raise ParseError(f"malformed header {lines[lineno]!r}", line=lineno + 1)
        try:
            header[parts[0]] = int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer {parts[0]} {parts[1]!r}", line=lineno + 1) from None
    if not lines[0].split() or lines[0].split()[0] != "type":
        raise ParseError(f"malformed header {lines[0]!r}", line=1)
    if set(header) != {"height", "width"}:
        raise ParseError("header must give both height and width", line=3)
    if lines[3].strip() != "map":
        raise ParseError(f"expected 'map', got {lines[3]!r}", line=4)
    H, W = header["height"], header["width"]
    if H <= 0 or W <= 0:
        raise ParseError("height and width must be positive", line=2)
    rows = [ln.rstrip("\r\n") for ln in lines[4:]]
    while len(rows) > H and not rows[-1].strip():
        rows.pop()
    if len(rows) != H:
        raise ParseError(f"expected {H} map rows, found {len(rows)}", line=5 + min(len(rows), H))
    for y, row in enumerate(rows):
        if len(row) != W:
            raise ParseError(f"row has {len(row)} characters, expected {W}", line=5 + y)
        for x, ch in enumerate(row):
            if ch not in FREE_CHARS and ch not in BLOCKED_CHARS:
                raise ParseError(f"unknown cell character {ch!r} at column {x}", line=5 + y)
    return rows


def parse_scenario(scenario_text: str) -> list[tuple[Cell, Cell, int]]:
    """``((sx, sy), (gx, gy), line_number)`` per agent line."""
    out = []
    for lineno, raw in enumerate(scenario_text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(f"expected 4 integers, got {len(parts)} fields", line=lineno, source="scenario")
        try:
            sx, sy, gx, gy = (int(p) for p in parts)
        except ValueError:
            raise ParseError(f"non-integer field in {line!r}", line=lineno, source="scenario") from None
        out.append(((sx, sy), (gx, gy), lineno))
    return out


def parse_grid_map(map_text: str, scenario_text: str, deadline: int) -> Instance:
    """Build an :class:`Instance` from map and scenario text."""
    rows = parse_map_rows(map_text)
    graph = grid_graph(rows)
    H, W = len(rows), len(rows[0])
    agents = []
    seen_start: dict[Cell, int] = {}
    seen_goal: dict[Cell, int] = {}
    for start, goal, lineno in parse_scenario(scenario_text):
        for label, (x, y) in (("start", start), ("goal", goal)):
            if not (0 <= x < W and 0 <= y < H):
                raise ParseError(f"agent {label} ({x}, {y}) out of bounds", line=lineno, source="scenario")
            if rows[y][x] in BLOCKED_CHARS:
                raise ParseError(f"agent on blocked cell ({x}, {y})", line=lineno, source="scenario")
        if start in seen_start:
            raise ParseError(f"duplicate start cell {start} (also line {seen_start[start]})",
                             line=lineno, source="scenario")
        if goal in seen_goal:
            raise ParseError(f"duplicate goal cell {goal} (also line {seen_goal[goal]})",
                             line=lineno, source="scenario")
        seen_start[start] = lineno
        seen_goal[goal] = lineno
        agents.append((graph.vertex_of(start), graph.vertex_of(goal)))
    return Instance(graph, deadline, tuple(agents))


def map_text(graph: Graph) -> str:
    if not graph.is_grid:
        raise InstanceError("only grid graphs have a map representation")
    grid = [["@"] * graph.width for _ in range(graph.height)]
    for x, y in graph.cells:
        grid[y][x] = "."
    lines = ["type octile", f"height {graph.height}", f"width {graph.width}", "map"]
    lines += ["".join(r) for r in grid]
    return "\n".join(lines) + "\n"


def scenario_text(instance: Instance) -> str:
    cells = instance.graph.cells
    if cells is None:
        raise InstanceError("only grid instances have a scenario representation")
    lines = ["# start_x start_y goal_x goal_y"]
    for s, g in instance.agents:
        lines.append(f"{cells[s][0]} {cells[s][1]} {cells[g][0]} {cells[g][1]}")
    return "\n".join(lines) + "\n"


def _fmt_vertex(graph: Graph, v: int) -> str:
    if graph.is_grid:
        x, y = graph.cells[v]
        return f"{x},{y}"
    return str(v)


def format_plan(instance: Instance, plan: Plan) -> str:
    """Plan file text.  Agents are numbered from 1 as in ``agent 1: ...``."""
    lines = [f"deadline {instance.deadline}"]
    for i, path in enumerate(plan.paths, start=1):
        if path is None:
            lines.append(f"agent {i}: unsuccessful")
        else:
            lines.append(f"agent {i}: " + " ".join(_fmt_vertex(instance.graph, v) for v in path))
    return "\n".join(lines) + "\n"


def parse_plan(instance: Instance, text: str) -> Plan:
    lines = [ln for ln in text.splitlines()]
    if not lines or lines[0].split()[:1] != ["deadline"]:
        raise ParseError("expected 'deadline T'", line=1, source="plan")
    try:
        T = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise ParseError(f"malformed deadline line {lines[0]!r}", line=1, source="plan") from None
    if T != instance.deadline:
        raise ParseError(f"plan deadline {T} differs from instance deadline {instance.deadline}",
                         line=1, source="plan")
    paths: dict[int, Optional[tuple[int, ...]]] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        head, _, body = line.partition(":")
        parts = head.split()
        if len(parts) != 2 or parts[0] != "agent" or not parts[1].isdigit():
            raise ParseError(f"expected 'agent i: ...', got {line!r}", line=lineno, source="plan")
        idx = int(parts[1]) - 1
        if idx in paths:
            raise ParseError(f"agent {idx + 1} listed twice", line=lineno, source="plan")
        tokens = body.split()
        if tokens == ["unsuccessful"]:
            paths[idx] = None
            continue
        try:
            if instance.graph.is_grid:
                path = tuple(instance.graph.vertex_of(tuple(int(c) for c in tok.split(","))) for tok in tokens)
            else:
                path = tuple(int(tok) for tok in tokens)
        except (KeyError, ValueError):
            raise ParseError(f"bad vertex in {line!r}", line=lineno, source="plan") from None
        paths[idx] = path
    if sorted(paths) != list(range(instance.num_agents)):
        raise ParseError(f"plan must list agents 1..{instance.num_agents} exactly once", source="plan")
    return Plan(tuple(paths[i] for i in range(instance.num_agents)))


def make_instance(num_vertices: int, edges: Iterable[tuple[int, int]], agents, deadline: int) -> Instance:
    """Convenience constructor for general (non-grid) graphs."""
    return Instance(Graph(num_vertices, tuple(edges)), deadline, tuple(agents))

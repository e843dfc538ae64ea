"""Time-expanded multi-commodity flow networks.

Three forms are built from an :class:`~mapfdl.instance.Instance`:

``full``
    Split nodes ``v_t^in -> v_t^out`` carry vertex capacity; wait edges
    ``v_t^out -> v_{t+1}^in``; one merge/split gadget per graph edge and
    time step (``u_t^out, v_t^out -> w1 -> w2 -> u_{t+1}^in, v_{t+1}^in``)
    whose middle edge lets at most one agent use the edge per step.
``abstracted``
    One node ``v_t`` per vertex and layer; wait edges and, per graph edge,
    the opposing pair ``(u_t, v_{t+1})`` / ``(v_t, u_{t+1})``.  Collision
    rules are restored by linear constraints in :mod:`mapfdl.ilp`.
``reduced``
    The abstracted network restricted to nodes and edges lying on some
    start-to-goal path of one agent that fits within the deadline.

Every edge has capacity one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .instance import Instance

# node tags
LAYER, IN, OUT, W1, W2 = "v", "in", "out", "w1", "w2"
# edge kinds
WAIT, MOVE, SPLIT, GADGET = "wait", "move", "split", "gadget"


class DeltaConvention:
    """Outgoing/incoming edge lists per node.

    In the flow formulation literature the outgoing set is often written
    with a minus and the incoming set with a plus; here the names say it.
    """

    def __init__(self, num_nodes: int, tail: np.ndarray, head: np.ndarray):
        self.num_nodes = num_nodes
        self._out_ptr, self._out_idx = _csr(num_nodes, tail)
        self._in_ptr, self._in_idx = _csr(num_nodes, head)

    def out_edges(self, v: int) -> np.ndarray:
        return self._out_idx[self._out_ptr[v]:self._out_ptr[v + 1]]

    def in_edges(self, v: int) -> np.ndarray:
        return self._in_idx[self._in_ptr[v]:self._in_ptr[v + 1]]


def _csr(n: int, key: np.ndarray):
    order = np.argsort(key, kind="stable")
    counts = np.bincount(key, minlength=n)
    ptr = np.concatenate([[0], np.cumsum(counts)])
    return ptr, order


@dataclass(frozen=True, eq=False)
class FlowNetwork:
    """Directed unit-capacity network with one supply/demand node per commodity.

    ``node_vertex`` holds the graph vertex for layer and split nodes and the
    graph edge index for gadget nodes.  ``node_rank`` is a topological key
    (every edge goes from lower to higher rank).  ``supply[i]``/``demand[i]``
    are ``None`` when the reduced network dropped agent ``i`` entirely.
    ``parent_node``/``parent_edge`` map reduced ids back to abstracted ids.
    """

    form: str
    deadline: int
    num_graph_vertices: int
    node_vertex: np.ndarray
    node_time: np.ndarray
    node_tag: tuple[str, ...]
    node_rank: np.ndarray
    tail: np.ndarray
    head: np.ndarray
    edge_kind: tuple[str, ...]
    supply: tuple[Optional[int], ...]
    demand: tuple[Optional[int], ...]
    parent_node: Optional[np.ndarray] = None
    parent_edge: Optional[np.ndarray] = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def num_nodes(self) -> int:
        return len(self.node_vertex)

    @property
    def num_edges(self) -> int:
        return len(self.tail)

    @property
    def num_commodities(self) -> int:
        return len(self.supply)

    @property
    def delta(self) -> DeltaConvention:
        d = self._cache.get("delta")
        if d is None:
            d = self._cache["delta"] = DeltaConvention(self.num_nodes, self.tail, self.head)
        return d

    def out_edges(self, node: int) -> np.ndarray:
        return self.delta.out_edges(node)

    def in_edges(self, node: int) -> np.ndarray:
        return self.delta.in_edges(node)

    def node_id(self, vertex: int, t: int, tag: str | None = None) -> Optional[int]:
        """Id of the layer/split node for ``(vertex, t)``, ``None`` if absent."""
        if tag is None:
            tag = OUT if self.form == "full" else LAYER
        index = self._cache.get("index")
        if index is None:
            index = self._cache["index"] = {
                (int(v), int(tt), g): k
                for k, (v, tt, g) in enumerate(zip(self.node_vertex, self.node_time, self.node_tag))
                if g in (LAYER, IN, OUT)
            }
        return index.get((vertex, t, tag))

    def label(self, node: int) -> str:
        v, t, tag = int(self.node_vertex[node]), int(self.node_time[node]), self.node_tag[node]
        if tag == LAYER:
            return f"v{v}_{t}"
        if tag in (IN, OUT):
            return f"v{v}_{t}^{tag}"
        return f"e{v}_{t}_{tag}"

    def is_acyclic(self) -> bool:
        return bool(np.all(self.node_rank[self.tail] < self.node_rank[self.head]))

    def to_dot(self) -> str:
        lines = [f"digraph {self.form} {{", "  rankdir=LR;"]
        for k in range(self.num_nodes):
            lines.append(f'  n{k} [label="{self.label(k)}"];')
        for e in range(self.num_edges):
            lines.append(f'  n{self.tail[e]} -> n{self.head[e]} [label="{self.edge_kind[e]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EdgePairIndex:
    """Opposing move edges ``(u_t, v_{t+1})``/``(v_t, u_{t+1})`` per graph edge and step.

    ``edges[k]`` holds the two network edge ids; ``-1`` marks a side that the
    reduction removed.  ``graph_edge[k]`` and ``time[k]`` identify the pair.
    """

    edges: np.ndarray
    graph_edge: np.ndarray
    time: np.ndarray

    def __len__(self):
        return len(self.edges)


def build_abstracted_network(instance: Instance) -> tuple[FlowNetwork, EdgePairIndex]:
    graph = instance.graph
    n, T = graph.num_vertices, instance.deadline
    E = np.array(graph.edges, dtype=np.int64).reshape(-1, 2)
    m = len(E)

    node_vertex = np.tile(np.arange(n), T + 1)
    node_time = np.repeat(np.arange(T + 1), n)

    # per step: n wait edges, then for each graph edge (u,v): u->v, v->u
    per_step = n + 2 * m
    tails, heads = [], []
    for t in range(T):
        base, nxt = t * n, (t + 1) * n
        tails.append(base + np.arange(n))
        heads.append(nxt + np.arange(n))
        fwd_t, fwd_h = base + E[:, 0], nxt + E[:, 1]
        bwd_t, bwd_h = base + E[:, 1], nxt + E[:, 0]
        tails.append(np.stack([fwd_t, bwd_t], axis=1).ravel())
        heads.append(np.stack([fwd_h, bwd_h], axis=1).ravel())
    tail = np.concatenate(tails) if tails else np.zeros(0, dtype=np.int64)
    head = np.concatenate(heads) if heads else np.zeros(0, dtype=np.int64)
    kinds = ((WAIT,) * n + (MOVE,) * (2 * m)) * T

    step_offsets = np.arange(T) * per_step
    first = (step_offsets[:, None] + n + 2 * np.arange(m)[None, :]).ravel()
    pairs = EdgePairIndex(
        edges=np.stack([first, first + 1], axis=1).reshape(-1, 2),
        graph_edge=np.tile(np.arange(m), T),
        time=np.repeat(np.arange(T), m),
    )
    net = FlowNetwork(
        form="abstracted",
        deadline=T,
        num_graph_vertices=n,
        node_vertex=node_vertex,
        node_time=node_time,
        node_tag=(LAYER,) * len(node_vertex),
        node_rank=node_time.copy(),
        tail=tail.astype(np.int64),
        head=head.astype(np.int64),
        edge_kind=kinds,
        supply=tuple(int(s) for s in instance.starts),
        demand=tuple(int(T * n + g) for g in instance.goals),
    )
    return net, pairs


def build_full_network(instance: Instance) -> FlowNetwork:
    graph = instance.graph
    n, T = graph.num_vertices, instance.deadline
    vertex, time, tag, rank = [], [], [], []

    def add(v, t, g, r):
        vertex.append(v)
        time.append(t)
        tag.append(g)
        rank.append(r)
        return len(vertex) - 1

    out_id = np.zeros((T + 1, n), dtype=np.int64)
    in_id = np.full((T + 1, n), -1, dtype=np.int64)
    for v in range(n):
        out_id[0, v] = add(v, 0, OUT, 0)
    for t in range(1, T + 1):
        for v in range(n):
            in_id[t, v] = add(v, t, IN, 4 * t - 1)
            out_id[t, v] = add(v, t, OUT, 4 * t)

    tail, head, kind = [], [], []

    def link(a, b, k):
        tail.append(a)
        head.append(b)
        kind.append(k)

    for t in range(1, T + 1):
        for v in range(n):
            link(in_id[t, v], out_id[t, v], SPLIT)
    for t in range(T):
        for v in range(n):
            link(out_id[t, v], in_id[t + 1, v], WAIT)
        for k, (u, v) in enumerate(graph.edges):
            w1 = add(k, t, W1, 4 * t + 1)
            w2 = add(k, t, W2, 4 * t + 2)
            link(out_id[t, u], w1, GADGET)
            link(out_id[t, v], w1, GADGET)
            link(w1, w2, GADGET)
            link(w2, in_id[t + 1, u], GADGET)
            link(w2, in_id[t + 1, v], GADGET)

    return FlowNetwork(
        form="full",
        deadline=T,
        num_graph_vertices=n,
        node_vertex=np.array(vertex, dtype=np.int64),
        node_time=np.array(time, dtype=np.int64),
        node_tag=tuple(tag),
        node_rank=np.array(rank, dtype=np.int64),
        tail=np.array(tail, dtype=np.int64),
        head=np.array(head, dtype=np.int64),
        edge_kind=tuple(kind),
        supply=tuple(int(out_id[0, s]) for s in instance.starts),
        demand=tuple(int(out_id[T, g]) for g in instance.goals),
    )


def agent_distances(instance: Instance) -> list[tuple[np.ndarray, np.ndarray]]:
    """``(dist from start, dist to goal)`` per agent over the graph."""
    g = instance.graph
    return [(g.bfs_distances(s), g.bfs_distances(t)) for s, t in instance.agents]


def commodity_edge_masks(network: FlowNetwork, instance: Instance, distances=None) -> list[np.ndarray]:
    """Per agent, which edges of an abstracted/reduced network lie on one of its
    start-to-goal paths of length exactly the deadline.

    Layered BFS from ``(s_i)_0`` reaches ``v_t`` iff ``dist(s_i, v) <= t``
    (waiting is free), and ``v_t`` reaches ``(g_i)_T`` iff
    ``dist(v, g_i) <= T - t``, so graph distances give both searches.
    """
    if network.form == "full":
        raise ValueError("commodity edge sets are defined on abstracted networks")
    T = network.deadline
    if distances is None:
        distances = agent_distances(instance)
    u = network.node_vertex[network.tail]
    w = network.node_vertex[network.head]
    t = network.node_time[network.tail]
    return [(ds[u] <= t) & (dg[w] <= T - t - 1) for ds, dg in distances]


def reduce_network(abstracted: FlowNetwork, pairs: EdgePairIndex, instance: Instance):
    """Prune the abstracted network to what some agent can use.

    Returns ``(reduced, reduced_pairs, commodity_edges)`` where
    ``commodity_edges[i]`` is the sorted array of reduced edge ids agent ``i``
    can use.  An agent whose goal is farther than the deadline keeps nothing.
    """
    if abstracted.form != "abstracted":
        raise ValueError("reduce_network expects an abstracted network")
    T = abstracted.deadline
    distances = agent_distances(instance)

    node_keep = np.zeros(abstracted.num_nodes, dtype=bool)
    for ds, dg in distances:
        v, t = abstracted.node_vertex, abstracted.node_time
        node_keep |= (ds[v] <= t) & (dg[v] <= T - t)
    masks = commodity_edge_masks(abstracted, instance, distances)
    edge_keep = np.zeros(abstracted.num_edges, dtype=bool)
    for mk in masks:
        edge_keep |= mk
    assert np.all(node_keep[abstracted.tail[edge_keep]]) and np.all(node_keep[abstracted.head[edge_keep]])

    new_node = np.full(abstracted.num_nodes, -1, dtype=np.int64)
    kept_nodes = np.flatnonzero(node_keep)
    new_node[kept_nodes] = np.arange(len(kept_nodes))
    new_edge = np.full(abstracted.num_edges, -1, dtype=np.int64)
    kept_edges = np.flatnonzero(edge_keep)
    new_edge[kept_edges] = np.arange(len(kept_edges))

    def remap(node):
        r = int(new_node[node])
        return None if r < 0 else r

    reduced = FlowNetwork(
        form="reduced",
        deadline=T,
        num_graph_vertices=abstracted.num_graph_vertices,
        node_vertex=abstracted.node_vertex[kept_nodes],
        node_time=abstracted.node_time[kept_nodes],
        node_tag=(LAYER,) * len(kept_nodes),
        node_rank=abstracted.node_rank[kept_nodes],
        tail=new_node[abstracted.tail[kept_edges]],
        head=new_node[abstracted.head[kept_edges]],
        edge_kind=tuple(abstracted.edge_kind[e] for e in kept_edges),
        supply=tuple(remap(s) for s in abstracted.supply),
        demand=tuple(remap(d) for d in abstracted.demand),
        parent_node=kept_nodes,
        parent_edge=kept_edges,
    )
    mapped = new_edge[pairs.edges] if len(pairs) else pairs.edges.copy()
    live = (mapped >= 0).any(axis=1) if len(pairs) else np.zeros(0, dtype=bool)
    reduced_pairs = EdgePairIndex(mapped[live].reshape(-1, 2), pairs.graph_edge[live], pairs.time[live])
    commodity_edges = [new_edge[np.flatnonzero(mk)] for mk in masks]
    return reduced, reduced_pairs, commodity_edges


def commodity_edges(network: FlowNetwork, instance: Instance) -> list[np.ndarray]:
    """Per-agent usable edge ids of an abstracted or reduced network."""
    return [np.flatnonzero(mk) for mk in commodity_edge_masks(network, instance)]

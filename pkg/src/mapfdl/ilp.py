"""0/1 multi-commodity flow models over the time-expanded networks.

Variables are ``x_i[e]``: one per (commodity ``i``, network edge ``e``).
Constraint rows carry integer coefficients and right-hand sides only, and
are grouped into families in a fixed order:

compact model (abstracted or reduced network)
    ``conservation``  inflow - outflow = 0 per commodity at every node but
    its supply and demand node;
    ``coupling``      outflow at supply = inflow at demand, per commodity;
    ``vertex_out``    all commodities' outflow <= 1 at nodes of layers 0..T-1;
    ``vertex_in``     all commodities' inflow <= 1 at nodes of layers 1..T;
    ``anti_swap``     the two edges of an opposing pair carry <= 1 in total.

standard model (full gadget network)
    ``conservation``, ``coupling`` and ``edge_capacity`` (sum over
    commodities <= 1 on every edge).

The objective is the total outflow of every commodity at its supply node.
``vertex_in`` is redundant at interior layers but is the only thing that
bounds occupancy of the deadline layer.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .instance import Instance
from .network import EdgePairIndex, FlowNetwork

COMPACT_FAMILIES = ("conservation", "coupling", "vertex_out", "vertex_in", "anti_swap")
STANDARD_FAMILIES = ("conservation", "coupling", "edge_capacity")


@dataclass(frozen=True, eq=False)
class IlpModel:
    """Maximize ``objective @ x`` subject to ``A x (= or <=) rhs``, ``x`` binary.

    ``sense[r]`` is ``"E"`` or ``"L"``; ``row_family[r]`` names the family.
    ``var_commodity[j]``/``var_edge[j]`` identify variable ``j`` as ``x_i[e]``.
    """

    var_commodity: np.ndarray
    var_edge: np.ndarray
    objective: np.ndarray
    A: sp.csr_matrix
    sense: np.ndarray
    rhs: np.ndarray
    row_family: tuple[str, ...]
    num_commodities: int
    network_form: str

    @property
    def num_vars(self) -> int:
        return len(self.var_edge)

    @property
    def num_rows(self) -> int:
        return len(self.rhs)

    def family_rows(self, family: str) -> np.ndarray:
        return np.flatnonzero(np.array(self.row_family, dtype=object) == family)

    def commodity_vars(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.var_commodity == i)

    def objective_value(self, x) -> int:
        return int(self.objective @ np.asarray(x, dtype=np.int64))

    def violated_rows(self, x) -> np.ndarray:
        """Rows violated by integer assignment ``x`` (exact integer arithmetic)."""
        x = np.asarray(x)
        xi = np.rint(x).astype(np.int64)
        if x.size and (np.any(xi != x) or np.any((xi < 0) | (xi > 1))):
            raise ValueError("assignment is not 0/1")
        lhs = self.A @ xi
        bad = np.where(self.sense == "E", lhs != self.rhs, lhs > self.rhs)
        return np.flatnonzero(bad)

    def is_feasible(self, x) -> bool:
        return len(self.violated_rows(x)) == 0


class _RowBuilder:
    def __init__(self):
        self.rows, self.cols, self.vals = [], [], []
        self.sense, self.rhs, self.family = [], [], []
        self.count = 0

    def add_block(self, row_keys, cols, vals, sense, rhs, family):
        """Rows from entries keyed by arbitrary integer keys (ordered by key)."""
        row_keys = np.asarray(row_keys, dtype=np.int64)
        if row_keys.size == 0:
            return
        keys, local = np.unique(row_keys, return_inverse=True)
        self.rows.append(self.count + local)
        self.cols.append(np.asarray(cols, dtype=np.int64))
        self.vals.append(np.asarray(vals, dtype=np.int64))
        self.sense += [sense] * len(keys)
        self.rhs += [rhs] * len(keys)
        self.family += [family] * len(keys)
        self.count += len(keys)

    def matrix(self, num_vars):
        if self.count == 0:
            return sp.csr_matrix((0, num_vars), dtype=np.int64)
        A = sp.coo_matrix(
            (np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(self.count, num_vars),
        ).tocsr()
        A.sum_duplicates()
        A.eliminate_zeros()
        return A.astype(np.int64)


def _variables(network: FlowNetwork, per_commodity_edges: Optional[Sequence[np.ndarray]]):
    M = network.num_commodities
    if per_commodity_edges is None:
        per_commodity_edges = [np.arange(network.num_edges)] * M
    if len(per_commodity_edges) != M:
        raise ValueError("need one edge set per commodity")
    var_c = np.concatenate([np.full(len(es), i, dtype=np.int64) for i, es in enumerate(per_commodity_edges)] or
                           [np.zeros(0, dtype=np.int64)])
    var_e = np.concatenate([np.sort(np.asarray(es, dtype=np.int64)) for es in per_commodity_edges] or
                           [np.zeros(0, dtype=np.int64)])
    return var_c, var_e


def _flow_rows(rb: _RowBuilder, network: FlowNetwork, var_c, var_e):
    """Conservation and coupling rows plus the objective vector."""
    N = network.num_nodes
    tail_v, head_v = network.tail[var_e], network.head[var_e]
    cols = np.arange(len(var_e))
    supply = np.array([-1 if s is None else s for s in network.supply], dtype=np.int64)
    demand = np.array([-1 if d is None else d for d in network.demand], dtype=np.int64)

    keys = np.concatenate([var_c * N + head_v, var_c * N + tail_v])
    ccols = np.concatenate([cols, cols])
    vals = np.concatenate([np.ones(len(cols)), -np.ones(len(cols))]).astype(np.int64)
    node = keys % N
    comm = keys // N
    if len(supply):
        keep = (node != supply[comm]) & (node != demand[comm])
    else:
        keep = np.zeros(0, dtype=bool)
    rb.add_block(keys[keep], ccols[keep], vals[keep], "E", 0, "conservation")

    at_supply = (len(supply) > 0) & (tail_v == supply[var_c]) if len(var_c) else np.zeros(0, dtype=bool)
    at_demand = (head_v == demand[var_c]) if len(var_c) else np.zeros(0, dtype=bool)
    rb.add_block(
        np.concatenate([var_c[at_supply], var_c[at_demand]]),
        np.concatenate([cols[at_supply], cols[at_demand]]),
        np.concatenate([np.ones(at_supply.sum()), -np.ones(at_demand.sum())]).astype(np.int64),
        "E", 0, "coupling",
    )
    return at_supply.astype(np.int64)


def _finish(rb, var_c, var_e, objective, network, families):
    A = rb.matrix(len(var_e))
    return IlpModel(
        var_commodity=var_c,
        var_edge=var_e,
        objective=objective,
        A=A,
        sense=np.array(rb.sense, dtype="<U1"),
        rhs=np.array(rb.rhs, dtype=np.int64),
        row_family=tuple(rb.family),
        num_commodities=network.num_commodities,
        network_form=network.form,
    )


def build_compact_ilp(
    network: FlowNetwork,
    pairs: EdgePairIndex,
    instance: Instance,
    per_commodity_edges: Optional[Sequence[np.ndarray]] = None,
) -> IlpModel:
    """Compact model on an abstracted or reduced network.

    With ``per_commodity_edges`` the variable ``x_i[e]`` exists only for the
    edges listed for agent ``i``; otherwise every commodity gets every edge.
    Anti-swap rows are emitted for pairs whose both sides survive; a lone
    side is already limited by ``vertex_out`` at its tail.
    """
    if network.form == "full":
        raise ValueError("compact model needs an abstracted or reduced network")
    if network.num_commodities != instance.num_agents:
        raise ValueError("network and instance disagree on the number of agents")
    var_c, var_e = _variables(network, per_commodity_edges)
    rb = _RowBuilder()
    objective = _flow_rows(rb, network, var_c, var_e)

    cols = np.arange(len(var_e))
    T = network.deadline
    tail_v, head_v = network.tail[var_e], network.head[var_e]
    ones = np.ones(len(cols), dtype=np.int64)
    out_ok = network.node_time[tail_v] <= T - 1
    rb.add_block(tail_v[out_ok], cols[out_ok], ones[out_ok], "L", 1, "vertex_out")
    in_ok = network.node_time[head_v] >= 1
    rb.add_block(head_v[in_ok], cols[in_ok], ones[in_ok], "L", 1, "vertex_in")

    pair_of = np.full(network.num_edges, -1, dtype=np.int64)
    if len(pairs):
        both = (pairs.edges >= 0).all(axis=1)
        idx = np.flatnonzero(both)
        pair_of[pairs.edges[idx, 0]] = idx
        pair_of[pairs.edges[idx, 1]] = idx
    in_pair = pair_of[var_e] >= 0
    rb.add_block(pair_of[var_e][in_pair], cols[in_pair], ones[in_pair], "L", 1, "anti_swap")
    return _finish(rb, var_c, var_e, objective, network, COMPACT_FAMILIES)


def build_full_ilp(network: FlowNetwork, instance: Instance) -> IlpModel:
    """Standard multi-commodity model on the full gadget network."""
    if network.form != "full":
        raise ValueError("standard model needs the full network")
    var_c, var_e = _variables(network, None)
    rb = _RowBuilder()
    objective = _flow_rows(rb, network, var_c, var_e)
    cols = np.arange(len(var_e))
    rb.add_block(var_e, cols, np.ones(len(cols), dtype=np.int64), "L", 1, "edge_capacity")
    return _finish(rb, var_c, var_e, objective, network, STANDARD_FAMILIES)


# -- writers ----------------------------------------------------------------

def _col_name(j: int) -> str:
    return f"X{j:07d}"


def _row_name(r: int) -> str:
    return f"R{r:07d}"


def export_mps(model: IlpModel, name: str = "MAPFDL") -> str:
    """Fixed-format MPS text; rows in family order, columns in (commodity, edge) order."""
    if model.num_vars >= 10**7 or model.num_rows >= 10**7:
        raise ValueError("model too large for 8-character fixed-format names")
    out = [f"NAME          {name}", "OBJSENSE", "    MAX", "ROWS", " N  OBJ"]
    for r in range(model.num_rows):
        out.append(f" {model.sense[r]:<2} {_row_name(r)}")
    out.append("COLUMNS")
    A = model.A.tocsc()
    A.sort_indices()
    for j in range(model.num_vars):
        col = _col_name(j)
        if model.objective[j]:
            out.append(f"    {col:<8}  {'OBJ':<8}  {int(model.objective[j]):>12}")
        for k in range(A.indptr[j], A.indptr[j + 1]):
            out.append(f"    {col:<8}  {_row_name(int(A.indices[k])):<8}  {int(A.data[k]):>12}")
    out.append("RHS")
    for r in np.flatnonzero(model.rhs):
        out.append(f"    {'RHS':<8}  {_row_name(int(r)):<8}  {int(model.rhs[r]):>12}")
    out.append("BOUNDS")
    for j in range(model.num_vars):
        out.append(f" BV {'BND':<8}  {_col_name(j)}")
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def export_lp(model: IlpModel) -> str:
    """CPLEX-style LP text with readable ``x<commodity>_<edge>`` names."""
    names = [f"x{int(c)}_{int(e)}" for c, e in zip(model.var_commodity, model.var_edge)]

    def expr(idx, coef):
        if len(idx) == 0:
            return "0 " + (names[0] if names else "")
        parts = []
        for j, a in zip(idx, coef):
            sign = "-" if a < 0 else "+"
            mag = "" if abs(a) == 1 else f"{abs(int(a))} "
            parts.append(f"{sign} {mag}{names[j]}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else s

    obj = np.flatnonzero(model.objective)
    lines = ["\\ MAPF-DL compact model", "Maximize", f" obj: {expr(obj, model.objective[obj])}", "Subject To"]
    A = model.A
    for r in range(model.num_rows):
        lo, hi = A.indptr[r], A.indptr[r + 1]
        op = "=" if model.sense[r] == "E" else "<="
        lines.append(f" {model.row_family[r]}_{r}: {expr(A.indices[lo:hi], A.data[lo:hi])} {op} {int(model.rhs[r])}")
    lines.append("Binaries")
    for k in range(0, len(names), 8):
        lines.append(" " + " ".join(names[k:k + 8]))
    lines.append("End")
    return "\n".join(lines) + "\n"

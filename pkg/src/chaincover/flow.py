"""Vertex-split flow reduction, minimum flow and path-cover decomposition.

Node ids of the reduction for a DAG on ``n`` vertices: source ``S = 0``,
``v_in = 2v + 1``, ``v_out = 2v + 2`` and sink ``T = 2n + 1``. Edge ids come in
four consecutive blocks: ``S -> v_in`` (``v``), ``v_in -> v_out`` (``n + v``),
``v_out -> T`` (``2n + v``) and ``u_out -> v_in`` for the i-th DAG edge
(``3n + i``). Only the split edges carry a demand (of one unit).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .dag import Dag
from .errors import MalformedFlow

SOURCE = 0


@njit
def _dinic(n_nodes, arc_to, arc_res, adj_ptr, adj_arcs, source, sink):
    """Blocking-flow max flow on a residual arc list (arc ``a ^ 1`` reverses ``a``).

    ``arc_res`` is updated in place; returns the flow value.
    """
    level = np.empty(n_nodes, np.int64)
    it = np.empty(n_nodes, np.int64)
    queue = np.empty(n_nodes, np.int64)
    path = np.empty(n_nodes, np.int64)
    total = 0
    while True:
        level[:] = -1
        level[source] = 0
        queue[0] = source
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            for p in range(adj_ptr[u], adj_ptr[u + 1]):
                a = adj_arcs[p]
                w = arc_to[a]
                if arc_res[a] > 0 and level[w] < 0:
                    level[w] = level[u] + 1
                    queue[tail] = w
                    tail += 1
        if level[sink] < 0:
            break
        for u in range(n_nodes):
            it[u] = adj_ptr[u]
        depth = 0
        u = source
        while True:
            if u == sink:
                push = arc_res[path[0]]
                for i in range(1, depth):
                    if arc_res[path[i]] < push:
                        push = arc_res[path[i]]
                for i in range(depth):
                    a = path[i]
                    arc_res[a] -= push
                    arc_res[a ^ 1] += push
                total += push
                # resume from the tail of the first saturated arc
                for i in range(depth):
                    if arc_res[path[i]] == 0:
                        depth = i
                        break
                u = arc_to[path[depth] ^ 1]
                continue
            advanced = False
            while it[u] < adj_ptr[u + 1]:
                a = adj_arcs[it[u]]
                w = arc_to[a]
                if arc_res[a] > 0 and level[w] == level[u] + 1:
                    path[depth] = a
                    depth += 1
                    u = w
                    advanced = True
                    break
                it[u] += 1
            if advanced:
                continue
            if u == source:
                break
            level[u] = -1
            depth -= 1
            u = arc_to[path[depth] ^ 1]
            it[u] += 1
    return total


def max_flow(n_nodes: int, tail, head, cap, source: int, sink: int, rev_cap=None):
    """Maximum integral ``source -> sink`` flow (Dinic).

    Each edge ``e`` may be crossed forwards up to ``cap[e]`` and, when
    ``rev_cap`` is given, backwards up to ``rev_cap[e]``. Returns the flow value
    and the net flow per edge (negative when the edge is used backwards).
    Ties are resolved by edge id, so results are deterministic.
    """
    tail = np.asarray(tail, dtype=np.int64)
    head = np.asarray(head, dtype=np.int64)
    cap = np.asarray(cap, dtype=np.int64)
    m = tail.shape[0]
    arc_to = np.empty(2 * m, np.int64)
    arc_to[0::2] = head
    arc_to[1::2] = tail
    arc_res = np.empty(2 * m, np.int64)
    arc_res[0::2] = cap
    arc_res[1::2] = 0 if rev_cap is None else np.asarray(rev_cap, dtype=np.int64)
    origin = np.empty(2 * m, np.int64)
    origin[0::2] = tail
    origin[1::2] = head
    adj_arcs = np.argsort(origin, kind="stable").astype(np.int64)
    adj_ptr = np.zeros(n_nodes + 1, np.int64)
    np.cumsum(np.bincount(origin, minlength=n_nodes), out=adj_ptr[1:])
    if source == sink:
        return 0, np.zeros(m, np.int64)
    value = _dinic(n_nodes, arc_to, arc_res, adj_ptr, adj_arcs, source, sink)
    return int(value), cap - arc_res[0::2]


@dataclass(frozen=True, eq=False)
class FlowNetwork:
    """The vertex-split reduction of a :class:`Dag` (see module docstring)."""

    dag: Dag
    tail: np.ndarray
    head: np.ndarray
    demand: np.ndarray

    @property
    def n(self) -> int:
        return self.dag.n

    @property
    def node_count(self) -> int:
        return 2 * self.dag.n + 2

    @property
    def edge_count(self) -> int:
        return self.tail.shape[0]

    @property
    def source(self) -> int:
        return SOURCE

    @property
    def sink(self) -> int:
        return 2 * self.dag.n + 1

    @staticmethod
    def v_in(v):
        return 2 * v + 1

    @staticmethod
    def v_out(v):
        return 2 * v + 2

    def s_edge(self, v):
        return v

    def split_edge(self, v):
        return self.n + v

    def t_edge(self, v):
        return 2 * self.n + v

    def dag_edge(self, i):
        return 3 * self.n + i

    def topological_nodes(self) -> np.ndarray:
        """``S, v1_in, v1_out, ..., T`` following the DAG's topological order."""
        topo = self.dag.topo
        mid = np.empty(2 * self.n, np.int64)
        mid[0::2] = 2 * topo + 1
        mid[1::2] = 2 * topo + 2
        return np.concatenate([[SOURCE], mid, [self.sink]])

    def dump(self, flow=None) -> str:
        """``tail head demand flow`` per edge, in edge-id order."""
        f = np.zeros(self.edge_count, np.int64) if flow is None else np.asarray(flow)
        rows = np.stack([self.tail, self.head, self.demand, f], axis=1)
        return "".join(f"{a} {b} {c} {d}\n" for a, b, c, d in rows.tolist())


@dataclass(frozen=True, eq=False)
class FlowAssignment:
    network: FlowNetwork
    flow: np.ndarray

    @property
    def size(self) -> int:
        """Net flow into the sink."""
        n = self.network.n
        return int(self.flow[2 * n:3 * n].sum())

    def s_flow(self) -> np.ndarray:
        n = self.network.n
        return self.flow[:n]

    def split_flow(self) -> np.ndarray:
        n = self.network.n
        return self.flow[n:2 * n]

    def t_flow(self) -> np.ndarray:
        n = self.network.n
        return self.flow[2 * n:3 * n]

    def dag_edge_flow(self) -> np.ndarray:
        return self.flow[3 * self.network.n:]


def build_reduction(dag: Dag) -> FlowNetwork:
    n = dag.n
    v = np.arange(n, dtype=np.int64)
    v_in, v_out = 2 * v + 1, 2 * v + 2
    sink = 2 * n + 1
    tail = np.concatenate([
        np.zeros(n, np.int64), v_in, v_out, 2 * dag.edges[:, 0] + 2,
    ])
    head = np.concatenate([
        v_in, v_out, np.full(n, sink, np.int64), 2 * dag.edges[:, 1] + 1,
    ])
    demand = np.zeros(3 * n + dag.m, np.int64)
    demand[n:2 * n] = 1
    for a in (tail, head, demand):
        a.setflags(write=False)
    return FlowNetwork(dag, tail, head, demand)


def conservation_violations(network: FlowNetwork, flow) -> np.ndarray:
    """Internal nodes whose inflow differs from their outflow."""
    f = np.asarray(flow, dtype=np.int64)
    nn = network.node_count
    balance = np.bincount(network.head, weights=f, minlength=nn) - np.bincount(
        network.tail, weights=f, minlength=nn)
    bad = np.flatnonzero(balance != 0)
    return bad[(bad != network.source) & (bad != network.sink)]


def check_flow(network: FlowNetwork, flow, demands: bool = True) -> None:
    """Raise :class:`MalformedFlow` unless ``flow`` is a valid S-T flow."""
    f = np.asarray(flow, dtype=np.int64)
    if f.shape != (network.edge_count,):
        raise MalformedFlow(f"expected {network.edge_count} edge flows, got {f.shape}")
    neg = np.flatnonzero(f < 0)
    if neg.size:
        raise MalformedFlow(f"negative flow on edge {int(neg[0])}")
    if demands:
        short = np.flatnonzero(f < network.demand)
        if short.size:
            e = int(short[0])
            raise MalformedFlow(f"demand of edge {e} unmet (vertex {e - network.n})")
    bad = conservation_violations(network, f)
    if bad.size:
        raise MalformedFlow(f"flow conservation broken at node {int(bad[0])}")


def feasible_flow(network: FlowNetwork) -> FlowAssignment:
    """One unit along ``S -> v_in -> v_out -> T`` for every vertex."""
    n = network.n
    f = np.zeros(network.edge_count, np.int64)
    f[:3 * n] = 1
    return FlowAssignment(network, f)


def min_flow(network: FlowNetwork) -> FlowAssignment:
    """Minimum flow meeting the unit demands; its size is the DAG's width.

    Starts from :func:`feasible_flow` and cancels as much of it as possible
    with one maximum ``T -> S`` flow in the residual network: an edge may lose
    up to ``f0(e) - d(e)`` units and gain up to ``n`` units (no vertex lies on
    more than ``n`` paths of a minimum path cover).
    """
    n = network.n
    f0 = feasible_flow(network).flow
    grow = np.full(network.edge_count, n, np.int64)
    shrink = f0 - network.demand
    _, delta = max_flow(network.node_count, network.tail, network.head, grow,
                        network.sink, network.source, rev_cap=shrink)
    flow = f0 + delta
    flow.setflags(write=False)
    return FlowAssignment(network, flow)


@njit
def _decompose(n, out_ptr, out_edges, head, remaining, n_paths, total_len):
    cursor = out_ptr[:-1].copy()
    verts = np.empty(total_len, np.int64)
    offsets = np.zeros(n_paths + 1, np.int64)
    sink = 2 * n + 1
    pos = 0
    for p in range(n_paths):
        x = 0
        while x != sink:
            while cursor[x] < out_ptr[x + 1] and remaining[out_edges[cursor[x]]] == 0:
                cursor[x] += 1
            if cursor[x] == out_ptr[x + 1] or pos > total_len:
                return offsets, verts, -1 - x
            e = out_edges[cursor[x]]
            remaining[e] -= 1
            x = head[e]
            if x != sink and x % 2 == 1:
                if pos == total_len:
                    return offsets, verts, -1 - x
                verts[pos] = (x - 1) // 2
                pos += 1
        offsets[p + 1] = pos
    return offsets, verts, pos


def decompose_to_mpc(dag: Dag, flow: FlowAssignment) -> list[list[int]]:
    """Peel ``|f|`` unit S-T paths off ``flow`` and map them back to DAG paths.

    Each walk follows the lowest-id out-edge that still has flow, with one
    persistent cursor per node, so the total work is linear in the output.
    """
    network = flow.network
    check_flow(network, flow.flow)
    order = np.argsort(network.tail, kind="stable").astype(np.int64)
    out_ptr = np.zeros(network.node_count + 1, np.int64)
    np.cumsum(np.bincount(network.tail, minlength=network.node_count), out=out_ptr[1:])
    remaining = np.array(flow.flow, dtype=np.int64)
    n_paths = int(flow.s_flow().sum())
    total = int(flow.split_flow().sum())
    offsets, verts, status = _decompose(
        dag.n, out_ptr, order, np.asarray(network.head, np.int64), remaining,
        n_paths, total)
    if status < 0 or status != total or remaining.any():
        raise MalformedFlow("flow does not decompose into S-T paths")
    return [verts[offsets[i]:offsets[i + 1]].tolist() for i in range(n_paths)]

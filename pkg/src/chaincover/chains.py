"""Chain extraction from a path-encoding flow.

Both extractors walk the DAG in topological order and maintain, for every
processed vertex ``v``, the set ``I_v`` of path indices that pass through it:
``I_v`` takes ``f(S, v_in)`` indices from the source pool and ``f(u_out, v_in)``
indices from each in-neighbour ``u`` (ascending ``u``). ``v`` is then appended
to the chain of one index of ``I_v``. Indices never leave the partition; those
that would flow on to ``T`` simply stay in their last ``I_v``.

``extract_mcd_naive`` keeps the sets as linked lists (a take of ``c`` indices
costs ``c``), ``extract_mcd`` keeps them in a :class:`TriePartition`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .dag import ChainDecomposition, Dag, reaches_pairs
from .errors import MalformedFlow
from .flow import FlowAssignment, check_flow
from .trie import COUNT, NIL, TriePartition, k_merge, k_search, k_size_split

__all__ = [
    "ExtractionStats",
    "extract_mcd",
    "extract_mcd_naive",
    "extract_chains_from_flow",
    "validate_mcd",
    "Violation",
]


@dataclass
class ExtractionStats:
    """Work counters of one extraction run.

    For the trie extractor ``dict_ops`` counts SIZE-SPLIT, MERGE and SOME calls
    and ``node_visits`` trie nodes touched. For the linked-list extractor
    ``dict_ops`` counts takes, unions and picks and ``node_visits`` counts
    index moves (list cells walked by takes).
    """

    algorithm: str
    dict_ops: int = 0
    node_visits: int = 0
    nodes_created: int = 0
    nodes_freed: int = 0
    dropped_chains: int = 0

    @property
    def index_moves(self) -> int:
        return self.node_visits


@njit
def _extract_trie(nodes, free, meta, depth, k, pool, topo, in_ptr, in_flow, in_src, s_flow,
                  chain_of):
    """Trie-backed index propagation from the pool trie ``pool`` = {1..k}.

    Returns ``-1``, or ``-(v + 2)`` when vertex ``v`` asks for missing indices.
    """
    n = topo.shape[0]
    vroot = np.full(n, NIL, np.int64)
    for t in range(n):
        v = topo[t]
        cur = NIL
        f = s_flow[v]
        if f > 0:
            have = nodes[pool, COUNT] if pool != NIL else 0
            if f > have:
                return -(v + 2)
            cur, pool = k_size_split(nodes, free, meta, depth, pool, f)
        for p in range(in_ptr[v], in_ptr[v + 1]):
            f = in_flow[p]
            if f == 0:
                continue
            u = in_src[p]
            ru = vroot[u]
            have = nodes[ru, COUNT] if ru != NIL else 0
            if f > have:
                return -(v + 2)
            taken, rest = k_size_split(nodes, free, meta, depth, ru, f)
            vroot[u] = rest
            cur = k_merge(nodes, free, meta, depth, cur, taken)
            if cur < 0:
                return -(v + 2)
        vroot[v] = cur
        if cur == NIL:
            chain_of[v] = 0
        else:
            chain_of[v] = k_search(nodes, meta, depth, cur, k)
    return -1


@njit
def _extract_lists(k, topo, in_ptr, in_flow, in_src, s_flow, chain_of, counters):
    """Linked-list index propagation; fills ``counters = [ops, index moves]``."""
    n = topo.shape[0]
    nxt = np.full(k + 1, -1, np.int64)
    for i in range(1, k):
        nxt[i] = i + 1
    first = np.full(n, -1, np.int64)
    size = np.zeros(n, np.int64)
    pool_first = 1
    pool_size = k
    ops = 0
    moves = 0
    for t in range(n):
        v = topo[t]
        head = -1
        tail = -1
        total = 0
        # position in_ptr[v] - 1 stands for the edge from S
        for p in range(in_ptr[v] - 1, in_ptr[v + 1]):
            u = -1
            if p < in_ptr[v]:
                f = s_flow[v]
                src = pool_first
                have = pool_size
            else:
                f = in_flow[p]
                u = in_src[p]
                src = first[u]
                have = size[u]
            if f == 0:
                continue
            if f > have:
                return -(v + 2)
            # take f cells off the front of the source list
            end = src
            for _ in range(f - 1):
                end = nxt[end]
            moves += f
            ops += 1
            rest = nxt[end]
            nxt[end] = -1
            if u < 0:
                pool_first = rest
                pool_size -= f
            else:
                first[u] = rest
                size[u] -= f
            if head == -1:
                head = src
            else:
                nxt[tail] = src
                ops += 1
            tail = end
            total += f
        first[v] = head
        size[v] = total
        if head == -1:
            chain_of[v] = 0
        else:
            chain_of[v] = head
            ops += 1
    counters[0] = ops
    counters[1] = moves
    return -1


def _in_arrays(dag: Dag, flow: FlowAssignment):
    """In-adjacency of ``dag`` with the flow of each in-edge aligned to it."""
    edge_flow = flow.dag_edge_flow()
    # dag.edges is sorted by (u, v); the in-CSR lists sources ascending per v
    order = np.lexsort((dag.edges[:, 0], dag.edges[:, 1]))
    return (
        np.asarray(dag.in_ptr, np.int64),
        np.ascontiguousarray(edge_flow[order], dtype=np.int64),
        np.asarray(dag.in_idx, np.int64),
        np.ascontiguousarray(flow.s_flow(), dtype=np.int64),
    )


def _group(dag: Dag, chain_of: np.ndarray, k: int) -> list[list[int]]:
    chains: list[list[int]] = [[] for _ in range(k)]
    for v in dag.topo[chain_of[dag.topo] > 0].tolist():
        chains[chain_of[v] - 1].append(v)
    return chains


def _run_trie(dag: Dag, flow: FlowAssignment, k: int):
    in_ptr, in_flow, in_src, s_flow = _in_arrays(dag, flow)
    chain_of = np.zeros(dag.n, np.int64)
    tp = TriePartition(k)
    before = tp.counters
    status = _extract_trie(tp.nodes, tp.free, tp.meta, tp.depth, k, tp.root_of(tp.initial),
                           np.asarray(dag.topo, np.int64), in_ptr, in_flow, in_src,
                           s_flow, chain_of)
    if status != -1:
        v = -status - 2
        raise MalformedFlow(f"vertex {v}: flow asks for more indices than are available")
    after = tp.counters
    stats = ExtractionStats(
        algorithm="boosted",
        dict_ops=after.ops - before.ops,
        node_visits=after.nodes_visited - before.nodes_visited,
        nodes_created=after.nodes_created - before.nodes_created,
        nodes_freed=after.nodes_freed - before.nodes_freed,
    )
    return chain_of, stats


def _flow_size(flow: FlowAssignment) -> int:
    return int(flow.s_flow().sum())


def extract_mcd(dag: Dag, flow: FlowAssignment, return_stats: bool = False):
    """Minimum chain decomposition from a minimum flow, via mergeable dictionaries.

    ``flow`` must satisfy conservation and the unit demands. The result has
    ``|flow|`` chains and every vertex in exactly one of them.
    """
    check_flow(flow.network, flow.flow, demands=True)
    k = _flow_size(flow)
    chain_of, stats = _run_trie(dag, flow, k)
    if (chain_of == 0).any():
        raise MalformedFlow(f"vertex {int(np.flatnonzero(chain_of == 0)[0])} got no index")
    result = ChainDecomposition(_group(dag, chain_of, k))
    return (result, stats) if return_stats else result


def extract_chains_from_flow(dag: Dag, flow: FlowAssignment, return_stats: bool = False):
    """Vertex-disjoint chains from any flow that encodes ``|flow|`` paths.

    Demands are not required. Vertices without throughput are left out, and
    indices whose path only visits vertices that picked another index yield
    an empty chain, which is dropped (``stats.dropped_chains`` counts them).
    """
    check_flow(flow.network, flow.flow, demands=False)
    k = _flow_size(flow)
    if k == 0:
        stats = ExtractionStats(algorithm="boosted")
        return (ChainDecomposition([]), stats) if return_stats else ChainDecomposition([])
    chain_of, stats = _run_trie(dag, flow, k)
    chains = _group(dag, chain_of, k)
    kept = [c for c in chains if c]
    stats.dropped_chains = len(chains) - len(kept)
    result = ChainDecomposition(kept)
    return (result, stats) if return_stats else result


def extract_mcd_naive(dag: Dag, flow: FlowAssignment, return_stats: bool = False):
    """Same contract as :func:`extract_mcd` with linked-list index sets.

    Takes remove indices from the front of a list and the picked index is the
    head of ``I_v``; the cost is proportional to the total path length.
    """
    check_flow(flow.network, flow.flow, demands=True)
    k = _flow_size(flow)
    in_ptr, in_flow, in_src, s_flow = _in_arrays(dag, flow)
    chain_of = np.zeros(dag.n, np.int64)
    counters = np.zeros(2, np.int64)
    status = _extract_lists(k, np.asarray(dag.topo, np.int64), in_ptr, in_flow, in_src,
                            s_flow, chain_of, counters)
    if status != -1:
        raise MalformedFlow(f"vertex {-status - 2}: flow asks for more indices than are available")
    if (chain_of == 0).any():
        raise MalformedFlow(f"vertex {int(np.flatnonzero(chain_of == 0)[0])} got no index")
    stats = ExtractionStats(algorithm="naive", dict_ops=int(counters[0]),
                            node_visits=int(counters[1]))
    result = ChainDecomposition(_group(dag, chain_of, k))
    return (result, stats) if return_stats else result


@dataclass(frozen=True)
class Violation:
    """First problem found by :func:`validate_mcd`.

    ``kind`` is one of ``VertexOutOfRange``, ``DuplicateVertex``,
    ``MissingVertex``, ``EmptyChain``, ``NotAChain``, ``WrongChainCount`` or
    ``WrongTotalLength``; ``where`` holds the coordinates.
    """

    kind: str
    where: tuple

    def __str__(self):
        return f"{self.kind}{self.where}"


def validate_mcd(dag: Dag, chains, expected_k: int | None = None) -> Violation | None:
    """Check that ``chains`` is a chain decomposition of ``dag``; None means ok."""
    chains = chains.chains if isinstance(chains, ChainDecomposition) else chains
    seen = np.zeros(dag.n, bool)
    for i, chain in enumerate(chains):
        if not chain:
            return Violation("EmptyChain", (i,))
        for v in chain:
            if not 0 <= v < dag.n:
                return Violation("VertexOutOfRange", (v,))
            if seen[v]:
                return Violation("DuplicateVertex", (v,))
            seen[v] = True
    if not seen.all():
        return Violation("MissingVertex", (int(np.flatnonzero(~seen)[0]),))
    us, vs, coords = [], [], []
    for i, chain in enumerate(chains):
        for p in range(len(chain) - 1):
            us.append(chain[p])
            vs.append(chain[p + 1])
            coords.append((i, p))
    if us:
        ok = reaches_pairs(dag, us, vs)
        if not ok.all():
            return Violation("NotAChain", coords[int(np.flatnonzero(~ok)[0])])
    if expected_k is not None and len(chains) != expected_k:
        return Violation("WrongChainCount", (expected_k, len(chains)))
    total = sum(len(c) for c in chains)
    if total != dag.n:
        return Violation("WrongTotalLength", (dag.n, total))
    return None

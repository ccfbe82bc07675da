"""DAG representation, topological ordering, edge-list I/O and generators."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._jit import njit
from .errors import ArgumentError, CycleDetected, ParseError

__all__ = [
    "Dag",
    "ChainDecomposition",
    "topological_sort",
    "parse_dag",
    "serialize_dag",
    "gen_worst_case",
    "gen_random_dag",
    "reaches",
    "parse_chains",
    "serialize_chains",
]


@njit
def _kahn(n, out_ptr, out_idx):
    indeg = np.zeros(n, np.int64)
    for p in range(out_idx.shape[0]):
        indeg[out_idx[p]] += 1
    order = np.empty(n, np.int64)
    head = 0
    tail = 0
    for v in range(n):
        if indeg[v] == 0:
            order[tail] = v
            tail += 1
    while head < tail:
        u = order[head]
        head += 1
        for p in range(out_ptr[u], out_ptr[u + 1]):
            w = out_idx[p]
            indeg[w] -= 1
            if indeg[w] == 0:
                order[tail] = w
                tail += 1
    # tail < n means some vertices sit on a cycle
    return order, tail


@njit
def _reaches_many(out_ptr, out_idx, pos, us, vs):
    n = pos.shape[0]
    out = np.zeros(us.shape[0], np.bool_)
    stamp = np.zeros(n, np.int64)
    stack = np.empty(n, np.int64)
    for q in range(us.shape[0]):
        u = us[q]
        v = vs[q]
        if u == v:
            out[q] = True
            continue
        limit = pos[v]
        if pos[u] > limit:
            continue
        mark = q + 1
        stamp[u] = mark
        stack[0] = u
        top = 1
        found = False
        while top > 0 and not found:
            top -= 1
            x = stack[top]
            for p in range(out_ptr[x], out_ptr[x + 1]):
                w = out_idx[p]
                if w == v:
                    found = True
                    break
                # nothing after v in topological order can reach v
                if stamp[w] != mark and pos[w] < limit:
                    stamp[w] = mark
                    stack[top] = w
                    top += 1
        out[q] = found
    return out


def _csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((dst, src))
    ptr = np.zeros(n + 1, np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=ptr[1:])
    return ptr, np.ascontiguousarray(dst[order], dtype=np.int64)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def topological_sort(n: int, edges) -> np.ndarray:
    """Kahn ordering; ties are broken FIFO from ascending vertex ids.

    Raises:
        CycleDetected: if the graph has a proper cycle.
    """
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    ptr, idx = _csr(n, e[:, 0], e[:, 1])
    order, count = _kahn(n, ptr, idx)
    if count < n:
        raise CycleDetected(f"graph has a cycle through {n - count} vertices")
    return order


@dataclass(frozen=True, eq=False)
class Dag:
    """Immutable DAG on vertices ``0..n-1``.

    Edges are kept sorted and unique. Adjacency is stored as CSR arrays
    (``out_ptr``/``out_idx`` and ``in_ptr``/``in_idx``), both sorted by
    neighbour id. ``topo`` is a topological order and ``pos`` its inverse.
    """

    n: int
    edges: np.ndarray
    topo: np.ndarray
    pos: np.ndarray = field(repr=False)
    out_ptr: np.ndarray = field(repr=False)
    out_idx: np.ndarray = field(repr=False)
    in_ptr: np.ndarray = field(repr=False)
    in_idx: np.ndarray = field(repr=False)

    @classmethod
    def from_edges(cls, n: int, edges=()) -> "Dag":
        if n < 1:
            raise ArgumentError(f"a DAG needs at least one vertex, got n={n}")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e.min() < 0 or e.max() >= n:
                raise ArgumentError(f"vertex id out of range [0, {n})")
            loops = e[:, 0] == e[:, 1]
            if loops.any():
                v = int(e[loops][0, 0])
                raise ArgumentError(f"self-loop on vertex {v}")
            e = np.unique(e, axis=0)
        src, dst = e[:, 0].copy(), e[:, 1].copy()
        out_ptr, out_idx = _csr(n, src, dst)
        in_ptr, in_idx = _csr(n, dst, src)
        order, count = _kahn(n, out_ptr, out_idx)
        if count < n:
            raise CycleDetected(f"graph has a cycle through {n - count} vertices")
        pos = np.empty(n, np.int64)
        pos[order] = np.arange(n, dtype=np.int64)
        return cls(
            n=int(n),
            edges=_frozen(np.ascontiguousarray(e)),
            topo=_frozen(order),
            pos=_frozen(pos),
            out_ptr=_frozen(out_ptr),
            out_idx=_frozen(out_idx),
            in_ptr=_frozen(in_ptr),
            in_idx=_frozen(in_idx),
        )

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.out_idx[self.out_ptr[v]:self.out_ptr[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.in_idx[self.in_ptr[v]:self.in_ptr[v + 1]]

    @property
    def out_adj(self) -> list[list[int]]:
        return [self.out_neighbors(v).tolist() for v in range(self.n)]

    @property
    def in_adj(self) -> list[list[int]]:
        return [self.in_neighbors(v).tolist() for v in range(self.n)]

    def edge_list(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in self.edges]

    def relabel(self, perm) -> "Dag":
        """Same graph with vertex ``v`` renamed to ``perm[v]``."""
        p = np.asarray(perm, dtype=np.int64)
        return Dag.from_edges(self.n, p[self.edges])

    def __eq__(self, other):
        if not isinstance(other, Dag):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))


@dataclass
class ChainDecomposition:
    chains: list[list[int]]

    @property
    def k(self) -> int:
        return len(self.chains)

    @property
    def total_length(self) -> int:
        return sum(len(c) for c in self.chains)

    def __iter__(self):
        return iter(self.chains)

    def __len__(self):
        return len(self.chains)


def reaches(dag: Dag, u: int, v: int) -> bool:
    """True iff there is a (possibly empty) path from ``u`` to ``v``."""
    for x in (u, v):
        if not 0 <= x < dag.n:
            raise ArgumentError(f"vertex {x} out of range")
    res = _reaches_many(
        dag.out_ptr, dag.out_idx, dag.pos,
        np.array([u], np.int64), np.array([v], np.int64),
    )
    return bool(res[0])


def reaches_pairs(dag: Dag, us, vs) -> np.ndarray:
    return _reaches_many(
        dag.out_ptr, dag.out_idx, dag.pos,
        np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64),
    )


def parse_dag(text: str) -> Dag:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty input")
    header = lines[0].split()
    if len(header) != 2:
        raise ParseError(f"line 1: expected 'n m', got {lines[0]!r}")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError(f"line 1: non-integer header {lines[0]!r}") from None
    if n < 1 or m < 0:
        raise ParseError(f"line 1: need n >= 1 and m >= 0, got n={n} m={m}")
    body = lines[1:]
    if len(body) != m:
        raise ParseError(f"header announces {m} edges, found {len(body)} lines")
    edges = np.empty((m, 2), np.int64)
    for i, line in enumerate(body):
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {i + 2}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {i + 2}: non-integer id in {line!r}") from None
        if u < 0 or v < 0:
            raise ParseError(f"line {i + 2}: negative vertex id")
        if u >= n or v >= n:
            raise ParseError(f"line {i + 2}: vertex id {max(u, v)} >= n={n}")
        if u == v:
            raise ParseError(f"line {i + 2}: self-loop on vertex {u}")
        edges[i, 0] = u
        edges[i, 1] = v
    return Dag.from_edges(n, edges)


def serialize_dag(dag: Dag) -> str:
    parts = [f"{dag.n} {dag.m}\n"]
    parts.extend(f"{u} {v}\n" for u, v in dag.edges.tolist())
    return "".join(parts)


def serialize_chains(chains) -> str:
    return "".join(" ".join(map(str, c)) + "\n" for c in chains)


def parse_chains(text: str) -> ChainDecomposition:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    chains = []
    for i, line in enumerate(lines):
        try:
            chains.append([int(x) for x in line.split()])
        except ValueError:
            raise ParseError(f"chains line {i + 1}: non-integer id in {line!r}") from None
    return ChainDecomposition(chains)


def gen_worst_case(k: int, l: int) -> Dag:
    """Sources ``u_1..u_k`` -> middle path ``v_1..v_l`` -> sinks ``w_1..w_k``.

    Ids: sources ``0..k-1``, middle ``k..k+l-1``, sinks ``k+l..2k+l-1``.
    Every path cover of this family pays for the middle path once per path.
    """
    if k < 1 or l < 1:
        raise ArgumentError(f"need k >= 1 and l >= 1, got k={k} l={l}")
    src = np.arange(k, dtype=np.int64)
    mid = np.arange(k, k + l, dtype=np.int64)
    snk = np.arange(k + l, 2 * k + l, dtype=np.int64)
    edges = np.concatenate([
        np.stack([src, np.full(k, mid[0])], axis=1),
        np.stack([mid[:-1], mid[1:]], axis=1),
        np.stack([np.full(k, mid[-1]), snk], axis=1),
    ])
    return Dag.from_edges(2 * k + l, edges)


def gen_random_dag(n: int, edge_prob: float, seed: int) -> Dag:
    """Random DAG: each forward pair of a random order is an edge w.p. ``edge_prob``.

    The edge count is drawn from the binomial law and then that many distinct
    pairs are sampled, which gives the same distribution as independent coin
    flips without touching all ``n^2/2`` pairs.
    """
    if n < 1:
        raise ArgumentError(f"need n >= 1, got {n}")
    if not 0.0 <= edge_prob <= 1.0:
        raise ArgumentError(f"edge_prob must lie in [0, 1], got {edge_prob}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n).astype(np.int64)
    pairs = n * (n - 1) // 2
    count = int(rng.binomial(pairs, edge_prob)) if pairs else 0
    if count == pairs:
        flat = np.arange(pairs, dtype=np.int64)
    else:
        flat = np.sort(rng.choice(pairs, size=count, replace=False)).astype(np.int64)
    # row i of the strict upper triangle holds n-1-i pairs
    row_len = np.arange(n - 1, 0, -1, dtype=np.int64)
    row_start = np.concatenate([[0], np.cumsum(row_len)])
    i = np.searchsorted(row_start, flat, side="right") - 1
    j = i + 1 + (flat - row_start[i])
    edges = np.stack([order[i], order[j]], axis=1) if count else np.empty((0, 2), np.int64)
    return Dag.from_edges(n, edges)

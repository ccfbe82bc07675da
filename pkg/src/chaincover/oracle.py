"""Independent ground truth used by the test-suite.

Everything here is deliberately simple and slow: transitive closure by bitset
DP, width through Fulkerson's bipartite-matching reduction, brute-force
antichain and path-cover enumeration, and a sorted-list mirror of
:class:`chaincover.trie.TriePartition`. Nothing imports the flow or trie code.
"""
from __future__ import annotations

import bisect

import numpy as np

from .dag import Dag
from .errors import (
    ArgumentError,
    RankOutOfRange,
    SameHandle,
    SizeLimit,
    SizeOutOfRange,
    StaleHandle,
)

CLOSURE_LIMIT = 2000
ENUMERATION_LIMIT = 20
PATH_COVER_LIMIT = 12

# same codes as chaincover.trie, restated so the oracle stays standalone
OP_SOME, OP_SEARCH, OP_SELECT, OP_SPLIT, OP_SIZE_SPLIT, OP_MERGE = range(6)


class ClosureMatrix:
    """Reflexive reachability relation; ``cm[u, v]`` is True iff u reaches v."""

    def __init__(self, rows: list[int]):
        self.n = len(rows)
        self._rows = rows

    def __getitem__(self, uv) -> bool:
        u, v = uv
        return bool((self._rows[u] >> v) & 1)

    def row_mask(self, u: int) -> int:
        return self._rows[u]

    def successors(self, u: int) -> list[int]:
        """Vertices strictly reachable from ``u``."""
        row = self._rows[u] & ~(1 << u)
        out = []
        while row:
            low = row & -row
            out.append(low.bit_length() - 1)
            row ^= low
        return out

    def to_array(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for u in range(self.n):
            a[u, self.successors(u)] = True
            a[u, u] = True
        return a


def _check_size(dag: Dag, limit: int) -> None:
    if dag.n > limit:
        raise SizeLimit(f"oracle limited to n <= {limit}, got {dag.n}")


def transitive_closure(dag: Dag) -> ClosureMatrix:
    _check_size(dag, CLOSURE_LIMIT)
    rows = [0] * dag.n
    out_adj = dag.out_adj
    for v in reversed(dag.topo.tolist()):
        row = 1 << v
        for w in out_adj[v]:
            row |= rows[w]
        rows[v] = row
    return ClosureMatrix(rows)


def _max_matching(adj: list[list[int]], n_right: int) -> int:
    """Kuhn's augmenting paths, iterative so long paths do not hit recursion limits."""
    match_right = [-1] * n_right
    size = 0
    for root in range(len(adj)):
        if not adj[root]:
            continue
        seen = [False] * n_right
        # frames: (left vertex, neighbour iterator, right vertex we arrived through)
        stack = [(root, iter(adj[root]), -1)]
        free_v = -1
        while stack:
            u, it, _ = stack[-1]
            pushed = False
            for v in it:
                if seen[v]:
                    continue
                seen[v] = True
                if match_right[v] < 0:
                    free_v = v
                else:
                    w = match_right[v]
                    stack.append((w, iter(adj[w]), v))
                    pushed = True
                break
            if free_v >= 0:
                break
            if not pushed:
                stack.pop()
        if free_v < 0:
            continue
        match_right[free_v] = stack[-1][0]
        for t in range(len(stack) - 1, 0, -1):
            match_right[stack[t][2]] = stack[t - 1][0]
        size += 1
    return size


def width_by_matching(dag: Dag) -> int:
    """Width as ``n - maximum matching`` on the strict reachability relation."""
    cm = transitive_closure(dag)
    adj = [cm.successors(u) for u in range(dag.n)]
    return dag.n - _max_matching(adj, dag.n)


def width_by_enumeration(dag: Dag) -> int:
    """Size of a largest antichain, found by exhaustive search."""
    _check_size(dag, ENUMERATION_LIMIT)
    cm = transitive_closure(dag)
    n = dag.n
    full = (1 << n) - 1
    # comparable[u]: everything u reaches or is reached by
    comparable = [0] * n
    for u in range(n):
        for v in range(n):
            if cm[u, v] or cm[v, u]:
                comparable[u] |= 1 << v
    best = 0

    def extend(i: int, size: int, blocked: int) -> None:
        nonlocal best
        if size > best:
            best = size
        free = full & ~blocked & ~((1 << i) - 1)
        if size + bin(free).count("1") <= best:
            return
        for v in range(i, n):
            if not (blocked >> v) & 1:
                extend(v + 1, size + 1, blocked | comparable[v])

    extend(0, 0, 0)
    return best


def min_path_cover_by_enumeration(dag: Dag) -> int:
    """Fewest DAG paths covering every vertex (paths may share vertices).

    Enumerates every path of the DAG as a vertex mask and solves the cover
    exactly by breadth-first search over covered-vertex masks. A feasible
    flow of the vertex-split network with unit demands is exactly such a
    cover, so this bounds the minimum flow from below without any flow code.
    """
    _check_size(dag, PATH_COVER_LIMIT)
    n = dag.n
    out_adj = dag.out_adj
    masks = set()
    stack = [(v, 1 << v) for v in range(n)]
    while stack:
        v, mask = stack.pop()
        masks.add(mask)
        for w in out_adj[v]:
            stack.append((w, mask | (1 << w)))
    # big masks first so the search reaches full coverage sooner
    masks = sorted(masks, key=lambda m: -bin(m).count("1"))
    full = (1 << n) - 1
    dist = {0: 0}
    frontier = [0]
    steps = 0
    while full not in dist:
        steps += 1
        nxt = []
        for cov in frontier:
            for m in masks:
                c = cov | m
                if c not in dist:
                    dist[c] = steps
                    nxt.append(c)
        frontier = nxt
    return dist[full]


def max_flow_by_cut_enumeration(n_nodes: int, edges, source: int, sink: int) -> int:
    """Minimum s-t cut capacity by trying every vertex bipartition."""
    if n_nodes > 16:
        raise SizeLimit(f"cut enumeration limited to 16 nodes, got {n_nodes}")
    others = [v for v in range(n_nodes) if v not in (source, sink)]
    best = None
    for bits in range(1 << len(others)):
        side = {source}
        side.update(v for i, v in enumerate(others) if (bits >> i) & 1)
        cut = sum(c for u, v, c in edges if u in side and v not in side)
        if best is None or cut < best:
            best = cut
    return best


class NaivePartition:
    """Sorted-list mirror of :class:`chaincover.trie.TriePartition`."""

    def __init__(self, k: int):
        if k < 1:
            raise ArgumentError(f"universe size must be >= 1, got {k}")
        self.k = k
        self.sets: dict[int, list[int]] = {0: list(range(1, k + 1))}
        self._next = 1

    @property
    def initial(self) -> int:
        return 0

    def _get(self, h) -> list[int]:
        try:
            return self.sets[h]
        except KeyError:
            raise StaleHandle(f"handle {h!r} is not live") from None

    def _issue(self, items: list[int]) -> int | None:
        if not items:
            return None
        h = self._next
        self._next += 1
        self.sets[h] = items
        return h

    @property
    def handles(self) -> list[int]:
        return sorted(self.sets)

    def size(self, h) -> int:
        return len(self._get(h))

    def elements(self, h) -> list[int]:
        return list(self._get(h))

    def search(self, h, j: int) -> int | None:
        items = self._get(h)
        if not 1 <= j <= self.k:
            raise ArgumentError(f"search key {j} outside 1..{self.k}")
        i = bisect.bisect_right(items, j)
        return items[i - 1] if i else None

    def some(self, h) -> int:
        return self._get(h)[-1]

    def select(self, h, s: int) -> int:
        items = self._get(h)
        if not 1 <= s <= len(items):
            raise RankOutOfRange(f"rank {s} outside 1..{len(items)}")
        return items[s - 1]

    def split(self, h, j: int):
        items = self._get(h)
        if not 1 <= j <= self.k:
            raise ArgumentError(f"split key {j} outside 1..{self.k}")
        i = bisect.bisect_right(items, j)
        del self.sets[h]
        return self._issue(items[:i]), self._issue(items[i:])

    def size_split(self, h, s: int):
        items = self._get(h)
        if not 0 <= s <= len(items):
            raise SizeOutOfRange(f"size {s} outside 0..{len(items)}")
        del self.sets[h]
        return self._issue(items[:s]), self._issue(items[s:])

    def merge(self, h1, h2):
        if h1 is None:
            if h2 is not None:
                self._get(h2)
            return h2
        if h2 is None:
            self._get(h1)
            return h1
        if h1 == h2:
            raise SameHandle(f"cannot merge handle {h1} with itself")
        a, b = self._get(h1), self._get(h2)
        del self.sets[h1]
        del self.sets[h2]
        return self._issue(sorted(a + b))

    def partition(self) -> dict[int, list[int]]:
        return {h: list(self.sets[h]) for h in self.handles}


def naive_partition_oracle(k: int, ops, start=None) -> tuple[list[int], list[list[int]]]:
    """Run a batch sequence (``TriePartition.run_ops`` protocol) on sorted lists.

    Returns the per-op results and the final sets in slot order. ``start`` is
    the initial slot list of sorted element lists (default: the full set).
    """
    slots = [list(range(1, k + 1))] if start is None else [list(s) for s in start]
    results = []
    append = results.append
    bisect_right = bisect.bisect_right
    rows = ops.tolist() if hasattr(ops, "tolist") else ops
    for code, a, b in rows:
        nlive = len(slots)
        if code == OP_MERGE:
            if nlive < 2:
                append(-1)
                continue
            i = a % nlive
            j = b % (nlive - 1)
            if j >= i:
                j += 1
            merged = sorted(slots[i] + slots[j])
            last = slots.pop()
            if j < nlive - 1:
                slots[j] = last
            if i == nlive - 1:
                i = j
            slots[i] = merged
            append(len(merged))
            continue
        i = a % nlive
        items = slots[i]
        if code == OP_SOME:
            append(items[-1])
        elif code == OP_SEARCH:
            p = bisect_right(items, 1 + b % k)
            append(items[p - 1] if p else 0)
        elif code == OP_SELECT:
            append(items[b % len(items)])
        elif code == OP_SPLIT or code == OP_SIZE_SPLIT:
            if code == OP_SPLIT:
                p = bisect_right(items, 1 + b % k)
            else:
                p = b % (len(items) + 1)
            append(p)
            if p == 0:
                continue
            if p < len(items):
                slots[i] = items[:p]
                slots.append(items[p:])
        else:
            raise ArgumentError(f"unknown op code {code}")
    return results, slots


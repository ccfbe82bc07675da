"""Boosted mergeable dictionaries over binary tries with leaf counters.

A :class:`TriePartition` keeps a dynamic partition of ``{1..k}``. Every set is
a binary trie whose root-to-leaf paths all have ``depth = floor(log2 k) + 1``
edges and spell the big-endian binary form of an element. Each node stores the
number of leaves below it, which makes rank selection a single descent.

All tries share one node pool (``nodes[x] = (left, right, leaf_count)``) with a
free list, so the potential (live node count) is exact and cheap to read.
The kernels below operate on the raw pool and are reused by the chain
extraction kernel in :mod:`chaincover.chains`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .errors import (
    ArgumentError,
    RankOutOfRange,
    SameHandle,
    SizeOutOfRange,
    StaleHandle,
)

NIL = -1
LEFT, RIGHT, COUNT = 0, 1, 2

# slots of the int64 ``meta`` array
FREE_TOP, HIGH, CREATED, FREED, VISITED, OPS = 0, 1, 2, 3, 4, 5
META_SIZE = 6

# operation codes of a batch sequence (see ``run_ops``)
OP_SOME, OP_SEARCH, OP_SELECT, OP_SPLIT, OP_SIZE_SPLIT, OP_MERGE = range(6)
OP_NAMES = ("some", "search", "select", "split", "size_split", "merge")


def trie_depth(k: int) -> int:
    return int(k).bit_length()  # floor(log2 k) + 1 for k >= 1


# --------------------------------------------------------------------------
# kernels


@njit
def _alloc(nodes, free, meta):
    top = meta[FREE_TOP]
    if top > 0:
        top -= 1
        meta[FREE_TOP] = top
        x = free[top]
    else:
        x = meta[HIGH]
        meta[HIGH] = x + 1
    nodes[x, LEFT] = NIL
    nodes[x, RIGHT] = NIL
    nodes[x, COUNT] = 0
    meta[CREATED] += 1
    return x


@njit
def _release(free, meta, x):
    free[meta[FREE_TOP]] = x
    meta[FREE_TOP] += 1
    meta[FREED] += 1


@njit
def k_build(nodes, free, meta, depth, k):
    """Trie holding 1..k; returns its root."""
    root = _alloc(nodes, free, meta)
    for i in range(1, k + 1):
        x = root
        nodes[x, COUNT] += 1
        for level in range(depth):
            b = (i >> (depth - 1 - level)) & 1
            c = nodes[x, b]
            if c == NIL:
                c = _alloc(nodes, free, meta)
                nodes[x, b] = c
            x = c
            nodes[x, COUNT] += 1
        meta[VISITED] += depth + 1
    return root


@njit
def k_search(nodes, meta, depth, root, j):
    """Largest element <= j in the trie, or 0 when there is none."""
    meta[OPS] += 1
    x = root
    val = 0
    level = 0
    visits = 1
    back = NIL
    back_val = 0
    back_level = 0
    descend_max = False
    while level < depth:
        b = (j >> (depth - 1 - level)) & 1
        if b == 1:
            lc = nodes[x, LEFT]
            if lc != NIL:
                back = lc
                back_val = val * 2
                back_level = level + 1
            rc = nodes[x, RIGHT]
            if rc != NIL:
                x = rc
                val = val * 2 + 1
                level += 1
                visits += 1
                continue
            # no right child: the answer is the maximum of the left subtree
            x = lc
            val = val * 2
            level += 1
            visits += 1
            descend_max = True
            break
        lc = nodes[x, LEFT]
        if lc != NIL:
            x = lc
            val = val * 2
            level += 1
            visits += 1
            continue
        # everything under x is > j: fall back to the last left branch passed
        if back == NIL:
            meta[VISITED] += visits
            return 0
        x = back
        val = back_val
        level = back_level
        visits += 1
        descend_max = True
        break
    if descend_max:
        while level < depth:
            rc = nodes[x, RIGHT]
            if rc != NIL:
                x = rc
                val = val * 2 + 1
            else:
                x = nodes[x, LEFT]
                val = val * 2
            level += 1
            visits += 1
    meta[VISITED] += visits
    return val


@njit
def _select(nodes, meta, depth, root, s):
    x = root
    val = 0
    for _ in range(depth):
        lc = nodes[x, LEFT]
        lcount = nodes[lc, COUNT] if lc != NIL else 0
        if s <= lcount:
            x = lc
            val = val * 2
        else:
            s -= lcount
            x = nodes[x, RIGHT]
            val = val * 2 + 1
    meta[VISITED] += depth + 1
    return val


@njit
def k_select(nodes, meta, depth, root, s):
    """s-th smallest element (1-based); caller guarantees 1 <= s <= size."""
    meta[OPS] += 1
    return _select(nodes, meta, depth, root, s)


@njit
def _split(nodes, free, meta, depth, root, j):
    path = np.empty(depth + 1, np.int64)
    x = root
    path[0] = x
    t = 0
    while t < depth:
        c = nodes[x, (j >> (depth - 1 - t)) & 1]
        if c == NIL:
            break
        x = c
        t += 1
        path[t] = x
    meta[VISITED] += t + 1
    if t == depth:
        lo = x
        hi = NIL
    elif (j >> (depth - 1 - t)) & 1 == 0:
        lo = NIL
        hi = x
    else:
        lo = x
        hi = NIL
    for i in range(t - 1, -1, -1):
        x = path[i]
        if (j >> (depth - 1 - i)) & 1 == 0:
            lo_l, lo_r = lo, NIL
            hi_l, hi_r = hi, nodes[x, RIGHT]
        else:
            lo_l, lo_r = nodes[x, LEFT], lo
            hi_l, hi_r = NIL, hi
        has_lo = lo_l != NIL or lo_r != NIL
        has_hi = hi_l != NIL or hi_r != NIL
        if has_lo and has_hi:
            # x lies on the common prefix of pred(j) and succ(j): copy it
            y = _alloc(nodes, free, meta)
            nodes[x, LEFT] = lo_l
            nodes[x, RIGHT] = lo_r
            nodes[x, COUNT] = (nodes[lo_l, COUNT] if lo_l != NIL else 0) + (
                nodes[lo_r, COUNT] if lo_r != NIL else 0)
            nodes[y, LEFT] = hi_l
            nodes[y, RIGHT] = hi_r
            nodes[y, COUNT] = (nodes[hi_l, COUNT] if hi_l != NIL else 0) + (
                nodes[hi_r, COUNT] if hi_r != NIL else 0)
            lo = x
            hi = y
        elif has_lo:
            lo = x
            hi = NIL
        else:
            lo = NIL
            hi = x
    return lo, hi


@njit
def k_split(nodes, free, meta, depth, root, j):
    """Split into (elements <= j, elements > j); empty sides come back NIL."""
    meta[OPS] += 1
    return _split(nodes, free, meta, depth, root, j)


@njit
def k_size_split(nodes, free, meta, depth, root, s):
    """Split off the s smallest elements; 0 <= s <= size is the caller's job."""
    meta[OPS] += 1
    meta[VISITED] += 1
    if s == 0:
        return NIL, root
    if s == nodes[root, COUNT]:
        return root, NIL
    pivot = _select(nodes, meta, depth, root, s)
    return _split(nodes, free, meta, depth, root, pivot)


@njit
def k_merge(nodes, free, meta, depth, a, b):
    """Union of two disjoint tries; ``b``'s overlapping nodes are freed.

    Returns the new root, or -2 if the tries share a leaf (not disjoint).
    """
    meta[OPS] += 1
    if a == NIL:
        return b
    if b == NIL:
        return a
    stack_x = np.empty(2 * depth + 4, np.int64)
    stack_y = np.empty(2 * depth + 4, np.int64)
    stack_l = np.empty(2 * depth + 4, np.int64)
    stack_x[0] = a
    stack_y[0] = b
    stack_l[0] = 0
    top = 1
    while top > 0:
        top -= 1
        x = stack_x[top]
        y = stack_y[top]
        level = stack_l[top]
        meta[VISITED] += 2
        if level == depth:
            return -2
        # disjoint sets: the union's leaf count is the plain sum
        nodes[x, COUNT] += nodes[y, COUNT]
        for side in range(2):
            yc = nodes[y, side]
            if yc == NIL:
                continue
            xc = nodes[x, side]
            if xc == NIL:
                nodes[x, side] = yc
            else:
                stack_x[top] = xc
                stack_y[top] = yc
                stack_l[top] = level + 1
                top += 1
        _release(free, meta, y)
    return a


@njit
def _collect(nodes, depth, root, out):
    """Write the elements of a trie in increasing order into ``out``."""
    if root == NIL:
        return 0
    stack_x = np.empty(depth + 2, np.int64)
    stack_v = np.empty(depth + 2, np.int64)
    stack_l = np.empty(depth + 2, np.int64)
    stack_x[0] = root
    stack_v[0] = 0
    stack_l[0] = 0
    top = 1
    n = 0
    while top > 0:
        top -= 1
        x = stack_x[top]
        v = stack_v[top]
        level = stack_l[top]
        if level == depth:
            out[n] = v
            n += 1
            continue
        # push right first so the left subtree is emitted first
        for side in (RIGHT, LEFT):
            c = nodes[x, side]
            if c != NIL:
                stack_x[top] = c
                stack_v[top] = v * 2 + side
                stack_l[top] = level + 1
                top += 1
    return n


@njit
def k_run_ops(nodes, free, meta, depth, k, slots, nlive, ops, results):
    """Execute a batch operation sequence over the list of live sets.

    ``slots[:nlive]`` are the roots of the live sets. Row ``(code, a, b)`` of
    ``ops`` is resolved against the current state exactly as described in
    :meth:`TriePartition.run_ops`. Returns the final number of live slots or
    ``-(row + 1)`` if a merge found overlapping tries.
    """
    for r in range(ops.shape[0]):
        code = ops[r, 0]
        a = ops[r, 1]
        b = ops[r, 2]
        if code == OP_MERGE:
            if nlive < 2:
                results[r] = -1
                continue
            i = a % nlive
            j = b % (nlive - 1)
            if j >= i:
                j += 1
            merged = k_merge(nodes, free, meta, depth, slots[i], slots[j])
            if merged < 0:
                return -(r + 1)
            slots[j] = slots[nlive - 1]
            if i == nlive - 1:
                i = j
            nlive -= 1
            slots[i] = merged
            results[r] = nodes[merged, COUNT]
            continue
        i = a % nlive
        root = slots[i]
        if code == OP_SOME:
            results[r] = k_search(nodes, meta, depth, root, k)
        elif code == OP_SEARCH:
            results[r] = k_search(nodes, meta, depth, root, 1 + b % k)
        elif code == OP_SELECT:
            results[r] = k_select(nodes, meta, depth, root, 1 + b % nodes[root, COUNT])
        else:
            if code == OP_SPLIT:
                lo, hi = k_split(nodes, free, meta, depth, root, 1 + b % k)
            else:
                lo, hi = k_size_split(nodes, free, meta, depth, root,
                                      b % (nodes[root, COUNT] + 1))
            results[r] = nodes[lo, COUNT] if lo != NIL else 0
            if lo == NIL:
                slots[i] = hi
            else:
                slots[i] = lo
                if hi != NIL:
                    slots[nlive] = hi
                    nlive += 1
    return nlive


# --------------------------------------------------------------------------
# Python surface


@dataclass(frozen=True)
class OpCounters:
    """Snapshot of the instrumentation tallies of a :class:`TriePartition`."""

    nodes_created: int
    nodes_freed: int
    nodes_visited: int
    ops: int

    @property
    def potential(self) -> int:
        return self.nodes_created - self.nodes_freed


class TriePartition:
    """Dynamic partition of ``{1..k}``; sets are named by integer handles.

    An empty set is never given a handle: operations that produce one return
    ``None`` in its place. Handles consumed by ``split``, ``size_split`` or
    ``merge`` become stale and any later use raises :class:`StaleHandle`.
    """

    def __init__(self, k: int):
        if k < 1:
            raise ArgumentError(f"universe size must be >= 1, got {k}")
        self.k = int(k)
        self.depth = trie_depth(self.k)
        cap = self.k * (self.depth + 1) + 2 * self.depth + 4
        self.nodes = np.full((cap, 3), NIL, np.int64)
        self.free = np.empty(cap, np.int64)
        self.meta = np.zeros(META_SIZE, np.int64)
        root = k_build(self.nodes, self.free, self.meta, self.depth, self.k)
        self._roots: dict[int, int] = {0: int(root)}
        self._next = 1

    @property
    def initial(self) -> int:
        """Handle of the full set right after construction (0)."""
        return 0

    # handles -------------------------------------------------------------

    def _root(self, h) -> int:
        try:
            return self._roots[h]
        except KeyError:
            raise StaleHandle(f"handle {h!r} is not live") from None

    def _issue(self, root: int) -> int | None:
        if root == NIL:
            return None
        h = self._next
        self._next += 1
        self._roots[h] = int(root)
        return h

    @property
    def handles(self) -> list[int]:
        return sorted(self._roots)

    def is_live(self, h) -> bool:
        return h in self._roots

    def root_of(self, h) -> int:
        return self._root(h)

    # queries -------------------------------------------------------------

    def size(self, h) -> int:
        return int(self.nodes[self._root(h), COUNT])

    def elements(self, h) -> list[int]:
        out = np.empty(self.k, np.int64)
        n = _collect(self.nodes, self.depth, self._root(h), out)
        return out[:n].tolist()

    def search(self, h, j: int) -> int | None:
        root = self._root(h)
        if not 1 <= j <= self.k:
            raise ArgumentError(f"search key {j} outside 1..{self.k}")
        r = int(k_search(self.nodes, self.meta, self.depth, root, j))
        return r or None

    def some(self, h) -> int:
        """Maximum element of the set (``search(h, k)``)."""
        root = self._root(h)
        return int(k_search(self.nodes, self.meta, self.depth, root, self.k))

    def select(self, h, s: int) -> int:
        root = self._root(h)
        if not 1 <= s <= self.nodes[root, COUNT]:
            raise RankOutOfRange(f"rank {s} outside 1..{self.nodes[root, COUNT]}")
        return int(k_select(self.nodes, self.meta, self.depth, root, s))

    # updates -------------------------------------------------------------

    def split(self, h, j: int) -> tuple[int | None, int | None]:
        """Replace set ``h`` by ``{i <= j}`` and ``{i > j}``."""
        root = self._root(h)
        if not 1 <= j <= self.k:
            raise ArgumentError(f"split key {j} outside 1..{self.k}")
        lo, hi = k_split(self.nodes, self.free, self.meta, self.depth, root, j)
        del self._roots[h]
        return self._issue(lo), self._issue(hi)

    def size_split(self, h, s: int) -> tuple[int | None, int | None]:
        """Replace set ``h`` by its ``s`` smallest elements and the rest."""
        root = self._root(h)
        size = int(self.nodes[root, COUNT])
        if not 0 <= s <= size:
            raise SizeOutOfRange(f"size {s} outside 0..{size}")
        lo, hi = k_size_split(self.nodes, self.free, self.meta, self.depth, root, s)
        del self._roots[h]
        return self._issue(lo), self._issue(hi)

    def merge(self, h1, h2) -> int | None:
        """Union of two sets; ``None`` stands for the empty set."""
        if h1 is None:
            if h2 is not None:
                self._root(h2)
            return h2
        if h2 is None:
            self._root(h1)
            return h1
        if h1 == h2:
            raise SameHandle(f"cannot merge handle {h1} with itself")
        a, b = self._root(h1), self._root(h2)
        root = k_merge(self.nodes, self.free, self.meta, self.depth, a, b)
        if root < 0:
            raise RuntimeError("merged tries share a leaf; partition corrupted")
        del self._roots[h1]
        del self._roots[h2]
        return self._issue(root)

    # batch ---------------------------------------------------------------

    def run_ops(self, ops) -> np.ndarray:
        """Run a whole operation sequence inside one kernel call.

        The live sets form an ordered slot list, initially the live handles in
        ascending order. Each row ``(code, a, b)`` of ``ops`` addresses slot
        ``i = a % nlive`` and yields one integer result:

        * ``OP_SOME``: ``some``; ``OP_SEARCH``: ``search(j = 1 + b % k)``,
          0 when there is no predecessor; ``OP_SELECT``: ``select(1 + b % size)``.
        * ``OP_SPLIT`` (``j = 1 + b % k``) and ``OP_SIZE_SPLIT``
          (``s = b % (size + 1)``): result is the size of the lower part. The
          lower part stays in slot ``i`` and a nonempty upper part is appended;
          if the lower part is empty the upper part takes slot ``i``.
        * ``OP_MERGE``: partner slot ``j = b % (nlive - 1)``, shifted past ``i``.
          The union lands in slot ``i``; slot ``j`` is filled by the last slot.
          Result is the union's size, or -1 when fewer than two sets are live.

        Afterwards the handles are reissued in slot order; see ``slot_handles``.
        """
        ops = np.ascontiguousarray(ops, dtype=np.int64).reshape(-1, 3)
        bad = (ops[:, 0] < 0) | (ops[:, 0] > OP_MERGE)
        if bad.any():
            raise ArgumentError(f"unknown op code {int(ops[bad][0, 0])}")
        if (ops[:, 1:] < 0).any():
            raise ArgumentError("op arguments must be nonnegative")
        roots = [self._roots[h] for h in self.handles]
        slots = np.full(self.k, NIL, np.int64)
        slots[:len(roots)] = roots
        results = np.zeros(ops.shape[0], np.int64)
        nlive = k_run_ops(self.nodes, self.free, self.meta, self.depth, self.k,
                          slots, len(roots), ops, results)
        if nlive < 0:
            raise RuntimeError(f"op row {-nlive - 1}: merged tries share a leaf")
        self._roots = {}
        self.slot_handles = [self._issue(int(r)) for r in slots[:nlive]]
        return results

    # instrumentation -----------------------------------------------------

    @property
    def counters(self) -> OpCounters:
        m = self.meta
        return OpCounters(int(m[CREATED]), int(m[FREED]), int(m[VISITED]), int(m[OPS]))

    @property
    def potential(self) -> int:
        return int(self.meta[CREATED] - self.meta[FREED])

    def partition(self) -> dict[int, list[int]]:
        return {h: self.elements(h) for h in self.handles}

    def dump(self) -> str:
        return "".join(
            f"{h}: {' '.join(map(str, els))}\n" for h, els in self.partition().items()
        )

    def check_invariants(self) -> None:
        """Full audit of the structure; raises ``AssertionError`` on breach.

        Checks that live sets partition ``{1..k}``, every leaf sits at depth
        ``depth``, internal nodes have a child, leaf counts match their
        subtrees, and the live node count equals the potential.
        """
        seen = np.zeros(self.k + 1, np.int64)
        live = 0
        for h, root in self._roots.items():
            stack = [(root, 0, 0)]
            post = []
            while stack:
                x, level, val = stack.pop()
                live += 1
                post.append((x, level))
                left, right = self.nodes[x, LEFT], self.nodes[x, RIGHT]
                if level == self.depth:
                    assert left == NIL and right == NIL, f"leaf {x} has children"
                    assert self.nodes[x, COUNT] == 1, f"leaf {x} count != 1"
                    assert 1 <= val <= self.k, f"element {val} outside universe"
                    seen[val] += 1
                    continue
                assert left != NIL or right != NIL, f"internal node {x} is childless"
                for side, c in ((LEFT, left), (RIGHT, right)):
                    if c != NIL:
                        stack.append((int(c), level + 1, val * 2 + side))
            for x, level in reversed(post):
                if level == self.depth:
                    continue
                expect = sum(
                    int(self.nodes[c, COUNT]) for c in self.nodes[x, :2] if c != NIL
                )
                assert self.nodes[x, COUNT] == expect, f"node {x} count mismatch in set {h}"
        assert (seen[1:] == 1).all(), "live sets do not partition 1..k"
        assert live == self.potential, f"live nodes {live} != potential {self.potential}"


def new_partition(k: int) -> tuple[TriePartition, int]:
    tp = TriePartition(k)
    return tp, tp.initial


def random_op_sequence(n_ops: int, seed: int, weights=None) -> np.ndarray:
    """Seeded ``(n_ops, 3)`` sequence for :meth:`TriePartition.run_ops`.

    ``weights`` are relative frequencies of the six op codes, defaulting to an
    even split between queries and updates so the live-set count drifts.
    """
    if weights is None:
        weights = (1, 1, 1, 1, 1, 2)
    w = np.asarray(weights, dtype=float)
    rng = np.random.default_rng(seed)
    ops = np.empty((n_ops, 3), np.int64)
    ops[:, 0] = rng.choice(len(w), size=n_ops, p=w / w.sum())
    ops[:, 1:] = rng.integers(0, 2**31 - 1, size=(n_ops, 2))
    return ops

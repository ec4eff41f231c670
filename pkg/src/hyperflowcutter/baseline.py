"""Simple initial partitioner: BFS region growing followed by one FM pass.

It stands in for an external multilevel tool when feeding the refinement and
the ensemble pool; any partition file can be used in its place.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .hypergraph import Bipartition, Hypergraph, as_fraction, max_block_size


def grow_region(h: Hypergraph, size: int, rng: np.random.Generator) -> np.ndarray:
    """Block 1 = the first ``size`` vertices of a BFS from a random vertex.

    When a component runs dry the search restarts at a random unvisited vertex.
    """
    n = h.n
    a = np.zeros(n, dtype=np.int8)
    if size <= 0:
        return a
    visited = np.zeros(n, dtype=bool)
    queue = deque()
    taken = 0
    while taken < size:
        if not queue:
            rest = np.flatnonzero(~visited)
            start = int(rest[rng.integers(len(rest))])
            visited[start] = True
            queue.append(start)
        u = queue.popleft()
        a[u] = 1
        taken += 1
        for e in h.incidence[u]:
            for v in h.pins[e]:
                if not visited[v]:
                    visited[v] = True
                    queue.append(v)
    return a


class _GainBuckets:
    """Vertices of one block bucketed by gain in ``[-max_deg, max_deg]``."""

    def __init__(self, max_deg: int):
        self.offset = max_deg
        self.buckets: list[dict[int, None]] = [dict() for _ in range(2 * max_deg + 1)]
        self.top = -1
        self.size = 0

    def insert(self, v: int, gain: int) -> None:
        i = gain + self.offset
        self.buckets[i][v] = None
        self.size += 1
        if i > self.top:
            self.top = i

    def remove(self, v: int, gain: int) -> None:
        del self.buckets[gain + self.offset][v]
        self.size -= 1

    def peek(self) -> tuple[int, int] | None:
        while self.top >= 0 and not self.buckets[self.top]:
            self.top -= 1
        if self.top < 0:
            return None
        v = next(iter(self.buckets[self.top]))
        return v, self.top - self.offset


def fm_pass(h: Hypergraph, assignment: np.ndarray, epsilon) -> np.ndarray:
    """One boundary-initialised Fiduccia-Mattheyses pass with vertex locking.

    Intermediate states may exceed the block bound by one vertex so that
    moves are possible at perfect balance; only balanced states are
    eligible as the result.
    """
    n = h.n
    a = assignment.astype(np.int8).copy()
    bound = max_block_size(n, epsilon)
    slack = max(bound, -(-n // 2) + 1)
    pins, incidence = h.pins, h.incidence
    count = [[0, 0] for _ in range(h.m)]
    for e, edge in enumerate(pins):
        for v in edge:
            count[e][a[v]] += 1

    def gain_of(v):
        g = 0
        b = a[v]
        for e in incidence[v]:
            if count[e][b] == 1:
                g += 1
            if count[e][1 - b] == 0:
                g -= 1
        return g

    max_deg = max((len(i) for i in incidence), default=0)
    buckets = [_GainBuckets(max_deg), _GainBuckets(max_deg)]
    gain = [0] * n
    queued = [False] * n
    locked = [False] * n
    for e, edge in enumerate(pins):
        if count[e][0] and count[e][1]:
            for v in edge:
                if not queued[v]:
                    queued[v] = True
                    gain[v] = gain_of(v)
                    buckets[a[v]].insert(v, gain[v])

    sizes = [n - int(a.sum()), int(a.sum())]
    cut = sum(1 for c in count if c[0] and c[1])
    best_cut = cut if max(sizes) <= bound else None
    moves: list[int] = []
    best_len = 0

    while True:
        cands = []
        for b in (0, 1):
            if sizes[1 - b] + 1 > slack or sizes[b] <= 1:
                continue
            top = buckets[b].peek()
            if top is not None:
                cands.append((top[1], sizes[b], -top[0], b, top[0]))
        if not cands:
            break
        _, _, _, frm, v = max(cands)
        to = 1 - frm
        buckets[frm].remove(v, gain[v])
        locked[v] = True
        cut -= gain[v]
        touched: dict[int, None] = {}

        def adjust(u, delta):
            if locked[u]:
                return
            if queued[u]:
                buckets[a[u]].remove(u, gain[u])
                gain[u] += delta
                buckets[a[u]].insert(u, gain[u])
            else:
                touched[u] = None

        # delta-gain updates on the pins of every incident hyperedge
        for e in incidence[v]:
            c = count[e]
            if c[to] == 0:
                for u in pins[e]:
                    if u != v:
                        adjust(u, +1)
            elif c[to] == 1:
                for u in pins[e]:
                    if a[u] == to:
                        adjust(u, -1)
            c[frm] -= 1
            c[to] += 1
            if c[frm] == 0:
                for u in pins[e]:
                    if u != v:
                        adjust(u, -1)
            elif c[frm] == 1:
                for u in pins[e]:
                    if u != v and a[u] == frm:
                        adjust(u, +1)
        a[v] = to
        for u in touched:
            queued[u] = True
            gain[u] = gain_of(u)
            buckets[a[u]].insert(u, gain[u])
        sizes[frm] -= 1
        sizes[to] += 1
        moves.append(v)
        if max(sizes) <= bound and (best_cut is None or cut < best_cut):
            best_cut = cut
            best_len = len(moves)

    for v in moves[best_len:]:
        a[v] = 1 - a[v]
    return a


def baseline_partition(h: Hypergraph, epsilon=0, seed=None) -> Bipartition:
    """Greedy BFS growing to ceil(n/2) vertices, then one FM pass."""
    eps = as_fraction(epsilon)
    rng = np.random.default_rng(seed)
    a = grow_region(h, -(-h.n // 2), rng)
    if h.m:
        a = fm_pass(h, a, eps)
    return Bipartition.from_assignment(h, a, eps)

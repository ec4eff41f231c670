"""Unit-capacity maximum flow computed directly on the hypergraph.

The flow through a hyperedge is stored as the pin sending flow into it
(``flow_from``) and the pin receiving flow from it (``flow_to``). Traversals
enumerate vertex -> hyperedge -> vertex steps that correspond to residual
paths in the Lawler network, which is never built.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Iterator

from .hypergraph import Hypergraph

NO_PIN = -1


class Side(IntEnum):
    SOURCE = 1
    TARGET = 2

    @property
    def other(self) -> Side:
        return Side.TARGET if self is Side.SOURCE else Side.SOURCE


# hop kinds, named after the Lawler nodes they pass through
_FREE = 0  # u -> e_in -> e_out -> v, hyperedge without flow
_BACK = 1  # u -> e_out -> v, u receives flow from e
_REROUTE = 2  # u -> e_in -> flow_from(e)


class FlowState:
    """Flow, terminal sets and reachability flags for one S-T problem."""

    def __init__(self, h: Hypergraph, sources: Iterable[int] = (), targets: Iterable[int] = ()):
        self.h = h
        self.flow_from = [NO_PIN] * h.m
        self.flow_to = [NO_PIN] * h.m
        self.side_of = [0] * h.n
        self.source_reachable = [False] * h.n
        self.target_reachable = [False] * h.n
        self.source_reachable_count = 0
        self.target_reachable_count = 0
        self.flow_value = 0
        self.sources: list[int] = []
        self.targets: list[int] = []
        self.add_terminals(Side.SOURCE, sources)
        self.add_terminals(Side.TARGET, targets)

    def add_terminals(self, side: Side, vertices: Iterable[int]) -> list[int]:
        """Add vertices to a terminal set; returns the ones that were new."""
        added = []
        members = self.sources if side is Side.SOURCE else self.targets
        for v in vertices:
            cur = self.side_of[v]
            if cur == side:
                continue
            if cur:
                raise ValueError(f"vertex {v} is already a {Side(cur).name.lower()} terminal")
            self.side_of[v] = side
            members.append(v)
            added.append(v)
        return added

    def has_flow(self, e: int) -> bool:
        return self.flow_from[e] != NO_PIN

    def reachable(self, side: Side) -> list[bool]:
        return self.source_reachable if side is Side.SOURCE else self.target_reachable

    def reachable_count(self, side: Side) -> int:
        return self.source_reachable_count if side is Side.SOURCE else self.target_reachable_count

    def reachable_vertices(self, side: Side) -> list[int]:
        flags = self.reachable(side)
        return [v for v in range(self.h.n) if flags[v]]

    def copy(self) -> FlowState:
        other = FlowState.__new__(FlowState)
        other.h = self.h
        for name in ("flow_from", "flow_to", "side_of", "source_reachable", "target_reachable",
                     "sources", "targets"):
            setattr(other, name, list(getattr(self, name)))
        other.source_reachable_count = self.source_reachable_count
        other.target_reachable_count = self.target_reachable_count
        other.flow_value = self.flow_value
        return other


@dataclass(frozen=True)
class CutInfo:
    cut_hyperedges: tuple[int, ...]
    side: Side

    @property
    def cut_size(self) -> int:
        return len(self.cut_hyperedges)


def residual_neighbors(h: Hypergraph, f: FlowState, u: int, reverse: bool = False) -> Iterator[tuple[int, int]]:
    """Yield ``(e, v)`` for every residual step u -> e -> v.

    With ``reverse=True`` the steps of the residual network with all flow
    reversed are produced, i.e. ``v`` such that ``u`` is reachable from ``v``;
    this is what the target-side search walks.
    """
    flow_in, flow_out = (f.flow_to, f.flow_from) if reverse else (f.flow_from, f.flow_to)
    for e in h.incidence[u]:
        src = flow_in[e]
        if src == NO_PIN or flow_out[e] == u:
            for v in h.pins[e]:
                if v != u:
                    yield e, v
        elif src != u:
            yield e, src


def _bfs(h: Hypergraph, f: FlowState, side: Side, stop_at_opposite: bool):
    """Breadth-first search from one terminal set over residual steps.

    Returns ``(dist, hit)`` where ``dist[v]`` is the hop distance (-1 when not
    reached) and ``hit`` tells whether an opposite terminal was reached. With
    ``stop_at_opposite`` the search ends after the first layer containing an
    opposite terminal; otherwise it visits everything reachable.
    """
    reverse = side is Side.TARGET
    flow_in, flow_out = (f.flow_to, f.flow_from) if reverse else (f.flow_from, f.flow_to)
    opposite = side.other
    side_of = f.side_of
    pins, incidence = h.pins, h.incidence
    dist = [-1] * h.n
    scanned = [False] * h.m
    frontier = list(f.sources if side is Side.SOURCE else f.targets)
    for s in frontier:
        dist[s] = 0
    hit = False
    level = 0
    while frontier:
        level += 1
        nxt = []
        for u in frontier:
            for e in incidence[u]:
                if scanned[e]:
                    continue
                src = flow_in[e]
                if src == NO_PIN or flow_out[e] == u:
                    # every pin becomes reachable; no later visit can add more
                    scanned[e] = True
                    for v in pins[e]:
                        if dist[v] < 0:
                            dist[v] = level
                            nxt.append(v)
                            if side_of[v] == opposite:
                                hit = True
                elif src != u and dist[src] < 0:
                    dist[src] = level
                    nxt.append(src)
                    if side_of[src] == opposite:
                        hit = True
        if hit and stop_at_opposite:
            break
        frontier = nxt
    return dist, hit


def compute_reachable(h: Hypergraph, f: FlowState, side: Side) -> int:
    """Recompute the reachable flags of ``side``; returns their count."""
    dist, _ = _bfs(h, f, side, stop_at_opposite=False)
    flags = [d >= 0 for d in dist]
    count = sum(flags)
    if side is Side.SOURCE:
        f.source_reachable, f.source_reachable_count = flags, count
    else:
        f.target_reachable, f.target_reachable_count = flags, count
    return count


def _blocking_flow(h: Hypergraph, f: FlowState, dist: list[int]) -> int:
    """Augment along level-increasing source->target paths until none is left."""
    pins, incidence = h.pins, h.incidence
    flow_from, flow_to, side_of = f.flow_from, f.flow_to, f.side_of
    target = Side.TARGET
    dead = [False] * h.n
    arc = [0] * h.n
    # Lawler in-node / out-node of a hyperedge already on the current path
    in_used = [False] * h.m
    out_used = [False] * h.m
    pushed = 0

    def next_hop(u: int):
        inc = incidence[u]
        want = dist[u] + 1
        while arc[u] < len(inc):
            e = inc[arc[u]]
            src = flow_from[e]
            if src == NO_PIN:
                if not in_used[e] and not out_used[e]:
                    for v in pins[e]:
                        if dist[v] == want and not dead[v]:
                            return e, v, _FREE
            elif flow_to[e] == u:
                if not out_used[e]:
                    for v in pins[e]:
                        if dist[v] == want and not dead[v] and v != u:
                            return e, v, _BACK
            elif src != u:
                if not in_used[e] and dist[src] == want and not dead[src]:
                    return e, src, _REROUTE
            arc[u] += 1
        return None

    for s in list(f.sources):
        if dist[s] != 0:
            continue
        while not dead[s]:
            stack = [s]
            hops: list[tuple[int, int]] = []
            reached = False
            while stack:
                u = stack[-1]
                if side_of[u] == target:
                    reached = True
                    break
                hop = next_hop(u)
                if hop is None:
                    dead[u] = True
                    stack.pop()
                    if hops:
                        e, kind = hops.pop()
                        if kind != _BACK:
                            in_used[e] = False
                        if kind != _REROUTE:
                            out_used[e] = False
                    continue
                e, v, kind = hop
                if kind != _BACK:
                    in_used[e] = True
                if kind != _REROUTE:
                    out_used[e] = True
                hops.append((e, kind))
                stack.append(v)
            if not reached:
                break
            for i, (e, kind) in enumerate(hops):
                u, v = stack[i], stack[i + 1]
                in_used[e] = out_used[e] = False
                if kind == _FREE:
                    flow_from[e], flow_to[e] = u, v
                elif kind == _BACK:
                    if v == flow_from[e]:
                        # flow would enter and leave e at v: cancel it
                        flow_from[e] = flow_to[e] = NO_PIN
                    else:
                        flow_to[e] = v
                else:
                    flow_from[e] = u
            pushed += 1
    return pushed


def augment_max_flow(h: Hypergraph, f: FlowState) -> int:
    """Augment ``f`` to a maximum flow with Dinic's algorithm.

    The last breadth-first search, the one that no longer reaches a target,
    is kept as the source-reachable set. Returns the amount of flow added.
    """
    if not f.sources or not f.targets:
        raise ValueError("both terminal sets must be non-empty")
    added = 0
    while True:
        dist, hit = _bfs(h, f, Side.SOURCE, stop_at_opposite=True)
        if not hit:
            f.source_reachable = [d >= 0 for d in dist]
            f.source_reachable_count = sum(f.source_reachable)
            break
        pushed = _blocking_flow(h, f, dist)
        if pushed == 0:
            raise RuntimeError("blocking-flow phase made no progress")
        added += pushed
    f.flow_value += added
    return added


def extract_cut(h: Hypergraph, f: FlowState, side: Side) -> CutInfo:
    """Hyperedges with pins on both sides of the given reachable set.

    The reachable set is recomputed first, so the cut always matches ``f``.
    """
    compute_reachable(h, f, side)
    flags = f.reachable(side)
    cut = []
    for e, edge in enumerate(h.pins):
        inside = sum(1 for v in edge if flags[v])
        if 0 < inside < len(edge):
            cut.append(e)
    return CutInfo(tuple(cut), side)

"""Core HyperFlowCutter: incremental S-T min cuts with piercing on a connected hypergraph."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .hypergraph import Bipartition, Hypergraph, as_fraction, is_connected, max_block_size
from .maxflow import FlowState, Side, augment_max_flow, compute_reachable


class PiercingExhausted(Exception):
    """The growing side has no vertex left to pierce."""


@dataclass(frozen=True)
class _Snapshot:
    # block ids with the source side as block 0; isolated vertices start on
    # the far side and the first `moved` of them are moved next to `side`
    base: np.ndarray
    isolated: np.ndarray
    moved: int
    side: Side

    def assignment(self) -> np.ndarray:
        a = self.base.copy()
        if self.moved:
            a[self.isolated[: self.moved]] = 0 if self.side is Side.SOURCE else 1
        return a


@dataclass(frozen=True)
class FrontEntry:
    smaller: int
    cut: int
    snapshot: _Snapshot

    def assignment(self) -> np.ndarray:
        return self.snapshot.assignment()


class ParetoFront:
    """Best known cut per smaller-block size.

    Entries are kept only while no more balanced entry has a strictly smaller
    cut, so cuts never decrease as the smaller block grows.
    """

    def __init__(self, n: int):
        self.n = n
        self._entries: dict[int, FrontEntry] = {}

    def __len__(self):
        return len(self._entries)

    def __iter__(self) -> Iterator[FrontEntry]:
        return (self._entries[s] for s in sorted(self._entries))

    def __getitem__(self, smaller: int) -> FrontEntry:
        return self._entries[smaller]

    def __contains__(self, smaller: int) -> bool:
        return smaller in self._entries

    def items(self) -> list[tuple[int, int]]:
        return [(e.smaller, e.cut) for e in self]

    def record(self, entry: FrontEntry) -> bool:
        s, c = entry.smaller, entry.cut
        for t, other in self._entries.items():
            if t >= s and other.cut < c or t == s and other.cut <= c:
                return False
        for t in [t for t, other in self._entries.items() if t < s and other.cut > c]:
            del self._entries[t]
        self._entries[s] = entry
        return True

    def merge(self, other: ParetoFront) -> None:
        for entry in other:
            self.record(entry)

    def best(self, epsilon) -> FrontEntry | None:
        """Cheapest entry that is balanced for ``epsilon`` (most balanced on ties)."""
        lo = self.n - max_block_size(self.n, epsilon)
        best = None
        for entry in self:
            if entry.smaller >= lo and (best is None or entry.cut < best.cut):
                best = entry
        return best

    def bipartition(self, h: Hypergraph, entry: FrontEntry, epsilon=0) -> Bipartition:
        return Bipartition.from_assignment(h, entry.assignment(), epsilon)


class CutterState:
    """One HyperFlowCutter run, advanced one piercing step at a time.

    Block 0 of every recorded bipartition contains the source terminals and
    block 1 the target terminals.
    """

    def __init__(self, h: Hypergraph, sources: Iterable[int], targets: Iterable[int],
                 target_epsilon=0, seed=None):
        sources, targets = sorted(set(sources)), sorted(set(targets))
        if not sources or not targets:
            raise ValueError("terminal sets must be non-empty")
        if set(sources) & set(targets):
            raise ValueError("terminal sets overlap")
        self.h = h
        self.target_epsilon: Fraction = as_fraction(target_epsilon)
        self.piercing_rng = np.random.default_rng(seed)
        self.flow = FlowState(h)
        self.front = ParetoFront(h.n)
        self.half = -(-h.n // 2)
        self.max_block = max_block_size(h.n, self.target_epsilon)

        # per hyperedge: number of source / target pins
        self._in_source = [0] * h.m
        self._in_target = [0] * h.m
        # per vertex: incident hyperedges that are not mixed
        self._unmixed = [len(inc) for inc in h.incidence]
        self.isolated = [len(inc) == 0 for inc in h.incidence]
        self.isolated_count = sum(self.isolated)
        self._isolated_list = [v for v in range(h.n) if self.isolated[v]]
        # hyperedges with pins both inside and outside each terminal set
        self._boundary = {Side.SOURCE: set(), Side.TARGET: set()}

        self._add(Side.SOURCE, sources)
        self._add(Side.TARGET, targets)

        self.started = False
        self.finished = False
        self.exhausted = False
        self.balanced: FrontEntry | None = None
        self.steps = 0
        self.cut_history: list[int] = []

    @property
    def cut(self) -> int:
        return self.flow.flow_value

    def terminal_count(self, side: Side) -> int:
        return len(self.flow.sources if side is Side.SOURCE else self.flow.targets)

    def is_isolated(self, v: int) -> bool:
        return is_isolated(self.h, self, v)

    def _add(self, side: Side, vertices: Iterable[int]) -> list[int]:
        added = self.flow.add_terminals(side, vertices)
        h = self.h
        mine, theirs = ((self._in_source, self._in_target) if side is Side.SOURCE
                        else (self._in_target, self._in_source))
        boundary = self._boundary[side]
        for v in added:
            for e in h.incidence[v]:
                mine[e] += 1
                size = len(h.pins[e])
                if mine[e] == 1:
                    boundary.add(e)
                    if theirs[e] > 0:
                        self._mark_mixed(e)
                if mine[e] == size:
                    boundary.discard(e)
        return added

    def _mark_mixed(self, e: int) -> None:
        side_of = self.flow.side_of
        for v in self.h.pins[e]:
            if side_of[v] == 0:
                self._unmixed[v] -= 1
                if self._unmixed[v] == 0 and not self.isolated[v]:
                    self.isolated[v] = True
                    self.isolated_count += 1
                    self._isolated_list.append(v)

    def _mixed(self, e: int) -> bool:
        return self._in_source[e] > 0 and self._in_target[e] > 0

    def step(self) -> bool:
        """Advance by one iteration; returns False once the run is over."""
        if self.finished:
            return False
        self.steps += 1
        if not self.started:
            self.started = True
            augment_max_flow(self.h, self.flow)
            compute_reachable(self.h, self.flow, Side.TARGET)
        else:
            f = self.flow
            side = Side.SOURCE if f.source_reachable_count <= f.target_reachable_count else Side.TARGET
            self._add(side, f.reachable_vertices(side))
            try:
                pierce = find_piercing(self.h, self, side)
            except PiercingExhausted:
                self.finished = self.exhausted = True
                return False
            self._add(side, pierce)
            opposite = f.reachable(side.other)
            if any(opposite[v] for v in pierce):
                augment_max_flow(self.h, f)
                compute_reachable(self.h, f, Side.TARGET)
            else:
                # flow is still maximal, only the growing side's reachability changes
                compute_reachable(self.h, f, side)
        self.cut_history.append(self.cut)
        self._record()
        if self.balanced is not None:
            self.finished = True
        return not self.finished

    def _record(self) -> None:
        f = self.flow
        n = self.h.n
        iso = np.asarray(self._isolated_list, dtype=np.int64)
        for side in (Side.SOURCE, Side.TARGET):
            flags = np.asarray(f.reachable(side), dtype=bool)
            a = int(flags.sum())
            base = np.where(flags, 0, 1).astype(np.int8) if side is Side.SOURCE \
                else np.where(flags, 1, 0).astype(np.int8)
            check = balance_check(self, side, self.target_epsilon, _counts=(a, len(iso)))
            for x in range(len(iso) + 1):
                smaller = min(a + x, n - a - x)
                entry = FrontEntry(smaller, self.cut, _Snapshot(base, iso, x, side))
                self.front.record(entry)
                if check == x and self.balanced is None:
                    self.balanced = entry

    def run(self, max_steps: int | None = None) -> ParetoFront:
        while not self.finished and (max_steps is None or self.steps < max_steps):
            self.step()
        return self.front


def is_isolated(h: Hypergraph, state: CutterState, v: int) -> bool:
    """True iff every hyperedge at the non-terminal ``v`` has source and target pins."""
    if state.flow.side_of[v]:
        raise ValueError(f"vertex {v} is a terminal")
    return all(state._mixed(e) for e in h.incidence[v])


def balance_check(state: CutterState, side: Side, epsilon, _counts=None) -> int | None:
    """Isolated vertices to move next to ``side`` for an eps-balanced bipartition.

    The bipartition is (reachable set of ``side`` plus x isolated vertices,
    rest). Returns the x closest to perfect balance when that is within the
    bound, or None.
    """
    n = state.h.n
    if _counts is None:
        a, iso = state.flow.reachable_count(side), state.isolated_count
    else:
        a, iso = _counts
    bound = max_block_size(n, epsilon)
    x = min(max(0, n // 2 - a), iso)
    if max(a + x, n - a - x) <= bound:
        return x
    return None


def balanced_bipartition(state: CutterState, side: Side, epsilon) -> Bipartition | None:
    """Materialise the bipartition reported by :func:`balance_check`."""
    x = balance_check(state, side, epsilon)
    if x is None:
        return None
    f = state.flow
    flags = np.asarray(f.reachable(side), dtype=bool)
    base = (np.where(flags, 0, 1) if side is Side.SOURCE else np.where(flags, 1, 0)).astype(np.int8)
    snap = _Snapshot(base, np.asarray(state._isolated_list, dtype=np.int64), x, side)
    return Bipartition.from_assignment(state.h, snap.assignment(), epsilon)


def find_piercing(h: Hypergraph, state: CutterState, side: Side) -> list[int]:
    """Vertices to add to ``side`` so that the next minimum cut differs.

    Candidates are the non-terminal pins of a non-mixed cut hyperedge, or a
    single non-terminal vertex on the cut. Candidates not reachable from the
    opposite side come first, then hyperedges before single vertices; the
    rest is a uniform random choice. If the cut has no candidate at all, any
    free non-isolated vertex is used.
    """
    f = state.flow
    side_of = f.side_of
    opposite = f.reachable(side.other)
    room = state.half - state.terminal_count(side)
    mine = state._in_source if side is Side.SOURCE else state._in_target

    edge_cands: list[list[int]] = [[], []]  # index 1 = avoids augmenting paths
    vertex_cands: list[list[int]] = [[], []]
    seen = set()
    for e in sorted(state._boundary[side]):
        if mine[e] == 0 or mine[e] == len(h.pins[e]):
            continue
        free = [v for v in h.pins[e] if side_of[v] == 0]
        if not state._mixed(e) and len(free) <= room:
            edge_cands[not any(opposite[v] for v in free)].append(e)
        for v in free:
            if v not in seen and not state.isolated[v]:
                seen.add(v)
                vertex_cands[not opposite[v]].append(v)

    rng = state.piercing_rng
    for avoid in (1, 0):
        if edge_cands[avoid]:
            e = edge_cands[avoid][rng.integers(len(edge_cands[avoid]))]
            return [v for v in h.pins[e] if side_of[v] == 0]
        if vertex_cands[avoid]:
            pool = sorted(vertex_cands[avoid])
            return [pool[rng.integers(len(pool))]]
    # the cut offers nothing (only mixed hyperedges with isolated pins): any
    # free vertex still forces a different cut
    rest: list[list[int]] = [[], []]
    for v in range(h.n):
        if side_of[v] == 0 and not state.isolated[v]:
            rest[not opposite[v]].append(v)
    for avoid in (1, 0):
        if rest[avoid]:
            return [rest[avoid][rng.integers(len(rest[avoid]))]]
    raise PiercingExhausted(side)


def run_core(h: Hypergraph, s_init: Iterable[int], t_init: Iterable[int], target_epsilon=0,
             seed=None, max_steps: int | None = None, check_connected: bool = True) -> ParetoFront:
    """Run HyperFlowCutter from one terminal pair until an eps-balanced cut is recorded."""
    if check_connected and not is_connected(h):
        raise ValueError("hypergraph is disconnected; split it into components first")
    state = CutterState(h, s_init, t_init, target_epsilon, seed)
    return state.run(max_steps)

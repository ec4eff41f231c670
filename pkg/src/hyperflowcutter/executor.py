"""Running HyperFlowCutter with many terminal pairs.

Pairs are executed interleaved: the pair with the currently smallest cut
makes the next step, so the total work is governed by the smallest balanced
cut rather than the largest. Pairs are grouped into waves that run one after
another, and an incumbent is available after every completed wave.
"""

from __future__ import annotations

import heapq
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .baseline import baseline_partition
from .core import CutterState, ParetoFront
from .disconnected import (
    DEFAULT_SAMPLE_BUDGET,
    ComponentPareto,
    Combination,
    SplitOption,
    combine,
    gap_filler,
)
from .hypergraph import Bipartition, Hypergraph, as_fraction, connected_components

log = logging.getLogger(__name__)

DEFAULT_WAVES = (1, 5, 14, 80)
DEFAULT_ENSEMBLE_PAIRS = 3
DEFAULT_POOL_SIZE = 10

Pair = tuple[list[int], list[int]]


class NoSolutionError(RuntimeError):
    """The time limit expired before any balanced bipartition was available."""


@dataclass(frozen=True)
class ExecutorConfig:
    wave_sizes: tuple[int, ...] = DEFAULT_WAVES
    ensemble_pairs: int = DEFAULT_ENSEMBLE_PAIRS
    pool_size: int = DEFAULT_POOL_SIZE
    time_limit: float | None = None
    seed: int = 0
    epsilon: Fraction = Fraction(0)
    sample_budget: int = DEFAULT_SAMPLE_BUDGET

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        object.__setattr__(self, "wave_sizes", tuple(int(w) for w in self.wave_sizes))
        if not self.wave_sizes or min(self.wave_sizes) < 1:
            raise ValueError("every wave needs at least one terminal pair")
        if not 0 <= self.ensemble_pairs <= self.pair_count:
            raise ValueError("ensemble pairs must not exceed the pair count")
        if self.ensemble_pairs and self.pool_size < 1:
            raise ValueError("ensemble pairs need a non-empty partition pool")

    @property
    def pair_count(self) -> int:
        return sum(self.wave_sizes)

    @classmethod
    def with_pairs(cls, q: int, **kw) -> ExecutorConfig:
        """A single wave of ``q`` pairs: the first ensemble pair plus random ones."""
        return cls(wave_sizes=(q,), ensemble_pairs=min(1, q), **kw)


@dataclass
class InterleaveResult:
    best: Bipartition | None
    best_pair: int | None
    states: list[CutterState]
    completed: bool = True

    @property
    def fronts(self) -> list[ParetoFront]:
        return [s.front for s in self.states]

    @property
    def best_cut(self) -> int | None:
        return None if self.best is None else self.best.cut_size


def pair_seed(seed: int, index: int) -> list[int]:
    """Seed material of the piercing generator of pair ``index``."""
    return [int(seed), int(index)]


def interleave(h: Hypergraph, pairs: Sequence[Pair], epsilon, seed: int = 0, *,
               prune: bool = True, incumbent: int | None = None,
               deadline: float | None = None, first_index: int = 0) -> InterleaveResult:
    """Run one core instance per pair, always advancing the smallest current cut.

    A pair stops early once its cut exceeds the best balanced cut published
    so far (``incumbent`` seeds that bound). Each pair's own evolution does
    not depend on the scheduling.
    """
    if not pairs:
        raise ValueError("no terminal pairs")
    eps = as_fraction(epsilon)
    states = [CutterState(h, s, t, eps, pair_seed(seed, first_index + i))
              for i, (s, t) in enumerate(pairs)]
    heap = [(0, i) for i in range(len(states))]
    bound = incumbent
    completed = True
    while heap:
        if deadline is not None and time.monotonic() > deadline:
            completed = False
            break
        _, i = heapq.heappop(heap)
        st = states[i]
        if prune and bound is not None and st.cut > bound:
            continue
        if st.step():
            heapq.heappush(heap, (st.cut, i))
        elif st.balanced is not None and (bound is None or st.balanced.cut < bound):
            bound = st.balanced.cut

    best, best_pair = None, None
    for i, st in enumerate(states):
        if st.balanced is not None and (best is None or st.balanced.cut < best.cut):
            best, best_pair = st.balanced, i
    bip = None if best is None else Bipartition.from_assignment(h, best.assignment(), eps)
    return InterleaveResult(bip, best_pair, states, completed)


def random_pairs(n: int, count: int, rng: np.random.Generator,
                 vertices: Sequence[int] | None = None) -> list[Pair]:
    """``count`` pairs of two distinct uniformly random vertices."""
    pool = np.arange(n) if vertices is None else np.asarray(vertices)
    if len(pool) < 2:
        raise ValueError("need at least two vertices for a terminal pair")
    pairs = []
    for _ in range(count):
        s = int(pool[rng.integers(len(pool))])
        t = s
        while t == s:
            t = int(pool[rng.integers(len(pool))])
        pairs.append(([s], [t]))
    return pairs


@dataclass
class EnsemblePool:
    partitions: list[Bipartition]
    classes: list[np.ndarray]

    @classmethod
    def from_partitions(cls, partitions: Sequence[Bipartition]) -> EnsemblePool:
        if not partitions:
            raise ValueError("empty partition pool")
        n = partitions[0].n
        # vertices agree on every partition iff their columns agree
        cols = np.stack([np.asarray(p.assignment, dtype=np.int8) for p in partitions], axis=1)
        if n == 0:
            return cls(list(partitions), [])
        _, inverse = np.unique(cols, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        groups = [np.flatnonzero(inverse == c) for c in range(inverse.max() + 1)]
        groups.sort(key=lambda g: (-len(g), int(g[0])))
        return cls(list(partitions), groups)

    @classmethod
    def build(cls, h: Hypergraph, epsilon, size: int = DEFAULT_POOL_SIZE, seed: int = 0) -> EnsemblePool:
        parts = [baseline_partition(h, epsilon, seed=[int(seed), 1_000_003, i]) for i in range(size)]
        return cls.from_partitions(parts)

    def best(self) -> Bipartition:
        return min(self.partitions, key=lambda p: p.cut_size)


def ensemble_terminal_pairs(h: Hypergraph, pool: EnsemblePool, k: int,
                            rng: np.random.Generator | None = None) -> list[Pair]:
    """Pair up equivalence classes (largest first): (1st, 2nd), (3rd, 4th), ..."""
    classes = pool.classes
    if len(classes) < 2:
        if rng is None:
            rng = np.random.default_rng(0)
        return random_pairs(h.n, k, rng)
    pairs = []
    for i in range(0, len(classes) - 1, 2):
        if len(pairs) == k:
            break
        pairs.append((classes[i].tolist(), classes[i + 1].tolist()))
    return pairs


def plan_waves(h: Hypergraph, cfg: ExecutorConfig, rng: np.random.Generator,
               pool: EnsemblePool | None) -> list[list[Pair]]:
    """Wave 1 opens with the first ensemble pair, the last wave carries the
    remaining ensemble pairs, everything else is random pairs."""
    ens = ensemble_terminal_pairs(h, pool, cfg.ensemble_pairs, rng) if cfg.ensemble_pairs else []
    waves: list[list[Pair]] = []
    last = len(cfg.wave_sizes) - 1
    for w, size in enumerate(cfg.wave_sizes):
        if last == 0:
            fixed = ens[:size]
        elif w == 0:
            fixed = ens[:1]
        elif w == last:
            fixed = ens[1 : 1 + size]
        else:
            fixed = []
        randoms = random_pairs(h.n, size - len(fixed), rng)
        waves.append(fixed + randoms if w == 0 else randoms + fixed)
    return waves


@dataclass
class WaveResult:
    bipartition: Bipartition
    waves_completed: int
    wave_cuts: list[int | None] = field(default_factory=list)
    timed_out: bool = False
    fallback: bool = False
    front: ParetoFront | None = None


def run_waves(h: Hypergraph, cfg: ExecutorConfig, pool: EnsemblePool | None = None,
              deadline: float | None = None, full_front: bool = False) -> WaveResult:
    """Plain HyperFlowCutter on a connected hypergraph with waves of terminal pairs."""
    if h.n < 2:
        raise ValueError("need at least two vertices")
    if deadline is None and cfg.time_limit is not None:
        deadline = time.monotonic() + cfg.time_limit
    rng = np.random.default_rng([int(cfg.seed), 7])
    if cfg.ensemble_pairs and pool is None:
        pool = EnsemblePool.build(h, cfg.epsilon, cfg.pool_size, cfg.seed)
    waves = plan_waves(h, cfg, rng, pool)

    incumbent: Bipartition | None = None
    merged = ParetoFront(h.n) if full_front else None
    wave_cuts: list[int | None] = []
    done = 0
    timed_out = False
    first = 0
    for pairs in waves:
        if deadline is not None and time.monotonic() > deadline:
            timed_out = True
            break
        res = interleave(h, pairs, cfg.epsilon, cfg.seed, prune=not full_front,
                         incumbent=None if incumbent is None else incumbent.cut_size,
                         deadline=deadline, first_index=first)
        first += len(pairs)
        if not res.completed:
            timed_out = True
            break
        done += 1
        if merged is not None:
            for fr in res.fronts:
                merged.merge(fr)
        if res.best is not None and (incumbent is None or res.best.cut_size < incumbent.cut_size):
            incumbent = res.best
        wave_cuts.append(None if incumbent is None else incumbent.cut_size)

    if done == 0:
        raise NoSolutionError("time limit expired before the first wave completed")
    fallback = False
    if incumbent is None:
        # every pair got stuck before reaching balance
        fallback = True
        incumbent = pool.best() if pool is not None else baseline_partition(h, cfg.epsilon, cfg.seed)
        log.warning("no terminal pair reached balance; returning the baseline partition")
    return WaveResult(incumbent, done, wave_cuts, timed_out, fallback, merged)


@dataclass
class PartitionResult:
    bipartition: Bipartition
    status: str  # "ok" or "zero-cut-preprocessing"
    waves_completed: int | None = None
    timed_out: bool = False
    combination: Combination | None = None


def component_pair_budget(sizes: Sequence[int], total: int) -> list[int]:
    """Split ``total`` pairs over components proportionally to size, at least one each."""
    whole = sum(sizes)
    return [max(1, round(total * s / whole)) for s in sizes]


def component_options(sub: Hypergraph, front: ParetoFront) -> list[SplitOption]:
    opts = []
    for entry in front:
        a = entry.assignment()
        if int((a == 0).sum()) != entry.smaller:
            a = (1 - a).astype(np.int8)
        opts.append(SplitOption(entry.smaller, entry.cut, a))
    return opts


def partition_disconnected(h: Hypergraph, cfg: ExecutorConfig,
                           deadline: float | None = None) -> PartitionResult:
    """Partition every component up to perfect balance and combine the fronts."""
    dec = connected_components(h)
    sizes = [int(s) for s in dec.component_sizes]
    g, k = gap_filler(sizes)
    members = [dec.vertices(c) for c in range(dec.count)]
    budgets = component_pair_budget(sizes[k:], cfg.pair_count) if k < len(sizes) else []

    fronts = []
    subs: dict[int, np.ndarray] = {}
    timed_out = False
    for c, size in enumerate(sizes):
        if c < k or size < 2:
            fronts.append(ComponentPareto(c, size, []))
            continue
        sub, glob = h.subhypergraph(members[c])
        subs[c] = glob
        q = budgets[c - k]
        rng = np.random.default_rng([int(cfg.seed), 11, c])
        pairs: list[Pair] = []
        if cfg.ensemble_pairs:
            pool = EnsemblePool.build(sub, 0, cfg.pool_size, cfg.seed)
            pairs = ensemble_terminal_pairs(sub, pool, min(cfg.ensemble_pairs, q), rng)
        pairs += random_pairs(sub.n, q - len(pairs), rng)
        res = interleave(sub, pairs, 0, cfg.seed, prune=True, deadline=deadline)
        timed_out |= not res.completed
        front = ParetoFront(sub.n)
        for fr in res.fronts:
            front.merge(fr)
        opts = component_options(sub, front)
        if not any(o.smaller == size // 2 for o in opts):
            # the combiner needs a perfectly balanced split of every component
            base = baseline_partition(sub, 0, seed=cfg.seed)
            a = base.assignment if base.block_sizes[0] <= base.block_sizes[1] else 1 - base.assignment
            opts.append(SplitOption(min(base.block_sizes), base.cut_size, np.asarray(a, np.int8)))
        fronts.append(ComponentPareto(c, size, opts))

    comb = combine(fronts, h.n, cfg.epsilon, cfg.sample_budget, np.random.default_rng(cfg.seed))
    assignment = assemble(h.n, members, fronts, comb)
    bip = Bipartition.from_assignment(h, assignment, cfg.epsilon)
    status = "zero-cut-preprocessing" if comb.zero_cut else "ok"
    return PartitionResult(bip, status, None, timed_out, comb)


def assemble(n: int, members: Sequence[np.ndarray], fronts: Sequence[ComponentPareto],
             comb: Combination) -> np.ndarray:
    """Global assignment for a combination; block 0 receives each choice's ``part``."""
    a = np.ones(n, dtype=np.int8)
    by_comp = {f.component: f for f in fronts}
    for ch in comb.choices:
        verts = members[ch.component]
        if ch.option is None:
            a[verts] = 0 if ch.part == len(verts) else 1
        else:
            local = by_comp[ch.component].options[ch.option].assignment
            a[verts] = (1 - local) if ch.flipped else local
    return a


def partition(h: Hypergraph, cfg: ExecutorConfig | None = None) -> PartitionResult:
    """Eps-balanced bipartition of any hypergraph with plain HyperFlowCutter."""
    cfg = cfg or ExecutorConfig()
    if h.n < 2:
        raise ValueError("need at least two vertices")
    deadline = None if cfg.time_limit is None else time.monotonic() + cfg.time_limit
    if connected_components(h).count > 1:
        return partition_disconnected(h, cfg, deadline)
    res = run_waves(h, cfg, deadline=deadline)
    return PartitionResult(res.bipartition, "ok", res.waves_completed, res.timed_out)

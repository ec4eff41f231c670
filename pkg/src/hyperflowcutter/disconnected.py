"""Bipartitioning disconnected hypergraphs by combining per-component fronts.

Picking which component parts go to which block is a SubsetSum instance over
component sizes. A zero cut exists iff some subset of whole components lands
in the balance window; otherwise a cost-minimising variant of the same
dynamic program chooses one split (or no split) per component.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .hypergraph import max_block_size

DEFAULT_SAMPLE_BUDGET = 10**8


class InfeasibleCombination(ValueError):
    """No choice of component options lands in the balance window."""


def balance_window(n: int, epsilon) -> tuple[int, int]:
    """Admissible sizes of either block: ``[n - max_block, max_block]``."""
    hi = max_block_size(n, epsilon)
    return max(0, n - hi), min(n, hi)


def zero_cut_subsetsum(sizes: Sequence[int], n: int, epsilon) -> list[int] | None:
    """Indices of whole components whose sizes sum into the balance window.

    Row-by-row SubsetSum; ``first[s]`` remembers the item that made sum ``s``
    reachable, which is enough to walk a solution back.
    """
    sizes = [int(s) for s in sizes]
    if sum(sizes) != n:
        raise ValueError("component sizes must sum to n")
    lo, hi = balance_window(n, epsilon)
    reach = np.zeros(hi + 1, dtype=bool)
    reach[0] = True
    first = np.full(hi + 1, -1, dtype=np.int64)
    for i, a in enumerate(sizes):
        if a > hi:
            continue
        shifted = np.zeros_like(reach)
        shifted[a:] = reach[: hi + 1 - a]
        new = shifted & ~reach
        first[new] = i
        reach |= new
    hits = np.flatnonzero(reach[lo:]) + lo
    if len(hits) == 0:
        return None
    s = int(hits[0])
    chosen = []
    while s > 0:
        i = int(first[s])
        chosen.append(i)
        s -= sizes[i]
    return sorted(chosen)


def gap_filler(sizes: Sequence[int]) -> tuple[int, int]:
    """``(g, k)``: every value in ``[0, g]`` is a sum of the first ``k`` sizes.

    ``sizes`` must be sorted increasingly. ``k`` is the smallest index whose
    size exceeds one plus the sum before it (``len(sizes)`` if none does), and
    ``g`` is that prefix sum. Components before ``k`` never need to be split.
    """
    if any(b < a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be sorted increasingly")
    total = 0
    for k, a in enumerate(sizes):
        if a > total + 1:
            return total, k
        total += a
    return total, len(sizes)


def fill_gap(sizes: Sequence[int], x: int) -> list[int]:
    """Indices of a prefix subset summing exactly to ``x`` (greedy, largest first)."""
    chosen = []
    for i in range(len(sizes) - 1, -1, -1):
        if sizes[i] <= x:
            chosen.append(i)
            x -= sizes[i]
    if x:
        raise ValueError("value is not formable from the gap-filler components")
    return sorted(chosen)


@dataclass
class SplitOption:
    smaller: int
    cut: int
    # local block ids, block 0 holding `smaller` vertices; None when only
    # the cost matters (e.g. in tests)
    assignment: np.ndarray | None = None


@dataclass
class ComponentPareto:
    component: int
    size: int
    options: list[SplitOption] = field(default_factory=list)

    def __post_init__(self):
        for opt in self.options:
            if not 0 < opt.smaller <= self.size // 2:
                raise ValueError(f"split size {opt.smaller} invalid for component of size {self.size}")
        self.options.sort(key=lambda o: (o.smaller, o.cut))


@dataclass(frozen=True)
class Choice:
    """How one component is used: ``option`` is None for an unsplit component.

    ``part`` is the number of the component's vertices placed in block 0.
    """

    component: int
    option: int | None
    part: int
    flipped: bool = False
    cost: int = 0


@dataclass
class Combination:
    choices: list[Choice]
    cut: int
    block0: int
    gap_filler: int
    zero_cut: bool = False

    @property
    def split_count(self) -> int:
        return sum(c.option is not None for c in self.choices)


def _subsample(opts: list[SplitOption], keep: int, rng: np.random.Generator | None) -> list[int]:
    """Evenly spaced option indices along the size axis, always retaining the
    most balanced and the cheapest option."""
    if keep >= len(opts):
        return list(range(len(opts)))
    keep = max(keep, 2)
    cheapest = min(range(len(opts)), key=lambda i: (opts[i].cut, -opts[i].smaller))
    balanced = len(opts) - 1
    idx = set(np.linspace(0, len(opts) - 1, keep).round().astype(int).tolist())
    idx |= {cheapest, balanced}
    return sorted(idx)


def combine(fronts: Sequence[ComponentPareto], n: int, epsilon,
            sample_budget: int = DEFAULT_SAMPLE_BUDGET,
            rng: np.random.Generator | None = None) -> Combination:
    """Choose one option per component minimising the total cut.

    A split option of size ``s`` may put ``s`` or ``size - s`` vertices into
    block 0; an unsplit component puts all or none. Components below the
    gap-filler index are left out of the dynamic program and used afterwards
    to top block 0 up into the balance window.
    """
    order = sorted(range(len(fronts)), key=lambda i: (fronts[i].size, fronts[i].component))
    sizes = [fronts[i].size for i in order]
    if sum(sizes) != n:
        raise ValueError("component sizes must sum to n")
    lo, hi = balance_window(n, epsilon)

    zero = zero_cut_subsetsum(sizes, n, epsilon)
    if zero is not None:
        inside = set(zero)
        choices = [Choice(fronts[order[j]].component, None, sizes[j] if j in inside else 0)
                   for j in range(len(order))]
        return Combination(choices, 0, sum(sizes[j] for j in inside), gap_filler(sizes)[0], True)

    g, k = gap_filler(sizes)
    items = [fronts[i] for i in order[k:]]

    # per item: list of (delta, cost, option index, flipped)
    width = hi + 1
    total_opts = sum(2 * len(it.options) + 2 for it in items)
    per_item_keep = None
    if items and total_opts * width > sample_budget:
        per_item_keep = max(2, sample_budget // (width * 2 * len(items)))
    moves_per_item = []
    for it in items:
        idx = range(len(it.options)) if per_item_keep is None else _subsample(it.options, per_item_keep, rng)
        moves = [(0, 0, None, False), (it.size, 0, None, False)]
        for oi in idx:
            opt = it.options[oi]
            moves.append((opt.smaller, opt.cut, oi, False))
            if it.size - opt.smaller != opt.smaller:
                moves.append((it.size - opt.smaller, opt.cut, oi, True))
        moves_per_item.append(moves)

    # key = cost * scale + number of splits: ties prefer fewer split components
    scale = len(items) + 1
    inf = np.iinfo(np.int64).max // 4
    dp = np.full(width, inf, dtype=np.int64)
    dp[0] = 0
    back = []
    for moves in moves_per_item:
        nxt = np.full(width, inf, dtype=np.int64)
        arg = np.full(width, -1, dtype=np.int64)
        for mi, (delta, cost, oi, _) in enumerate(moves):
            if delta > hi:
                continue
            cand = np.full(width, inf, dtype=np.int64)
            src = dp[: width - delta]
            ok = src < inf
            cand[delta:][ok] = src[ok] + cost * scale + (oi is not None)
            better = cand < nxt
            nxt[better] = cand[better]
            arg[better] = mi
        dp = nxt
        back.append(arg)

    admissible = np.arange(width)
    admissible = admissible[(admissible >= max(0, lo - g)) & (dp < inf)]
    if len(admissible) == 0:
        raise InfeasibleCombination("no admissible combination; every component needs a balanced split")
    # lowest key, then the sum closest to the window centre
    keys = dp[admissible]
    best = admissible[keys == keys.min()]
    s = int(best[np.argmin(np.abs(2 * best - n))])

    total_cut = int(dp[s] // scale)
    chosen: dict[int, Choice] = {}
    pos = s
    for j in range(len(items) - 1, -1, -1):
        delta, cost, oi, flipped = moves_per_item[j][back[j][pos]]
        it = items[j]
        chosen[it.component] = Choice(it.component, oi, delta, flipped, cost)
        pos -= delta
    assert pos == 0

    deficit = max(0, lo - s)
    fill = set(fill_gap(sizes[:k], deficit))
    for j in range(k):
        comp = fronts[order[j]].component
        chosen[comp] = Choice(comp, None, sizes[j] if j in fill else 0)
    choices = [chosen[fronts[i].component] for i in order]
    return Combination(choices, total_cut, s + deficit, g)

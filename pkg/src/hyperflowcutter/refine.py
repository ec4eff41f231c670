"""Refinement (and balance repair) of an existing bipartition.

Both blocks are shrunk to their interior by a BFS from the cut; the vertices
the search does not reach stay fixed as terminals and HyperFlowCutter runs in
the corridor between them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor

import numpy as np

from .baseline import baseline_partition
from .core import ParetoFront
from .disconnected import ComponentPareto, InfeasibleCombination, SplitOption, combine
from .executor import assemble, component_options, interleave
from .hypergraph import Bipartition, Hypergraph, as_fraction, connected_components

DEFAULT_REFINE_PAIRS = 5

# values tried when tuning; the defaults below were picked from these
ALPHA_GRID = {
    Fraction(3, 100): (0.4, 0.42, 0.46, 0.48),
    Fraction(0): (0.46, 0.475, 0.49, 0.498),
}


def default_alpha(epsilon) -> float:
    """0.46 for perfect balance, 0.4 otherwise."""
    return 0.46 if as_fraction(epsilon) == 0 else 0.4


@dataclass(frozen=True)
class RefineConfig:
    alpha: float | Fraction | None = None
    epsilon: Fraction | float | str = 0
    pair_count: int = DEFAULT_REFINE_PAIRS
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        if self.alpha is None:
            object.__setattr__(self, "alpha", default_alpha(self.epsilon))
        if not 0 < alpha_fraction(self.alpha) <= Fraction(1, 2):
            raise ValueError(f"alpha must be in (0, 0.5], got {self.alpha}")
        if self.pair_count < 1:
            raise ValueError("pair_count must be at least 1")


def alpha_fraction(alpha) -> Fraction:
    """Exact value of ``alpha``; floats are read as the nearest simple fraction
    so that ``1/3`` behaves like one third."""
    if isinstance(alpha, Fraction):
        return alpha
    if isinstance(alpha, str):
        return Fraction(alpha)
    return Fraction(repr(float(alpha))).limit_denominator(10**6)


class RefinementError(ValueError):
    """No eps-balanced bipartition was found for an unbalanced input."""


def _block_interior(h: Hypergraph, a: np.ndarray, block: int, quota: int) -> list[int]:
    """Vertices of ``block`` left unvisited by a BFS from its boundary that
    stops after ``|block| - quota`` vertices."""
    members = np.flatnonzero(a == block)
    budget = len(members) - quota
    if budget <= 0:
        return members.tolist()
    inside = a == block
    boundary = set()
    for e, pins in enumerate(h.pins):
        blocks = {int(a[v]) for v in pins}
        if len(blocks) == 2:
            boundary.update(v for v in pins if inside[v])
    visited = np.zeros(h.n, dtype=bool)
    order: list[int] = []
    layer = sorted(boundary)
    for v in layer:
        visited[v] = True
    while layer and len(order) < budget:
        take = layer[: budget - len(order)]
        order.extend(take)
        nxt = set()
        for u in layer:
            for e in h.incidence[u]:
                for v in h.pins[e]:
                    if inside[v] and not visited[v]:
                        nxt.add(v)
        layer = sorted(nxt)
        for v in layer:
            visited[v] = True
    reached = np.zeros(h.n, dtype=bool)
    reached[order] = True
    rest = [int(v) for v in members if not reached[v]]
    if not rest:
        # quota rounds to nothing: keep the deepest visited vertex
        rest = [order[-1]]
    return rest


def extract_terminals(h: Hypergraph, pi: Bipartition, cfg: RefineConfig) -> tuple[list[int], list[int]]:
    """``(S, T)``: the interiors of block 0 and block 1."""
    a = np.asarray(pi.assignment)
    if len(a) != h.n:
        raise ValueError("partition length does not match the hypergraph")
    if not (a == 0).any() or not (a == 1).any():
        raise ValueError("both blocks must be non-empty")
    quota = floor(alpha_fraction(cfg.alpha) * h.n)
    return _block_interior(h, a, 0, quota), _block_interior(h, a, 1, quota)


def _refine_connected(h: Hypergraph, pi: Bipartition, cfg: RefineConfig) -> Bipartition | None:
    s, t = extract_terminals(h, pi, cfg)
    incumbent = pi.cut_size if pi.is_balanced(cfg.epsilon) else None
    res = interleave(h, [(s, t)] * cfg.pair_count, cfg.epsilon, cfg.seed, incumbent=incumbent)
    return res.best


def rebahfc(h: Hypergraph, pi: Bipartition, cfg: RefineConfig | None = None) -> Bipartition:
    """Best eps-balanced bipartition from refining ``pi``; never worse than a balanced ``pi``."""
    cfg = cfg or RefineConfig()
    eps = cfg.epsilon
    pi = Bipartition.from_assignment(h, np.asarray(pi.assignment, dtype=np.int8), eps)
    if connected_components(h).count > 1:
        found = _refine_disconnected(h, pi, cfg)
    else:
        found = _refine_connected(h, pi, cfg)
    if pi.is_balanced(eps) and (found is None or found.cut_size >= pi.cut_size):
        return pi
    if found is None or not found.is_balanced(eps):
        raise RefinementError("balance repair failed within the fixed terminals")
    return found


def _refine_disconnected(h: Hypergraph, pi: Bipartition, cfg: RefineConfig) -> Bipartition:
    dec = connected_components(h)
    a = np.asarray(pi.assignment)
    members = [dec.vertices(c) for c in range(dec.count)]
    fronts = []
    subs = {}
    for c, verts in enumerate(members):
        size = len(verts)
        local = a[verts]
        if size < 2 or local.min() == local.max():
            # untouched by the cut
            fronts.append(ComponentPareto(c, size, []))
            continue
        sub, _ = h.subhypergraph(verts)
        subs[c] = sub
        local_pi = Bipartition.from_assignment(sub, local, 0)
        s, t = extract_terminals(sub, local_pi, cfg)
        res = interleave(sub, [(s, t)] * cfg.pair_count, 0, cfg.seed, prune=False)
        front = ParetoFront(sub.n)
        for fr in res.fronts:
            front.merge(fr)
        opts = component_options(sub, front)
        own = local if (local == 0).sum() <= (local == 1).sum() else 1 - local
        opts.append(SplitOption(int((own == 0).sum()), local_pi.cut_size, own.astype(np.int8)))
        fronts.append(ComponentPareto(c, size, opts))

    rng = np.random.default_rng(cfg.seed)
    try:
        comb = combine(fronts, h.n, cfg.epsilon, rng=rng)
    except InfeasibleCombination:
        # give every splittable component a perfectly balanced option
        for c, verts in enumerate(members):
            size = len(verts)
            fr = fronts[c]
            if size < 2 or any(o.smaller == size // 2 for o in fr.options):
                continue
            sub = subs[c] if c in subs else h.subhypergraph(verts)[0]
            base = baseline_partition(sub, 0, seed=cfg.seed)
            b = base.assignment if base.block_sizes[0] <= base.block_sizes[1] else 1 - base.assignment
            fronts[c] = ComponentPareto(c, size, fr.options + [
                SplitOption(min(base.block_sizes), base.cut_size, np.asarray(b, np.int8))])
        comb = combine(fronts, h.n, cfg.epsilon, rng=rng)
    return Bipartition.from_assignment(h, assemble(h.n, members, fronts, comb), cfg.epsilon)

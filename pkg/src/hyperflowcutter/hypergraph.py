"""Hypergraph storage, hMETIS I/O, connected components and partition metrics."""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _sparse_components

log = logging.getLogger(__name__)


class FormatError(ValueError):
    """Raised for malformed hypergraph or partition files."""


def as_fraction(epsilon) -> Fraction:
    """Exact rational for an imbalance value.

    Strings are parsed as decimal literals ("0.03" -> 3/100). Floats go through
    their shortest repr so that 0.03 maps to 3/100 and not to the binary
    approximation.
    """
    if isinstance(epsilon, Fraction):
        eps = epsilon
    elif isinstance(epsilon, int):
        eps = Fraction(epsilon)
    elif isinstance(epsilon, float):
        eps = Fraction(repr(epsilon))
    elif isinstance(epsilon, str):
        try:
            eps = Fraction(epsilon.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a decimal imbalance: {epsilon!r}") from exc
    else:
        raise TypeError(f"unsupported imbalance type {type(epsilon).__name__}")
    if not 0 <= eps < 1:
        raise ValueError(f"imbalance must lie in [0, 1), got {eps}")
    return eps


def max_block_size(n: int, epsilon) -> int:
    """Largest admissible block, ceil((1 + eps) * n / 2), in exact arithmetic."""
    eps = as_fraction(epsilon)
    return math.ceil((1 + eps) * n / 2)


class Hypergraph:
    """Immutable unweighted hypergraph.

    Hyperedges with fewer than two pins are dropped on construction; the number
    dropped is kept in ``dropped``. Pins are stored twice, as hyperedge -> pins
    and vertex -> incident hyperedges, both as tuples for fast traversal and as
    flat CSR arrays for vectorised metrics.
    """

    __slots__ = ("n", "pins", "incidence", "dropped", "_pin_ptr", "_pin_idx", "_sizes")

    def __init__(self, n: int, hyperedges: Iterable[Sequence[int]]):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        kept = []
        dropped = 0
        for i, edge in enumerate(hyperedges):
            edge = tuple(int(v) for v in edge)
            for v in edge:
                if not 0 <= v < n:
                    raise ValueError(f"hyperedge {i}: pin {v} out of range [0, {n})")
            if len(set(edge)) != len(edge):
                raise ValueError(f"hyperedge {i}: duplicate pin")
            if len(edge) < 2:
                dropped += 1
                continue
            kept.append(edge)

        incidence: list[list[int]] = [[] for _ in range(n)]
        for e, edge in enumerate(kept):
            for v in edge:
                incidence[v].append(e)

        self.n = n
        self.pins: tuple[tuple[int, ...], ...] = tuple(kept)
        self.incidence: tuple[tuple[int, ...], ...] = tuple(tuple(i) for i in incidence)
        self.dropped = dropped
        if dropped:
            log.warning("dropped %d hyperedges with fewer than two pins", dropped)

        self._sizes = np.fromiter((len(e) for e in kept), dtype=np.int64, count=len(kept))
        self._pin_ptr = np.zeros(len(kept) + 1, dtype=np.int64)
        np.cumsum(self._sizes, out=self._pin_ptr[1:])
        self._pin_idx = np.fromiter(
            (v for edge in kept for v in edge), dtype=np.int64, count=int(self._pin_ptr[-1])
        )

    @property
    def m(self) -> int:
        return len(self.pins)

    @property
    def p(self) -> int:
        return int(self._pin_ptr[-1])

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    @property
    def hyperedge_sizes(self) -> np.ndarray:
        return self._sizes

    def __repr__(self):
        return f"Hypergraph(n={self.n}, m={self.m}, p={self.p})"

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return self.n == other.n and self.pins == other.pins

    def __hash__(self):
        return hash((self.n, self.pins))

    def subhypergraph(self, vertices: Sequence[int]) -> tuple[Hypergraph, np.ndarray]:
        """Hypergraph induced by ``vertices`` (hyperedges fully inside only).

        Returns the sub-hypergraph and the array mapping local ids to global ids.
        Local ids follow the order of ``vertices``.
        """
        glob = np.asarray(vertices, dtype=np.int64)
        local = np.full(self.n, -1, dtype=np.int64)
        local[glob] = np.arange(len(glob))
        edges = set()
        for v in glob:
            edges.update(self.incidence[v])
        sub = []
        for e in sorted(edges):
            mapped = [local[v] for v in self.pins[e]]
            if min(mapped) >= 0:
                sub.append(mapped)
        return Hypergraph(len(glob), sub), glob


def load_hmetis(path: str | os.PathLike) -> Hypergraph:
    """Read an unweighted hMETIS ``.hgr`` file (header ``m n``, 1-indexed pins)."""
    with open(path) as f:
        lines = [ln for ln in (raw.strip() for raw in f) if ln and not ln.startswith("%")]
    if not lines:
        raise FormatError(f"{path}: empty file")
    header = lines[0].split()
    if len(header) != 2:
        if len(header) == 3 and header[2] != "0":
            raise FormatError(f"{path}: weighted hgr variants are not supported")
        if len(header) != 3:
            raise FormatError(f"{path}: header must be 'm n'")
    try:
        m, n = int(header[0]), int(header[1])
    except ValueError:
        raise FormatError(f"{path}: malformed header {lines[0]!r}") from None
    if m < 0 or n < 0:
        raise FormatError(f"{path}: negative counts in header")
    if len(lines) - 1 < m:
        raise FormatError(f"{path}: header announces {m} hyperedges, found {len(lines) - 1}")

    edges = []
    for i, ln in enumerate(lines[1 : m + 1]):
        try:
            pins = [int(tok) - 1 for tok in ln.split()]
        except ValueError:
            raise FormatError(f"{path}: hyperedge {i + 1}: non-integer pin") from None
        for v in pins:
            if not 0 <= v < n:
                raise FormatError(f"{path}: hyperedge {i + 1}: pin {v + 1} out of range 1..{n}")
        if len(set(pins)) != len(pins):
            raise FormatError(f"{path}: hyperedge {i + 1}: duplicate pin")
        edges.append(pins)
    return Hypergraph(n, edges)


def write_hmetis(h: Hypergraph, path: str | os.PathLike) -> None:
    with open(path, "w") as f:
        f.write(f"{h.m} {h.n}\n")
        for edge in h.pins:
            f.write(" ".join(str(v + 1) for v in edge) + "\n")


def read_partition(path: str | os.PathLike, n: int | None = None) -> np.ndarray:
    """Read a partition file with one ``0`` or ``1`` per line."""
    values = []
    with open(path) as f:
        for lineno, raw in enumerate(f, 1):
            tok = raw.strip()
            if not tok:
                continue
            if tok not in ("0", "1"):
                raise FormatError(f"{path}:{lineno}: block id must be 0 or 1, got {tok!r}")
            values.append(int(tok))
    if n is not None and len(values) != n:
        raise FormatError(f"{path}: expected {n} block ids, found {len(values)}")
    return np.asarray(values, dtype=np.int8)


def write_partition(assignment: Sequence[int], path: str | os.PathLike) -> None:
    with open(path, "w") as f:
        f.write("".join(f"{int(b)}\n" for b in assignment))


def cut_size(h: Hypergraph, assignment) -> int:
    """Number of hyperedges with pins in both blocks."""
    a = np.asarray(assignment)
    if a.shape != (h.n,):
        raise ValueError(f"assignment must have length {h.n}")
    if h.m == 0:
        return 0
    ones = np.add.reduceat(a[h._pin_idx].astype(np.int64), h._pin_ptr[:-1])
    return int(np.count_nonzero((ones > 0) & (ones < h._sizes)))


@dataclass(frozen=True)
class Bipartition:
    assignment: np.ndarray
    cut_size: int
    block_sizes: tuple[int, int]
    epsilon: Fraction = field(default=Fraction(0))

    @classmethod
    def from_assignment(cls, h: Hypergraph, assignment, epsilon=0) -> Bipartition:
        a = np.asarray(assignment, dtype=np.int8)
        if a.shape != (h.n,):
            raise ValueError(f"assignment must have length {h.n}")
        if a.size and (a.min() < 0 or a.max() > 1):
            raise ValueError("block ids must be 0 or 1")
        ones = int(a.sum())
        a.setflags(write=False)
        return cls(a, cut_size(h, a), (h.n - ones, ones), as_fraction(epsilon))

    @property
    def n(self) -> int:
        return len(self.assignment)

    def is_balanced(self, epsilon=None) -> bool:
        eps = self.epsilon if epsilon is None else epsilon
        return max(self.block_sizes) <= max_block_size(self.n, eps)

    @property
    def imbalance(self) -> float:
        """max block / (n / 2) - 1; 0 means perfectly balanced for even n."""
        if self.n == 0:
            return 0.0
        return max(self.block_sizes) / (self.n / 2) - 1

    def swapped(self) -> Bipartition:
        a = (1 - self.assignment).astype(np.int8)
        a.setflags(write=False)
        return Bipartition(a, self.cut_size, self.block_sizes[::-1], self.epsilon)


@dataclass(frozen=True)
class ComponentDecomposition:
    """Connected components, ids ordered by increasing size (ties by lowest vertex)."""

    component_of: np.ndarray
    component_sizes: np.ndarray

    @property
    def count(self) -> int:
        return len(self.component_sizes)

    def vertices(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.component_of == c)


def connected_components(h: Hypergraph) -> ComponentDecomposition:
    """Components of the star expansion (vertex nodes 0..n-1, hyperedge nodes after)."""
    n, m = h.n, h.m
    if n == 0:
        return ComponentDecomposition(np.zeros(0, np.int64), np.zeros(0, np.int64))
    rows = h._pin_idx
    cols = n + np.repeat(np.arange(m), h._sizes)
    star = csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n + m, n + m)
    )
    _, labels = _sparse_components(star, directed=False)
    raw = labels[:n]
    _, first, inverse, sizes = np.unique(raw, return_index=True, return_inverse=True, return_counts=True)
    order = np.lexsort((first, sizes))
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    return ComponentDecomposition(rank[inverse].astype(np.int64), sizes[order].astype(np.int64))


def is_connected(h: Hypergraph) -> bool:
    return connected_components(h).count <= 1

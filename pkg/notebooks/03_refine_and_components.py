# Refining an existing partition, and what happens with several components.

import random

import numpy as np

from hyperflowcutter import (
    Bipartition,
    ExecutorConfig,
    Hypergraph,
    RefineConfig,
    baseline_partition,
    connected_components,
    extract_terminals,
    partition,
    rebahfc,
)

rng = random.Random(11)
side = 20
edges = []
for i in range(side - 1):
    for j in range(side - 1):
        v = i * side + j
        edges.append((v, v + 1, v + side, v + side + 1))
h = Hypergraph(side * side, edges)

start = baseline_partition(h, "0.03", seed=2)
print("initial cut", start.cut_size, "blocks", start.block_sizes)

# The interiors of both blocks become fixed terminals; only a corridor around
# the cut stays free.
cfg = RefineConfig(epsilon="0.03")
s, t = extract_terminals(h, start, cfg)
corridor = np.full(h.n, ".")
corridor[s] = "S"
corridor[t] = "T"
print("\n".join("".join(row) for row in corridor.reshape(side, side)))

better = rebahfc(h, start, cfg)
print("refined cut", better.cut_size, "blocks", better.block_sizes)

# An unbalanced start gets repaired.
lopsided = np.zeros(h.n, dtype=np.int8)
lopsided[: side * 3] = 1
fixed = rebahfc(h, Bipartition.from_assignment(h, lopsided), RefineConfig(epsilon=0))
print("from 60/340:", fixed.block_sizes, "cut", fixed.cut_size)

# Disconnected input: a few paths of different length plus some single vertices.
edges, start_v = [], 0
for length in (2, 3, 7, 11, 16):
    edges += [(start_v + k, start_v + k + 1) for k in range(length - 1)]
    start_v += length
g = Hypergraph(start_v + 3, edges)
dec = connected_components(g)
print("component sizes", dec.component_sizes.tolist())
res = partition(g, ExecutorConfig.with_pairs(5))
print("status", res.status, "cut", res.bipartition.cut_size, "blocks", res.bipartition.block_sizes)
print("splits", res.combination.split_count, "gap filler", res.combination.gap_filler)

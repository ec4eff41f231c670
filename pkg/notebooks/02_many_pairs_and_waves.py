# Many terminal pairs: interleaving, early termination and waves.

import random
import time

import numpy as np

from hyperflowcutter import EnsemblePool, ExecutorConfig, Hypergraph, baseline_partition, interleave, run_waves
from hyperflowcutter.executor import ensemble_terminal_pairs, random_pairs

rng = random.Random(3)
n = 400
edges = []
for v in range(n - 1):
    edges.append((v, v + 1))
for _ in range(600):
    # mostly local hyperedges so there is a real structure to find
    u = rng.randrange(n)
    edges.append(tuple(sorted({u, min(n - 1, u + rng.randint(1, 6)), min(n - 1, u + rng.randint(1, 12))})))
h = Hypergraph(n, [e for e in edges if len(e) > 1])
print(h)

# Each pair gets its own cutter; the pair with the smallest current cut moves.
pairs = random_pairs(h.n, 10, np.random.default_rng(0))
t = time.perf_counter()
pruned = interleave(h, pairs, "0.03", seed=0)
print(f"interleaved: best cut {pruned.best_cut} in {time.perf_counter() - t:.2f}s")
for i, st in enumerate(pruned.states):
    print(f"  pair {i}: steps {st.steps:3d}  cut {st.cut:3d}  finished {st.balanced is not None}")

t = time.perf_counter()
full = interleave(h, pairs, "0.03", seed=0, prune=False)
print(f"without pruning: best cut {full.best_cut} in {time.perf_counter() - t:.2f}s")

# Ensemble pairs: vertices that agree across ten cheap partitions form classes,
# and the largest classes make good terminal sets.
pool = EnsemblePool.build(h, "0.03", 10, seed=0)
print("pool cuts", sorted(p.cut_size for p in pool.partitions))
print("largest classes", [len(c) for c in pool.classes[:6]])
ens = ensemble_terminal_pairs(h, pool, 3)
print("ensemble pair sizes", [(len(s), len(t)) for s, t in ens])

res = run_waves(h, ExecutorConfig(epsilon="0.03", seed=0), pool)
print("cut after each wave", res.wave_cuts)
print("baseline alone", baseline_partition(h, "0.03", 0).cut_size)

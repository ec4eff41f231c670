import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperflowcutter import (
    CutterState,
    EnsemblePool,
    ExecutorConfig,
    Hypergraph,
    NoSolutionError,
    baseline_partition,
    interleave,
    partition,
    run_core,
    run_waves,
)
from hyperflowcutter import executor
from hyperflowcutter.executor import (
    component_pair_budget,
    ensemble_terminal_pairs,
    pair_seed,
    plan_waves,
    random_pairs,
)
from hyperflowcutter.hypergraph import Bipartition

import oracles


def sequential_front(h, pair, eps, seed, index, max_steps=None):
    st_ = CutterState(h, pair[0], pair[1], eps, pair_seed(seed, index))
    st_.run(max_steps)
    return st_


def test_single_pair_equals_core(path6):
    res = interleave(path6, [([0], [5])], 0, seed=3)
    assert res.best.cut_size == 1
    assert res.fronts[0].items() == run_core(path6, [0], [5], 0, seed=pair_seed(3, 0)).items()


def test_early_termination():
    # a 10-cycle with the edge {8, 9} tripled
    edges = [(i, (i + 1) % 10) for i in range(10)] + [(8, 9), (8, 9)]
    h = Hypergraph(10, edges)
    res = interleave(h, [([0], [5]), ([8], [9])], 0)
    assert res.best_cut == 2 and res.best_pair == 0
    pruned = res.states[1]
    assert pruned.balanced is None and not pruned.finished
    assert pruned.cut == 4


def test_identical_pairs(path6):
    res = interleave(path6, [([0], [5])] * 4, 0)
    assert res.best_cut == 1


def test_empty_pairs(path6):
    with pytest.raises(ValueError):
        interleave(path6, [], 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31))
def test_scheduling_independence(seed):
    rng = random.Random(seed)
    h = oracles.random_connected_hypergraph(rng, rng.randint(4, 18), rng.randint(0, 10), 4)
    pairs = random_pairs(h.n, 5, np.random.default_rng(seed))
    res = interleave(h, pairs, 0, seed=seed, prune=False)
    for i, pair in enumerate(pairs):
        alone = sequential_front(h, pair, 0, seed, i)
        assert res.states[i].front.items() == alone.front.items()
        assert res.states[i].cut_history == alone.cut_history
    # with pruning every front is a prefix of the sequential run
    pruned = interleave(h, pairs, 0, seed=seed)
    for i, pair in enumerate(pairs):
        st_ = pruned.states[i]
        alone = sequential_front(h, pair, 0, seed, i, max_steps=st_.steps)
        assert st_.front.items() == alone.front.items()
    assert pruned.best_cut == res.best_cut


def test_random_pairs_distinct():
    pairs = random_pairs(2, 20, np.random.default_rng(0))
    assert all(s != t for (s,), (t,) in pairs)
    with pytest.raises(ValueError):
        random_pairs(1, 1, np.random.default_rng(0))


def pool_with_sizes(sizes):
    classes, start = [], 0
    for s in sizes:
        classes.append(np.arange(start, start + s))
        start += s
    return EnsemblePool([], classes)


def test_ensemble_pairs_rule():
    h = Hypergraph(100, [])
    pairs = ensemble_terminal_pairs(h, pool_with_sizes([40, 30, 20, 10]), 2)
    assert [(len(s), len(t)) for s, t in pairs] == [(40, 30), (20, 10)]
    assert len(ensemble_terminal_pairs(h, pool_with_sizes([40, 30, 20, 10]), 3)) == 2
    assert len(ensemble_terminal_pairs(h, pool_with_sizes([40, 30, 30]), 3)) == 1


def test_identical_pool(path6):
    b = Bipartition.from_assignment(path6, [0, 0, 0, 1, 1, 1])
    pool = EnsemblePool.from_partitions([b] * 10)
    assert [c.tolist() for c in pool.classes] == [[0, 1, 2], [3, 4, 5]]
    assert ensemble_terminal_pairs(path6, pool, 3) == [([0, 1, 2], [3, 4, 5])]


def test_single_class_falls_back(path6):
    pool = EnsemblePool([], [np.arange(6)])
    pairs = ensemble_terminal_pairs(path6, pool, 2, np.random.default_rng(1))
    assert len(pairs) == 2 and all(len(s) == len(t) == 1 for s, t in pairs)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_pool_classes(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 15))
    h = Hypergraph(n, [])
    parts = [Bipartition.from_assignment(h, rng.integers(0, 2, n)) for _ in range(int(rng.integers(1, 5)))]
    pool = EnsemblePool.from_partitions(parts)
    assert sorted(int(v) for c in pool.classes for v in c) == list(range(n))
    sizes = [len(c) for c in pool.classes]
    assert sizes == sorted(sizes, reverse=True)
    label = {int(v): i for i, c in enumerate(pool.classes) for v in c}
    for u in range(n):
        for v in range(n):
            same = all(p.assignment[u] == p.assignment[v] for p in parts)
            assert same == (label[u] == label[v])


def test_wave_plan():
    rng = random.Random(1)
    h = oracles.random_connected_hypergraph(rng, 40, 30, 4)
    cfg = ExecutorConfig()
    pool = EnsemblePool.build(h, 0, cfg.pool_size, 0)
    ens = ensemble_terminal_pairs(h, pool, 3)
    waves = plan_waves(h, cfg, np.random.default_rng(0), pool)
    assert [len(w) for w in waves] == [1, 5, 14, 80]
    assert waves[0] == ens[:1]
    assert waves[3][-len(ens) + 1:] == ens[1:]
    assert all(len(s) == len(t) == 1 for s, t in waves[1] + waves[2])


def test_config_defaults():
    cfg = ExecutorConfig()
    assert cfg.wave_sizes == (1, 5, 14, 80) and cfg.pair_count == 100
    assert cfg.ensemble_pairs == 3 and cfg.pool_size == 10
    with pytest.raises(ValueError):
        ExecutorConfig(wave_sizes=(1,), ensemble_pairs=2)
    one = ExecutorConfig.with_pairs(7)
    assert one.wave_sizes == (7,) and one.ensemble_pairs == 1


def test_run_waves_path(path6):
    res = run_waves(path6, ExecutorConfig(seed=2))
    assert res.bipartition.cut_size == 1 and res.waves_completed == 4
    again = run_waves(path6, ExecutorConfig(seed=2))
    assert again.bipartition.assignment.tolist() == res.bipartition.assignment.tolist()
    assert res.wave_cuts == sorted(res.wave_cuts, reverse=True)


def test_single_wave_is_first_ensemble_pair():
    rng = random.Random(5)
    h = oracles.random_connected_hypergraph(rng, 30, 20, 4)
    cfg = ExecutorConfig(wave_sizes=(1,), ensemble_pairs=1, seed=4)
    pool = EnsemblePool.build(h, 0, cfg.pool_size, cfg.seed)
    pair = ensemble_terminal_pairs(h, pool, 1)
    direct = interleave(h, pair, 0, cfg.seed)
    assert run_waves(h, cfg, pool).bipartition.cut_size == direct.best_cut


def test_time_limit_before_first_wave(path6):
    with pytest.raises(NoSolutionError):
        run_waves(path6, ExecutorConfig(time_limit=0.0), deadline=0.0)


def test_time_limit_mid_run(monkeypatch):
    rng = random.Random(8)
    h = oracles.random_connected_hypergraph(rng, 60, 50, 4)
    cfg = ExecutorConfig(seed=1)
    pool = EnsemblePool.build(h, 0, cfg.pool_size, cfg.seed)
    full = run_waves(h, cfg, pool)
    clock = {"t": 0}

    def fake():
        clock["t"] += 1
        return clock["t"]

    # expire after a handful of scheduler steps: somewhere past wave 1
    steps_w1 = interleave(h, plan_waves(h, cfg, np.random.default_rng([1, 7]), pool)[0], 0, 1).states[0].steps
    monkeypatch.setattr(executor.time, "monotonic", fake)
    res = run_waves(h, cfg, pool, deadline=steps_w1 + 5)
    assert res.timed_out and 1 <= res.waves_completed < 4
    assert res.bipartition.cut_size == res.wave_cuts[-1] >= full.bipartition.cut_size


def test_baseline_examples(path6):
    for seed in range(10):
        b = baseline_partition(path6, 0, seed)
        assert b.is_balanced(0) and b.cut_size == 1
    empty = baseline_partition(Hypergraph(7, []), 0, 1)
    assert empty.cut_size == 0 and empty.is_balanced(0)
    whole = baseline_partition(Hypergraph(5, [range(5)]), 0, 1)
    assert whole.cut_size == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([0, "0.03", "0.1"]))
def test_baseline_balanced(seed, eps):
    rng = random.Random(seed)
    h = oracles.random_hypergraph(rng, rng.randint(2, 30), rng.randint(0, 30), 5)
    b = baseline_partition(h, eps, seed)
    assert b.is_balanced(eps)


def test_pair_budget():
    assert component_pair_budget([10, 30, 60], 100) == [10, 30, 60]
    assert component_pair_budget([1, 1000], 10) == [1, 10]


def test_partition_two_components():
    h = Hypergraph(10, [(0, 1), (1, 2), (2, 3), (3, 4), (5, 6), (6, 7), (7, 8), (8, 9)])
    res = partition(h, ExecutorConfig())
    assert res.status == "zero-cut-preprocessing" and res.bipartition.cut_size == 0
    assert res.bipartition.block_sizes == (5, 5)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([0, "0.03"]))
def test_partition_disconnected_is_sound(seed, eps):
    rng = random.Random(seed)
    edges, start = [], 0
    for _ in range(rng.randint(2, 4)):
        size = rng.randint(1, 4)
        if size > 1:
            sub = oracles.random_connected_hypergraph(rng, size, rng.randint(0, 2), 3)
            edges += [[v + start for v in e] for e in sub.pins]
        start += size
    h = Hypergraph(start, edges)
    if h.n < 2:
        return
    res = partition(h, ExecutorConfig.with_pairs(5, seed=seed, epsilon=eps))
    assert res.bipartition.is_balanced(eps)
    assert res.bipartition.cut_size >= oracles.brute_force_cut(h, eps)

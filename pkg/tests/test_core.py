import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperflowcutter import CutterState, Hypergraph, ParetoFront, Side, cut_size, run_core
from hyperflowcutter.core import (
    FrontEntry,
    _Snapshot,
    balance_check,
    balanced_bipartition,
    find_piercing,
    is_isolated,
)

import oracles


def test_path_front(path6):
    front = run_core(path6, [0], [5])
    assert front.items() == [(1, 1), (2, 1), (3, 1)]
    a = front[3].assignment()
    assert a.tolist() == [0, 0, 0, 1, 1, 1]


def test_single_hyperedge():
    front = run_core(Hypergraph(2, [(0, 1)]), [0], [1])
    assert front.items() == [(1, 1)]


def test_short_path():
    front = run_core(Hypergraph(4, [(0, 1), (1, 2), (2, 3)]), [0], [3])
    assert (2, 1) in front.items()
    assert oracles.brute_force_cut(Hypergraph(4, [(0, 1), (1, 2), (2, 3)])) == 1


def test_disconnected_rejected():
    with pytest.raises(ValueError):
        run_core(Hypergraph(4, [(0, 1), (2, 3)]), [0], [3])


def test_bad_terminals(path6):
    with pytest.raises(ValueError):
        CutterState(path6, [0], [0])
    with pytest.raises(ValueError):
        CutterState(path6, [], [1])


def test_epsilon_stops_earlier():
    h = Hypergraph(10, [(i, i + 1) for i in range(9)])
    st0 = CutterState(h, [0], [9], 0)
    st0.run()
    st3 = CutterState(h, [0], [9], "0.2")
    st3.run()
    assert st3.steps <= st0.steps
    assert st0.balanced.smaller == 5
    assert st3.balanced.smaller >= 4


def test_isolated_vertices():
    h = Hypergraph(4, [(0, 1, 2), (2, 3)])
    st_ = CutterState(h, [0], [2])
    assert is_isolated(h, st_, 1)
    assert not is_isolated(h, st_, 3)
    with pytest.raises(ValueError):
        is_isolated(h, st_, 0)
    st2 = CutterState(Hypergraph(3, [(0, 1)]), [0], [1])
    assert is_isolated(st2.h, st2, 2)  # degree zero


def _state_with(n, a, iso):
    h = Hypergraph(n, [(i, i + 1) for i in range(n - 1)])
    state = CutterState(h, [0], [n - 1])
    return balance_check(state, Side.SOURCE, 0, _counts=(a, iso))


def test_balance_check_examples():
    assert _state_with(8, 3, 2) == 1
    assert _state_with(6, 3, 0) == 0
    assert _state_with(8, 1, 0) is None


def test_balanced_bipartition(path6):
    state = CutterState(path6, [0, 1, 2], [3, 4, 5])
    state.step()
    bip = balanced_bipartition(state, Side.SOURCE, 0)
    assert bip.cut_size == 1 and bip.block_sizes == (3, 3)


def test_front_dominance():
    front = ParetoFront(10)
    snap = _Snapshot(np.zeros(10, np.int8), np.zeros(0, np.int64), 0, Side.SOURCE)
    assert front.record(FrontEntry(2, 3, snap))
    assert not front.record(FrontEntry(2, 3, snap))
    assert front.record(FrontEntry(4, 2, snap))   # removes (2, 3)
    assert front.items() == [(4, 2)]
    assert not front.record(FrontEntry(3, 3, snap))  # beaten by a more balanced cheaper entry
    assert front.record(FrontEntry(5, 4, snap))
    assert front.items() == [(4, 2), (5, 4)]
    assert front.best(0).smaller == 5
    assert front.best("0.2").smaller == 4


def piercing_oracle(h, state, side):
    """Candidate classes in precedence order."""
    f = state.flow
    opp = f.reachable(side.other)
    terms = set(f.sources if side is Side.SOURCE else f.targets)
    other_terms = set(f.targets if side is Side.SOURCE else f.sources)
    classes = [[], [], [], []]  # edge avoiding, vertex avoiding, edge, vertex
    room = -(-h.n // 2) - len(terms)
    for e, pins in enumerate(h.pins):
        inside = [v for v in pins if v in terms]
        free = [v for v in pins if f.side_of[v] == 0]
        if not inside or len(inside) == len(pins):
            continue
        mixed = any(v in other_terms for v in pins)
        avoid = not any(opp[v] for v in free)
        if not mixed and free and len(free) <= room:
            classes[0 if avoid else 2].append(sorted(free))
        for v in free:
            if not state.isolated[v]:
                classes[1 if not opp[v] else 3].append([v])
    return classes


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_piercing_precedence(seed):
    rng = random.Random(seed)
    h = oracles.random_connected_hypergraph(rng, rng.randint(4, 14), rng.randint(0, 6), 4)
    s, t = rng.sample(range(h.n), 2)
    state = CutterState(h, [s], [t], seed=seed)
    for _ in range(rng.randint(1, 6)):
        if not state.step():
            break
        f = state.flow
        side = Side.SOURCE if f.source_reachable_count <= f.target_reachable_count else Side.TARGET
        # mirror the first half of a step: the reachable set joins the terminals
        probe = CutterState(h, f.sources, f.targets, seed=seed)
        probe.run(max_steps=1)
        probe._add(side, probe.flow.reachable_vertices(side))
        classes = piercing_oracle(h, probe, side)
        chosen = sorted(find_piercing(h, probe, side))
        first = next((c for c in classes if c), None)
        if first is None:
            continue
        assert chosen in [sorted(c) for c in first]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_front_is_monotone_and_consistent(seed):
    rng = random.Random(seed)
    h = oracles.random_connected_hypergraph(rng, rng.randint(3, 20), rng.randint(0, 10), 4)
    s, t = rng.sample(range(h.n), 2)
    front = run_core(h, [s], [t], 0, seed=seed)
    items = front.items()
    assert items and items[-1][0] == h.n // 2
    cuts = [c for _, c in items]
    assert cuts == sorted(cuts)
    for entry in front:
        a = entry.assignment()
        assert cut_size(h, a) == entry.cut
        assert min(int(a.sum()), h.n - int(a.sum())) == entry.smaller
        assert a[s] == 0 and a[t] == 1


def test_cut_history_non_decreasing():
    rng = random.Random(3)
    h = oracles.random_connected_hypergraph(rng, 30, 25, 4)
    state = CutterState(h, [0], [29], seed=1)
    state.run()
    assert state.cut_history == sorted(state.cut_history)
    assert state.balanced is not None

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperflowcutter import FlowState, Hypergraph, Side, augment_max_flow, extract_cut
from hyperflowcutter.maxflow import compute_reachable, residual_neighbors

import oracles


def solved(h, s, t):
    f = FlowState(h, s, t)
    augment_max_flow(h, f)
    return f


def test_residual_free_hyperedge():
    h = Hypergraph(3, [(0, 1, 2)])
    f = FlowState(h)
    assert sorted(v for _, v in residual_neighbors(h, f, 0)) == [1, 2]


def test_residual_with_flow():
    h = Hypergraph(3, [(0, 1, 2)])
    f = FlowState(h)
    f.flow_from[0], f.flow_to[0] = 0, 2
    assert list(residual_neighbors(h, f, 0)) == []
    assert [v for _, v in residual_neighbors(h, f, 1)] == [0]
    # the head of the flow can go anywhere, including backwards
    assert sorted(v for _, v in residual_neighbors(h, f, 2)) == [0, 1]


def test_single_hyperedge():
    h = Hypergraph(2, [(0, 1)])
    f = solved(h, [0], [1])
    assert f.flow_value == 1
    assert extract_cut(h, f, Side.SOURCE).cut_hyperedges == (0,)


def test_overlapping_hyperedges():
    h = Hypergraph(4, [(0, 1, 2), (1, 2, 3)])
    assert solved(h, [0], [3]).flow_value == 1
    assert oracles.lawler_max_flow(h, [0], [3]) == 1


def test_two_disjoint_paths(two_paths):
    f = solved(two_paths, [0], [4])
    assert f.flow_value == 2 == oracles.lawler_max_flow(two_paths, [0], [4])
    compute_reachable(two_paths, f, Side.SOURCE)
    compute_reachable(two_paths, f, Side.TARGET)
    assert f.reachable_vertices(Side.SOURCE) == [0]
    assert f.reachable_vertices(Side.TARGET) == [4]
    cut = extract_cut(two_paths, f, Side.SOURCE)
    assert sorted(cut.cut_hyperedges) == [0, 1] and cut.cut_size == 2


def test_parallel_hyperedges():
    h = Hypergraph(2, [(0, 1)] * 3)
    f = solved(h, [0], [1])
    assert f.flow_value == 3
    assert extract_cut(h, f, Side.TARGET).cut_size == 3


def test_zero_flow_reachability():
    h = Hypergraph(5, [(0, 1), (1, 2), (3, 4)])
    f = FlowState(h, [0], [4])
    compute_reachable(h, f, Side.SOURCE)
    assert f.reachable_vertices(Side.SOURCE) == [0, 1, 2]


def test_all_sources(path6):
    f = FlowState(path6, range(6), [])
    compute_reachable(path6, f, Side.SOURCE)
    assert f.reachable_count(Side.SOURCE) == 6


def test_terminal_errors(path6):
    with pytest.raises(ValueError):
        augment_max_flow(path6, FlowState(path6, [0], []))
    f = FlowState(path6, [0], [5])
    with pytest.raises(ValueError):
        f.add_terminals(Side.TARGET, [0])


def test_incremental_augmentation(path6):
    f = solved(path6, [0], [5])
    assert f.flow_value == 1
    f.add_terminals(Side.SOURCE, [1, 2, 3])
    f.add_terminals(Side.TARGET, [4])
    augment_max_flow(path6, f)
    assert f.flow_value == 1


def random_case(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 12)
    h = oracles.random_hypergraph(rng, n, rng.randint(1, 15), 5)
    verts = list(range(n))
    rng.shuffle(verts)
    k = rng.randint(1, n - 1)
    s = verts[: rng.randint(1, k)]
    t = verts[k : k + rng.randint(1, n - k)]
    return h, s, t


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**31))
def test_flow_matches_lawler_oracle(seed):
    h, s, t = random_case(seed)
    f = solved(h, s, t)
    assert f.flow_value == oracles.lawler_max_flow(h, s, t)
    for side, name in ((Side.SOURCE, "source"), (Side.TARGET, "target")):
        compute_reachable(h, f, side)
        expected = oracles.lawler_reachable(h, f.flow_from, f.flow_to, s, t, name)
        assert set(f.reachable_vertices(side)) == expected
        cut = extract_cut(h, f, side)
        assert cut.cut_size == f.flow_value
        assert oracles.disconnects(h, cut.cut_hyperedges, s, t)

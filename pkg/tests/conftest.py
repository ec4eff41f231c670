import pytest

from hyperflowcutter import Hypergraph


@pytest.fixture
def path6():
    return Hypergraph(6, [(i, i + 1) for i in range(5)])


@pytest.fixture
def two_paths():
    # two vertex-disjoint routes from 0 to 4
    return Hypergraph(5, [(0, 1), (0, 2), (1, 3), (2, 4), (3, 4)])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])

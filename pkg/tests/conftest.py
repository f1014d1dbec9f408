import os

import pytest
from hypothesis import HealthCheck, settings

from mcut.decomposition import TreeDecomposition
from mcut.graph import Graph

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def td_of(g: Graph, bags, tree_edges) -> TreeDecomposition:
    return TreeDecomposition(g.n, {i + 1: frozenset(b) for i, b in enumerate(bags)},
                             tuple(tree_edges))


@pytest.fixture
def path3():
    """s=1 - v=2 - t=3, unit capacities, pair (1, 3)."""
    g = Graph(3, [(1, 2, 1.0), (2, 3, 1.0)], [(1, 3)])
    return g, td_of(g, [{1, 2}, {2, 3}], [(1, 2)])


@pytest.fixture
def star3():
    """Center 4, leaves 1, 2, 3; all leaf pairs are terminal pairs."""
    g = Graph(4, [(1, 4, 1.0), (2, 4, 1.0), (3, 4, 1.0)], [(1, 2), (1, 3), (2, 3)])
    return g, td_of(g, [{1, 4}, {2, 4}, {3, 4}], [(1, 2), (1, 3)])


@pytest.fixture
def two_paths():
    """Two vertex-disjoint 1-4 paths through 2 and 3."""
    g = Graph(4, [(1, 2, 1.0), (2, 4, 1.0), (1, 3, 1.0), (3, 4, 1.0)], [(1, 4)])
    return g, td_of(g, [{1, 2, 4}, {1, 3, 4}], [(1, 2)])


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURES


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

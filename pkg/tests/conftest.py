"""Shared graph and strategy fixtures."""

import logging

import numpy as np
import pytest

from src.core.utils import _OWNED
from src.graph.lattice import build_triangular_lattice, graph_from_edges
from src.provers.strategies import honest_strategy


@pytest.fixture(autouse=True)
def release_log_handlers():
    """Close handlers installed by setup_logging once a test is done with them."""
    yield
    root = logging.getLogger()
    for handler in [h for h in root.handlers if getattr(h, _OWNED, False)]:
        root.removeHandler(handler)
        handler.close()


@pytest.fixture
def k3():
    """Triangle graph, the smallest graph with a triangle cover."""
    return build_triangular_lattice(1, 3)


@pytest.fixture
def lattice_2x3():
    """Six-vertex triangular lattice."""
    return build_triangular_lattice(2, 3)


@pytest.fixture
def two_triangles():
    """Two disjoint triangles."""
    return graph_from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


@pytest.fixture
def single_edge():
    """Two vertices joined by an edge (no triangle)."""
    return graph_from_edges(2, [(0, 1)])


@pytest.fixture
def honest_k3(k3):
    return honest_strategy(k3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

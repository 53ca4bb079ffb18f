"""
Pytest configuration and fixtures for shadowcount tests.
"""
import os
from pathlib import Path
from typing import Callable, Iterable, Tuple
from unittest.mock import patch

import networkx as nx
import numpy as np
import pytest

from shadowcount.graph_core import Graph, build_graph
from shadowcount.monitoring import metrics_collector


def graph_from_edges(n: int, edges: Iterable[Tuple[int, int]]) -> Graph:
    """Graph on exactly 0..n-1, keeping isolated vertices."""
    pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    low = np.minimum(pairs[:, 0], pairs[:, 1])
    high = np.maximum(pairs[:, 0], pairs[:, 1])
    return Graph.from_edge_keys(n, np.unique(low * n + high))


def gnp(n: int, p: float, seed: int) -> Graph:
    return graph_from_edges(n, nx.gnp_random_graph(n, p, seed=seed).edges())


def complete(n: int) -> Graph:
    return graph_from_edges(n, nx.complete_graph(n).edges())


@pytest.fixture(autouse=True)
def reset_metrics():
    """Start every test from zeroed global counters."""
    metrics_collector.reset()
    yield


@pytest.fixture
def triangle() -> Graph:
    return build_graph([(0, 1), (1, 2), (0, 2)])[0]


@pytest.fixture
def diamond() -> Graph:
    """K4 minus the edge (0, 3): two triangles sharing the edge (1, 2)."""
    return graph_from_edges(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])


@pytest.fixture
def c4() -> Graph:
    return graph_from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture
def k5() -> Graph:
    return complete(5)


@pytest.fixture
def gnp_factory() -> Callable[[int, float, int], Graph]:
    return gnp


@pytest.fixture
def write_edges(tmp_path: Path) -> Callable[[str, str], Path]:
    """Write edge-list text to a file under tmp_path."""
    def write(text: str, name: str = "graph.txt") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return write


@pytest.fixture
def clean_env():
    """Environment without any SHADOWCOUNT_* variables."""
    env = {k: v for k, v in os.environ.items() if not k.startswith("SHADOWCOUNT_")}
    with patch.dict(os.environ, env, clear=True):
        yield

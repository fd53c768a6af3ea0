import networkx as nx
import numpy as np
import pytest

from percis.graph import Graph, from_networkx, grid_graph, path_graph
from percis.instances import three_path


def er_digraph(n, p, seed):
    return from_networkx(nx.gnp_random_graph(n, p, seed=seed, directed=True))


def cycle(n, directed=False):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], directed)


def star(leaves, directed=False):
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)], directed)


@pytest.fixture
def t3():
    return three_path()


@pytest.fixture
def grid3():
    return grid_graph(3, 3)


@pytest.fixture
def small_instance():
    # 12-node digraph with several shortest-path multiplicities and UN states
    g = er_digraph(12, 0.3, seed=4)
    x = np.random.default_rng(11).random(12)
    return g, x

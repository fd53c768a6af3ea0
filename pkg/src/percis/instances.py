"""Small named instances with known centralities.

``three_path``
    Directed path a -> b -> c with states (1, 1/2, 0); p = (0, 1, 0).
``state_path``
    Directed path of ``n`` nodes with states decreasing linearly from 1 to 0.
``gap_instance``
    Directed path a -> b -> c with states (1, 0, 1/2) plus ``n - 3``
    zero-state nodes forming a strongly connected bidirected star whose
    centre has an edge to a.  Only b has positive centrality, and the only
    path contributing to it is a -> b -> c, so uniform pair sampling needs
    about n^2 samples to see it at all.
``ratio_instance``
    Undirected counterpart of ``gap_instance`` (same states, the star centre
    joined to a), where the uniform likelihood ratio of b grows linearly in n.
"""
from __future__ import annotations

import numpy as np

from .graph import Graph, path_graph


def three_path() -> tuple[Graph, np.ndarray]:
    return path_graph(3, directed=True), np.array([1.0, 0.5, 0.0])


def state_path(n: int = 100) -> tuple[Graph, np.ndarray]:
    return path_graph(n, directed=True), np.linspace(1.0, 0.0, n)


def _star_with_path(n: int, directed: bool) -> tuple[Graph, np.ndarray]:
    if n < 4:
        raise ValueError("needs n >= 4")
    a, b, c, hub = 0, 1, 2, 3
    edges = [(a, b), (b, c), (hub, a)]
    for h in range(hub + 1, n):
        edges.append((hub, h))
        if directed:
            edges.append((h, hub))
    x = np.zeros(n)
    x[a] = 1.0
    x[c] = 0.5
    return Graph.from_edges(n, edges, directed), x


def gap_instance(n: int) -> tuple[Graph, np.ndarray]:
    return _star_with_path(n, directed=True)


def ratio_instance(n: int) -> tuple[Graph, np.ndarray]:
    return _star_with_path(n, directed=False)


def gap_centrality(n: int) -> float:
    """Exact centrality of b in ``gap_instance(n)``: (1/2) / ((3/2)(n - 3) + 1/2)."""
    return 0.5 / (1.5 * (n - 3) + 0.5)

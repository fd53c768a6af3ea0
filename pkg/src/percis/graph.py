"""Unweighted graphs in compressed sparse row form.

Nodes are renumbered densely ``0..n-1`` at construction time; the original
identifiers are kept in :attr:`Graph.labels` so that output files can restore
them.  Both the forward (out-neighbour) and backward (in-neighbour) adjacency
are stored; for undirected graphs the two are the same arrays.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import TextIO

import numba
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

UNREACHABLE = -1


class EdgeListError(ValueError):
    """Raised when an edge list cannot be parsed or describes an empty graph."""


def _csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # src/dst must already be deduplicated; neighbours end up sorted ascending
    order = np.lexsort((dst, src))
    counts = np.bincount(src, minlength=n)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, dst[order].astype(np.int64)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable directed or undirected unweighted graph.

    Use :meth:`from_edges` or :func:`load_edge_list` rather than the
    constructor.  ``edge_count`` counts undirected edges once.
    """

    node_count: int
    edge_count: int
    directed: bool
    fwd_ptr: np.ndarray
    fwd_idx: np.ndarray
    bwd_ptr: np.ndarray
    bwd_idx: np.ndarray
    labels: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.node_count

    @property
    def m(self) -> int:
        return self.edge_count

    @classmethod
    def from_edges(cls, n: int, edges, directed: bool, labels=None) -> "Graph":
        """Build a graph on dense ids ``0..n-1`` from an ``(k, 2)`` edge array.

        Self-loops are dropped and duplicate edges collapsed.  For undirected
        graphs ``(u, v)`` and ``(v, u)`` denote the same edge.
        """
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        e = e[e[:, 0] != e[:, 1]]
        if not directed:
            e = np.sort(e, axis=1)
        e = np.unique(e, axis=0) if e.size else e.reshape(0, 2)
        m = len(e)
        if directed:
            src, dst = e[:, 0], e[:, 1]
        else:
            src = np.concatenate([e[:, 0], e[:, 1]])
            dst = np.concatenate([e[:, 1], e[:, 0]])
        fwd_ptr, fwd_idx = _csr(n, src, dst)
        if directed:
            bwd_ptr, bwd_idx = _csr(n, dst, src)
        else:
            bwd_ptr, bwd_idx = fwd_ptr, fwd_idx
        if labels is None:
            labels = np.arange(n, dtype=np.int64)
        labels = np.asarray(labels, dtype=np.int64)
        if len(labels) != n:
            raise ValueError("labels must have one entry per node")
        for a in (fwd_ptr, fwd_idx, bwd_ptr, bwd_idx, labels):
            a.setflags(write=False)
        return cls(n, m, bool(directed), fwd_ptr, fwd_idx, bwd_ptr, bwd_idx, labels)

    def out_neighbors(self, u: int) -> np.ndarray:
        return self.fwd_idx[self.fwd_ptr[u]:self.fwd_ptr[u + 1]]

    def in_neighbors(self, u: int) -> np.ndarray:
        return self.bwd_idx[self.bwd_ptr[u]:self.bwd_ptr[u + 1]]

    def out_degree(self) -> np.ndarray:
        return np.diff(self.fwd_ptr)

    def in_degree(self) -> np.ndarray:
        return np.diff(self.bwd_ptr)

    def edges(self) -> np.ndarray:
        """Dense-id edge array; undirected edges appear once as ``(min, max)``."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.fwd_ptr))
        e = np.column_stack([src, self.fwd_idx])
        if not self.directed:
            e = e[e[:, 0] < e[:, 1]]
        return e

    def index_of(self) -> dict[int, int]:
        """Map from original label to dense id."""
        return {int(lab): i for i, lab in enumerate(self.labels)}

    def to_scipy(self) -> csr_matrix:
        data = np.ones(len(self.fwd_idx), dtype=np.int8)
        return csr_matrix((data, self.fwd_idx, self.fwd_ptr), shape=(self.n, self.n))


def _open_text(source) -> tuple[TextIO, bool]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="ascii"), True
    return source, False


def load_edge_list(source, directed: bool) -> Graph:
    """Read a SNAP-style edge list.

    ``source`` is a path or an open text stream.  Each non-comment line holds
    two whitespace-separated integers; lines starting with ``#`` are skipped.
    Node identifiers are renumbered densely in ascending order of the original
    id.  A node that only appears in a self-loop is kept, with no edges.
    """
    fh, owned = _open_text(source)
    pairs: list[tuple[int, int]] = []
    try:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            tok = stripped.split()
            if len(tok) < 2:
                raise EdgeListError(f"line {lineno}: expected two node ids, got {stripped!r}")
            try:
                pairs.append((int(tok[0]), int(tok[1])))
            except ValueError:
                raise EdgeListError(f"line {lineno}: non-integer node id in {stripped!r}") from None
    finally:
        if owned:
            fh.close()
    if not pairs:
        raise EdgeListError("edge list contains no edges or nodes")
    raw = np.asarray(pairs, dtype=np.int64)
    labels, dense = np.unique(raw, return_inverse=True)
    return Graph.from_edges(len(labels), dense.reshape(-1, 2), directed, labels=labels)


def parse_edge_list(text: str, directed: bool) -> Graph:
    return load_edge_list(io.StringIO(text), directed)


def write_edge_list(g: Graph, dest) -> None:
    """Write the graph with original labels, one ``u v`` pair per line."""
    fh = open(dest, "w", encoding="ascii") if isinstance(dest, (str, os.PathLike)) else dest
    try:
        kind = "directed" if g.directed else "undirected"
        fh.write(f"# {kind} n={g.n} m={g.m}\n")
        for u, v in g.edges():
            fh.write(f"{g.labels[u]} {g.labels[v]}\n")
    finally:
        if fh is not dest:
            fh.close()


@numba.njit(cache=True, nogil=True)
def _bfs(ptr, idx, source, dist):
    # dist must be pre-filled with UNREACHABLE; returns the eccentricity
    n = len(ptr) - 1
    queue = np.empty(n, dtype=np.int64)
    head = 0
    tail = 1
    queue[0] = source
    dist[source] = 0
    ecc = 0
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u]
        for k in range(ptr[u], ptr[u + 1]):
            v = idx[k]
            if dist[v] < 0:
                dist[v] = du + 1
                ecc = du + 1
                queue[tail] = v
                tail += 1
    return ecc


def _hop_distances(g: Graph, source: int, direction: str = "forward") -> np.ndarray:
    if direction == "forward":
        ptr, idx = g.fwd_ptr, g.fwd_idx
    elif direction == "backward":
        ptr, idx = g.bwd_ptr, g.bwd_idx
    else:
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    if not 0 <= source < g.n:
        raise IndexError(f"source {source} out of range for n={g.n}")
    dist = np.full(g.n, UNREACHABLE, dtype=np.int64)
    _bfs(ptr, idx, source, dist)
    return dist


def bfs_distances(g: Graph, source: int, direction: str = "forward") -> np.ndarray:
    """Hop distances from ``source`` (forward) or to it (backward).

    Returns a float array with ``inf`` for unreachable nodes.
    """
    d = _hop_distances(g, source, direction).astype(np.float64)
    d[d < 0] = np.inf
    return d


def connected_components(g: Graph, mode: str = "weak") -> np.ndarray:
    """Component id per node, ids ordered by decreasing component size.

    Equal-sized components are ordered by their smallest node id.
    """
    if mode not in ("weak", "strong"):
        raise ValueError(f"mode must be 'weak' or 'strong', got {mode!r}")
    connection = "strong" if (mode == "strong" and g.directed) else "weak"
    _, raw = _cc(g.to_scipy(), directed=g.directed, connection=connection)
    sizes = np.bincount(raw)
    first = np.full(len(sizes), g.n, dtype=np.int64)
    np.minimum.at(first, raw, np.arange(g.n))
    order = np.lexsort((first, -sizes))
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    return relabel[raw]


def vertex_diameter_ub(g: Graph, override: int | None = None) -> int:
    """Upper bound on the number of internal nodes of any shortest path.

    Undirected graphs use one BFS per connected component from its smallest
    node id: ``2 * ecc - 1``.  Strongly connected digraphs use a forward and a
    backward BFS from node 0: ``ecc_fwd + ecc_bwd - 1``.  Any other digraph
    falls back to ``n - 2`` unless ``override`` is given.  The result is at
    least 1.
    """
    if override is not None:
        if override < 1:
            raise ValueError("vertex diameter override must be >= 1")
        return int(override)
    if g.n <= 2:
        return 1
    if not g.directed:
        comp = connected_components(g, "weak")
        pivots = np.full(comp.max() + 1, g.n, dtype=np.int64)
        np.minimum.at(pivots, comp, np.arange(g.n))
        best = 1
        for p in pivots:
            dist = np.full(g.n, UNREACHABLE, dtype=np.int64)
            ecc = _bfs(g.fwd_ptr, g.fwd_idx, p, dist)
            best = max(best, 2 * int(ecc) - 1)
        return best
    comp = connected_components(g, "strong")
    if comp.max() == 0:
        dist = np.full(g.n, UNREACHABLE, dtype=np.int64)
        ecc_f = _bfs(g.fwd_ptr, g.fwd_idx, 0, dist)
        dist[:] = UNREACHABLE
        ecc_b = _bfs(g.bwd_ptr, g.bwd_idx, 0, dist)
        return max(1, int(ecc_f + ecc_b) - 1)
    return max(1, g.n - 2)


def path_graph(n: int, directed: bool = True) -> Graph:
    e = np.column_stack([np.arange(n - 1), np.arange(1, n)])
    return Graph.from_edges(n, e, directed)


def grid_graph(rows: int, cols: int, directed: bool = False) -> Graph:
    """Grid with edges pointing right and down when ``directed``."""
    ids = np.arange(rows * cols).reshape(rows, cols)
    right = np.column_stack([ids[:, :-1].ravel(), ids[:, 1:].ravel()])
    down = np.column_stack([ids[:-1, :].ravel(), ids[1:, :].ravel()])
    return Graph.from_edges(rows * cols, np.vstack([right, down]), directed)


def from_networkx(nxg) -> Graph:
    """Convert a networkx graph whose nodes are integers."""
    nodes = np.array(sorted(nxg.nodes()), dtype=np.int64)
    pos = {int(v): i for i, v in enumerate(nodes)}
    edges = np.array([(pos[u], pos[v]) for u, v in nxg.edges()], dtype=np.int64).reshape(-1, 2)
    return Graph.from_edges(len(nodes), edges, nxg.is_directed(), labels=nodes)


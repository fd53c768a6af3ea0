"""Percolation states and the pair weights derived from them.

For states ``x`` the pair weight of an ordered pair ``(s, t)`` is the ramp
``R(x_s - x_t) = max(0, x_s - x_t)``.  Everything the estimators need reduces
to a handful of totals over these weights:

* ``C``: the sum over all ordered pairs,
* ``exclusion[v]``: the part of ``C`` from pairs that contain ``v``, which
  equals ``sum_u |x_v - x_u|``,
* ``denom[v] = C - exclusion[v]``: the normaliser of the centrality of ``v``,
* ``dv[v] = C / denom[v]``: the likelihood ratio between the two normalisers.

All of them are computed from the sorted states with prefix sums in O(n log n).
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .graph import Graph, _hop_distances, connected_components

SEED_COUNT = 50
PATH_LENGTH = 50

SETTINGS = ("rs", "rss", "ic", "un")


class UndefinedCentralityError(ValueError):
    """The centrality of some node has a zero normaliser."""

    def __init__(self, node: int, message: str | None = None):
        self.node = node
        super().__init__(message or f"centrality undefined for node {node}: "
                         "all other nodes share the same percolation state")


def _compensated_cumsum(a: np.ndarray) -> np.ndarray:
    # Neumaier summation; out[i] = sum(a[:i]), length len(a) + 1
    out = np.empty(len(a) + 1)
    out[0] = 0.0
    s = 0.0
    comp = 0.0
    for i, v in enumerate(a.tolist()):
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
        out[i + 1] = s + comp
    return out


def ramp(x):
    return np.maximum(x, 0.0)


@dataclass(frozen=True, eq=False)
class PercolationStates:
    raw: np.ndarray
    sorted: np.ndarray
    perm: np.ndarray
    rank: np.ndarray
    C: float
    exclusion: np.ndarray
    denom: np.ndarray
    dv: np.ndarray
    dhat: float

    @property
    def n(self) -> int:
        return len(self.raw)

    @property
    def delta(self) -> float:
        return compute_delta(self)


def build_states(raw, n: int | None = None) -> PercolationStates:
    """Validate states and derive ``C``, ``exclusion``, ``denom`` and ``dv``.

    Raises
    ------
    ValueError
        If a state lies outside ``[0, 1]`` or the length does not match ``n``.
    UndefinedCentralityError
        If ``C == 0`` or some node's normaliser ``C - exclusion[v]`` is not
        positive.
    """
    x = np.array(raw, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("states must be a 1-d sequence")
    if n is not None and len(x) != n:
        raise ValueError(f"expected {n} states, got {len(x)}")
    if len(x) < 2:
        raise ValueError("at least two nodes are required")
    bad = np.flatnonzero(~((x >= 0.0) & (x <= 1.0)))
    if bad.size:
        raise ValueError(f"state of node {bad[0]} is {x[bad[0]]}, outside [0, 1]")
    size = len(x)
    # stable sort on -x keeps ties in dense-id order
    perm = np.argsort(-x, kind="stable")
    xs = x[perm]
    rank = np.empty(size, dtype=np.int64)
    rank[perm] = np.arange(size)

    prefix = _compensated_cumsum(xs)
    total = prefix[-1]
    i = np.arange(size)
    # sorted position i: larger states before, smaller states after
    above = prefix[:-1] - i * xs
    below = (size - i - 1) * xs - (total - prefix[1:])
    # ties with an extreme contribute exactly nothing; drop the rounding residue
    above[xs == xs[0]] = 0.0
    below[xs == xs[-1]] = 0.0
    excl_sorted = np.maximum(above, 0.0) + np.maximum(below, 0.0)
    C = math.fsum(np.maximum(below, 0.0))
    if not C > 0.0:
        raise UndefinedCentralityError(int(perm[0]), "all percolation states are equal; "
                                       "the total pair weight is 0")
    exclusion = np.empty(size)
    exclusion[perm] = excl_sorted
    denom = C - exclusion
    # tolerance relative to C: denom is a difference of O(n^2)-term totals
    nonpos = np.flatnonzero(denom <= C * 1e-12)
    if nonpos.size:
        raise UndefinedCentralityError(int(nonpos[0]))
    dv = C / denom
    for a in (x, xs, perm, rank, exclusion, denom, dv):
        a.setflags(write=False)
    return PercolationStates(x, xs, perm, rank, float(C), exclusion, denom, dv, float(dv.max()))


def kappa_tilde(ps: PercolationStates, s: int, t: int) -> float:
    """Pair weight normalised by the total ``C`` (no excluded node)."""
    return max(ps.raw[s] - ps.raw[t], 0.0) / ps.C


def kappa(ps: PercolationStates, s: int, t: int, v: int) -> float:
    """Pair weight of ``(s, t)`` normalised by the total that excludes ``v``."""
    if s == v or t == v:
        raise ValueError("kappa requires s != v != t")
    return max(ps.raw[s] - ps.raw[t], 0.0) / ps.denom[v]


def compute_delta(ps: PercolationStates) -> float:
    """Smallest, over nodes ``v``, spread of the states of the other nodes."""
    xs = ps.sorted
    if len(xs) < 3:
        raise ValueError("delta needs at least three nodes")
    # dropping position 0 or n-1 changes one extreme; anything else leaves both
    return float(min(xs[1] - xs[-1], xs[0] - xs[-2], xs[0] - xs[-1]))


def gen_states(g: Graph, setting: str, seed=None) -> tuple[Graph, np.ndarray]:
    """Generate percolation states for one of the experimental settings.

    ``rs``
        50 uniformly chosen nodes get state 1, all others 0.
    ``rss``
        ``ceil(log2 n)`` random seeds; every node gets ``4 ** -d`` where ``d``
        is its forward hop distance from the nearest seed (0 if unreachable).
    ``ic``
        A 50-node path is appended to the graph.  Its first 25 nodes get
        state 1, everything else 0.  For digraphs the path is directed and an
        edge joins a random node of the largest weakly connected component to
        the head of the path; for undirected graphs the path is isolated.
    ``un``
        Independent uniform states on ``[0, 1]``.

    Only ``ic`` returns a graph different from ``g``.
    """
    rng = np.random.default_rng(seed)
    setting = setting.lower()
    n = g.n
    if setting == "rs":
        if n < SEED_COUNT:
            raise ValueError(f"rs setting needs at least {SEED_COUNT} nodes, graph has {n}")
        x = np.zeros(n)
        x[rng.choice(n, size=SEED_COUNT, replace=False)] = 1.0
        return g, x
    if setting == "rss":
        k = min(n, max(1, math.ceil(math.log2(n))))
        seeds = rng.choice(n, size=k, replace=False)
        best = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
        for s in seeds:
            d = _hop_distances(g, int(s), "forward")
            reach = d >= 0
            best[reach] = np.minimum(best[reach], d[reach])
        x = np.zeros(n)
        reached = best < np.iinfo(np.int64).max
        x[reached] = 0.25 ** best[reached].astype(np.float64)
        return g, x
    if setting == "ic":
        head = n
        path = np.column_stack([np.arange(head, head + PATH_LENGTH - 1),
                                np.arange(head + 1, head + PATH_LENGTH)])
        edges = [g.edges(), path]
        if g.directed:
            comp = connected_components(g, "weak")
            members = np.flatnonzero(comp == 0)
            edges.append(np.array([[int(rng.choice(members)), head]]))
        top = int(g.labels.max()) + 1 if n else 0
        labels = np.concatenate([g.labels, np.arange(top, top + PATH_LENGTH)])
        g2 = Graph.from_edges(n + PATH_LENGTH, np.vstack(edges), g.directed, labels=labels)
        x = np.zeros(n + PATH_LENGTH)
        x[head:head + PATH_LENGTH // 2] = 1.0
        return g2, x
    if setting == "un":
        return g, rng.random(n)
    raise ValueError(f"unknown setting {setting!r}; expected one of {SETTINGS}")


def read_states(source, g: Graph) -> np.ndarray:
    """Read ``node_id value`` lines keyed by original labels.

    Every node of ``g`` must appear exactly once.
    """
    index = g.index_of()
    x = np.full(g.n, np.nan)
    fh = open(source, "r", encoding="ascii") if isinstance(source, (str, os.PathLike)) else source
    try:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            tok = stripped.split()
            if len(tok) < 2:
                raise ValueError(f"line {lineno}: expected 'node_id value'")
            try:
                label, value = int(tok[0]), float(tok[1])
            except ValueError:
                raise ValueError(f"line {lineno}: cannot parse {stripped!r}") from None
            if label not in index:
                raise ValueError(f"line {lineno}: node {label} is not in the graph")
            if not np.isnan(x[index[label]]):
                raise ValueError(f"line {lineno}: duplicate state for node {label}")
            x[index[label]] = value
    finally:
        if fh is not source:
            fh.close()
    missing = np.flatnonzero(np.isnan(x))
    if missing.size:
        raise ValueError(f"no state given for node {g.labels[missing[0]]}")
    return x


def write_states(dest, g: Graph, x) -> None:
    fh = open(dest, "w", encoding="ascii") if isinstance(dest, (str, os.PathLike)) else dest
    try:
        for label, value in zip(g.labels, np.asarray(x, dtype=np.float64)):
            fh.write(f"{label} {float(value)!r}\n")
    finally:
        if fh is not dest:
            fh.close()

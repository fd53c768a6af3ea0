"""Centrality estimates from sample batches, and exact references.

The importance estimator weights each internal occurrence of ``v`` by
``kappa(s, t, v) / kappa_tilde(s, t)``.  Both share the numerator
``R(x_s - x_t)``, so the ratio is ``C / denom[v] = dv[v]`` for every sampled
pair and the estimate is simply ``dv[v] * (occurrences of v) / ell``.
"""
from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .graph import Graph
from .sampling import SampleBatch, SampleSummary
from .states import PercolationStates, UndefinedCentralityError

BRUTE_FORCE_MAX_N = 14


@dataclass(frozen=True, eq=False)
class CentralityScores:
    values: np.ndarray
    kind: str = "percolation"
    provenance: str = "exact"
    sample_count: int = 0
    sample_time: float = 0.0
    bfs_time: float = 0.0

    def __len__(self) -> int:
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def estimate_importance(batch: SampleBatch | SampleSummary, ps: PercolationStates) -> CentralityScores:
    if batch.distribution != "importance":
        raise ValueError(f"expected an importance batch, got {batch.distribution!r}")
    ell = len(batch)
    values = ps.dv * batch.node_counts() / ell
    return CentralityScores(values, "percolation", "importance-estimate", ell,
                            batch.sample_time, batch.bfs_time)


def estimate_uniform(batch: SampleBatch | SampleSummary, ps: PercolationStates, rescale: bool = True) -> CentralityScores:
    """Weighted fraction of sampled paths through each node.

    With ``rescale`` the result is multiplied by ``n(n-1)`` so that it
    estimates the percolation centrality instead of the doubly normalised
    score.
    """
    if batch.distribution != "uniform":
        raise ValueError(f"expected a uniform batch, got {batch.distribution!r}")
    ell = len(batch)
    n = ps.n
    values = batch.weighted_counts(ps.raw) / ps.denom / ell
    if rescale:
        values = values * (n * (n - 1.0))
    kind = "percolation" if rescale else "doubly-normalized-percolation"
    return CentralityScores(values, kind, "uniform-estimate", ell, batch.sample_time, batch.bfs_time)


@numba.njit(cache=True, nogil=True)
def _accumulate(fp, fi, bp, bi, x, use_states, sources, out):
    """Brandes dependency accumulation with target weight R(x_s - x_t)."""
    n = len(fp) - 1
    dist = np.full(n, -1, dtype=np.int64)
    sigma = np.zeros(n)
    delta = np.zeros(n)
    order = np.empty(n, dtype=np.int64)
    for s in sources:
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head = 0
        tail = 1
        while head < tail:
            u = order[head]
            head += 1
            for k in range(fp[u], fp[u + 1]):
                v = fi[k]
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    order[tail] = v
                    tail += 1
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
        xs = x[s]
        for j in range(tail - 1, 0, -1):
            w = order[j]
            if use_states:
                r = xs - x[w]
                target = r if r > 0.0 else 0.0
            else:
                target = 1.0
            coeff = (target + delta[w]) / sigma[w]
            dw = dist[w] - 1
            for k in range(bp[w], bp[w + 1]):
                u = bi[k]
                if dist[u] == dw:
                    delta[u] += sigma[u] * coeff
            out[w] += delta[w]
        for j in range(tail):
            w = order[j]
            dist[w] = -1
            sigma[w] = 0.0
            delta[w] = 0.0


def _dependency_sums(g: Graph, x, use_states: bool, workers: int = 1, block: int = 256) -> np.ndarray:
    blocks = [np.arange(lo, min(lo + block, g.n), dtype=np.int64) for lo in range(0, g.n, block)]
    x = np.ascontiguousarray(x, dtype=np.float64)

    def run(src):
        out = np.zeros(g.n)
        _accumulate(g.fwd_ptr, g.fwd_idx, g.bwd_ptr, g.bwd_idx, x, use_states, src, out)
        return out

    if workers <= 1:
        parts = [run(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, blocks))
    total = np.zeros(g.n)
    for p in parts:
        total += p
    return total


def exact_percolation(g: Graph, ps: PercolationStates, workers: int = 1) -> CentralityScores:
    """Exact percolation centrality with one weighted Brandes pass.

    The normaliser of the centrality of ``v`` depends only on ``v``, so the
    pass accumulates ``sum_{s,t} R(x_s - x_t) sigma_st(v) / sigma_st`` and
    divides by ``denom[v]`` at the end.
    """
    if ps.n != g.n:
        raise ValueError("states and graph disagree on the number of nodes")
    raw = _dependency_sums(g, ps.raw, True, workers)
    return CentralityScores(raw / ps.denom, "percolation", "exact", 0)


def exact_betweenness(g: Graph, workers: int = 1) -> CentralityScores:
    """Unnormalised betweenness, ``sum_{s != v != t} sigma_st(v) / sigma_st``."""
    raw = _dependency_sums(g, np.zeros(g.n), False, workers)
    return CentralityScores(raw, "betweenness", "exact", 0)


def _all_shortest_paths(g: Graph, s: int):
    """Map t -> list of shortest s-t paths (as node lists), by explicit enumeration."""
    dist = {s: 0}
    preds: dict[int, list[int]] = {s: []}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in g.out_neighbors(u).tolist():
            if v not in dist:
                dist[v] = dist[u] + 1
                preds[v] = [u]
                queue.append(v)
            elif dist[v] == dist[u] + 1:
                preds[v].append(u)
    paths: dict[int, list[list[int]]] = {s: [[s]]}
    for v in sorted(dist, key=dist.get):
        if v != s:
            paths[v] = [p + [v] for u in preds[v] for p in paths[u]]
    return paths


def _pair_denominators(x: np.ndarray) -> np.ndarray:
    n = len(x)
    out = np.zeros(n)
    for v in range(n):
        tot = 0.0
        for u in range(n):
            for w in range(n):
                if u != v and w != v:
                    tot += max(x[u] - x[w], 0.0)
        out[v] = tot
    return out


def brute_force_percolation(g: Graph, ps_or_states) -> CentralityScores:
    """Percolation centrality by enumerating every shortest path.

    Independent of the Brandes pass and of the prefix-sum normalisers: each
    normaliser is summed pair by pair.  Only for ``n <= 14``.
    """
    if g.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force is limited to n <= {BRUTE_FORCE_MAX_N}, got n={g.n}")
    x = np.asarray(getattr(ps_or_states, "raw", ps_or_states), dtype=np.float64)
    den = _pair_denominators(x)
    p = np.zeros(g.n)
    for s in range(g.n):
        for t, plist in _all_shortest_paths(g, s).items():
            if t == s:
                continue
            wst = max(x[s] - x[t], 0.0)
            if wst == 0.0:
                continue
            for path in plist:
                for v in path[1:-1]:
                    if den[v] <= 0:
                        raise UndefinedCentralityError(v)
                    p[v] += wst / den[v] / len(plist)
    return CentralityScores(p, "percolation", "brute-force", 0)


def brute_force_moments(g: Graph, ps: PercolationStates) -> dict:
    """Exact quantities of the importance distribution, by path enumeration.

    Returns ``rho`` (expected internal-node count of one sample),
    ``inside`` (per-node probability of being internal to one sample) and
    ``variance`` (per-node variance of one sample's contribution
    ``dv[v] * 1[v internal]``).
    """
    if g.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force is limited to n <= {BRUTE_FORCE_MAX_N}, got n={g.n}")
    x = ps.raw
    C = sum(max(x[u] - x[w], 0.0) for u in range(g.n) for w in range(g.n))
    inside = np.zeros(g.n)
    rho = 0.0
    for s in range(g.n):
        for t, plist in _all_shortest_paths(g, s).items():
            if t == s:
                continue
            q = max(x[s] - x[t], 0.0) / C
            if q == 0.0:
                continue
            rho += q * (len(plist[0]) - 2)
            for path in plist:
                for v in path[1:-1]:
                    inside[v] += q / len(plist)
    dv = np.asarray(ps.dv)
    mean = dv * inside
    variance = dv * dv * inside - mean * mean
    return {"rho": rho, "inside": inside, "variance": variance, "mean": mean}

"""Error metrics, top-k agreement, and the incremental target-error search."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .estimators import CentralityScores, estimate_importance, estimate_uniform, exact_percolation
from .graph import Graph
from .sampling import SampleSummary, build_importance_index, summarize
from .states import PercolationStates

DEFAULT_STEP = 1000
DEFAULT_CAP = 10**7


def _pair(est, exact) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(getattr(est, "values", est), dtype=np.float64)
    b = np.asarray(getattr(exact, "values", exact), dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"score vectors differ in length: {a.shape} vs {b.shape}")
    return a, b


def max_error(est, exact) -> float:
    a, b = _pair(est, exact)
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def avg_error(est, exact) -> float:
    a, b = _pair(est, exact)
    return float(np.mean(np.abs(a - b))) if a.size else 0.0


def topk(scores, k: int) -> np.ndarray:
    """Indices of the ``k`` largest scores; ties go to the smaller index."""
    v = np.asarray(getattr(scores, "values", scores), dtype=np.float64)
    if k <= 0:
        raise ValueError("k must be positive")
    if k > len(v):
        raise ValueError(f"k={k} exceeds the number of nodes ({len(v)})")
    order = np.lexsort((np.arange(len(v)), -v))
    return order[:k]


def jaccard_topk(a, b, k: int) -> float:
    sa = set(topk(a, k).tolist())
    sb = set(topk(b, k).tolist())
    return len(sa & sb) / len(sa | sb)


@dataclass
class SearchResult:
    ell: int
    converged: bool
    max_error: float
    avg_error: float
    wall_time: float
    sample_time: float
    bfs_time: float


def target_error_search(g: Graph, ps: PercolationStates, epsilon: float, dist: str = "importance",
                        step: int = DEFAULT_STEP, cap: int = DEFAULT_CAP, seed: int = 0,
                        workers: int = 1, exact: CentralityScores | None = None) -> SearchResult:
    """Grow the sample by ``step`` until the max error drops to ``epsilon``.

    Samples accumulate: the estimate at ``k * step`` reuses the first
    ``(k - 1) * step`` samples.  Stops at the first tested size with
    ``ME <= epsilon`` or once ``cap`` samples have been tested, in which case
    ``converged`` is False and ``ell == cap``.
    """
    if step <= 0 or cap < step:
        raise ValueError("need 0 < step <= cap")
    if dist not in ("importance", "uniform"):
        raise ValueError(f"unknown distribution {dist!r}")
    if exact is None:
        exact = exact_percolation(g, ps, workers)
    t0 = time.perf_counter()
    index = build_importance_index(ps) if dist == "importance" else None
    acc = SampleSummary(g.n, dist)
    ell = 0
    while True:
        size = min(step, cap - ell)
        summarize(g, ps, size, dist, seed=seed, workers=workers, start=ell, index=index, into=acc)
        ell += size
        est = estimate_importance(acc, ps) if dist == "importance" else estimate_uniform(acc, ps)
        me = max_error(est, exact)
        if me <= epsilon or ell >= cap:
            return SearchResult(ell, me <= epsilon, me, avg_error(est, exact),
                                time.perf_counter() - t0, acc.sample_time, acc.bfs_time)

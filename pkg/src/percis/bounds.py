"""Sample sizes for an epsilon-approximation, and the two-phase driver.

The final sample size is the supremum over ``x in (0, x_hat]`` of

    dhat^2 ln(mult * dhat * rho_hat / (x delta)) / (g(x) h(eps dhat / g(x)))

with ``g(x) = x (dhat - x)`` and ``h(y) = (1 + y) ln(1 + y) - y``.  The
first sampling phase supplies ``rho_hat`` (an empirical Bernstein upper bound
on the expected number of internal nodes of a sample) and ``v_hat`` (an upper
bound on the largest per-node variance), from which ``x_hat`` is the smaller
root of ``g(x) = v_hat``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .estimators import CentralityScores, estimate_importance, estimate_uniform
from .graph import Graph, vertex_diameter_ub
from .sampling import SampleBatch, build_importance_index, draw_batch, summarize
from .states import PercolationStates

GRID_POINTS = 1000
GRID_SPAN = 1e-9
DEFAULT_MAX_SAMPLES = 10**8
MIN_ELL1 = 1000


class SampleCapExceeded(RuntimeError):
    """The bound asks for more samples than allowed."""

    def __init__(self, ell: int, cap: int):
        self.ell = ell
        self.cap = cap
        super().__init__(f"required sample size {ell} exceeds the cap of {cap}; "
                         "at this accuracy an exact computation is likely cheaper")


@dataclass
class BoundParams:
    dhat: float
    rho_hat: float
    v_hat: float
    x_hat: float
    epsilon: float
    delta: float
    ell1: int
    ell: int
    D: int
    rho_tilde: float
    lambda_: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lambda_")
        return d


def fn_g(x, dhat):
    return x * (dhat - x)


def fn_h(x):
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("h is defined for x >= 0")
    out = (1.0 + x) * np.log1p(x) - x
    return out.item() if out.ndim == 0 else out


def _counts(batch_or_counts) -> np.ndarray:
    if isinstance(batch_or_counts, SampleBatch):
        return batch_or_counts.internal_counts.astype(np.float64)
    return np.asarray(batch_or_counts, dtype=np.float64)


def rho_hat(batch_or_counts, D: int, delta: float) -> tuple[float, float, float]:
    """Empirical Bernstein upper bound on the mean internal-node count.

    Returns ``(rho_tilde, lambda, rho_hat)`` where ``lambda`` is the unbiased
    sample variance of the counts.
    """
    c = _counts(batch_or_counts)
    ell = len(c)
    if ell < 2:
        raise ValueError("rho_hat needs at least two samples")
    if c.size and c.max() > D:
        raise ValueError(f"sample with {int(c.max())} internal nodes exceeds D={D}")
    mean = float(c.mean())
    lam = float(c.var(ddof=1))
    log_term = math.log(2.0 / delta)
    bound = mean + math.sqrt(2.0 * lam * log_term / ell) + 7.0 * D * log_term / (3.0 * (ell - 1))
    return mean, lam, bound


def v_hat(scores, dhat: float, ell1: int, delta: float) -> float:
    """Upper bound on the largest single-sample variance from first-phase estimates."""
    p = np.asarray(getattr(scores, "values", scores), dtype=np.float64)
    log_term = math.log(1.0 / delta)
    inner = p + np.sqrt(2.0 * p * log_term / ell1) + log_term / (3.0 * ell1)
    return float(dhat * dhat * inner.max())


def x_hat(dhat: float, v_hat: float) -> float:
    if not (dhat > 0 and v_hat > 0):
        raise ValueError("x_hat needs dhat > 0 and v_hat > 0")
    quarter = dhat * dhat / 4.0
    return dhat / 2.0 - math.sqrt(quarter - min(quarter, v_hat))


def _size_expr(x, dhat, rho_hat, epsilon, delta, log_multiplier):
    gx = fn_g(x, dhat)
    return dhat * dhat * np.log(log_multiplier * dhat * rho_hat / (x * delta)) / (gx * fn_h(epsilon * dhat / gx))


def sample_size_theorem1(dhat: float, rho_hat: float, x_hat: float, epsilon: float,
                         delta: float, log_multiplier: float = 2, grid: int = GRID_POINTS) -> int:
    """Sample size guaranteeing an epsilon-approximation with prob. 1 - delta.

    The supremum is taken over a log-spaced grid on
    ``[x_hat * 1e-9, x_hat]`` and then refined locally around the best grid
    point, so the result never falls below the grid maximum.
    """
    if not 0 < x_hat <= dhat / 2 * (1 + 1e-12):
        raise ValueError(f"x_hat={x_hat} must lie in (0, dhat/2]")
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise ValueError("epsilon and delta must lie in (0, 1)")
    xs = np.geomspace(x_hat * GRID_SPAN, x_hat, grid)
    with np.errstate(all="ignore"):
        vals = _size_expr(xs, dhat, rho_hat, epsilon, delta, log_multiplier)
    if not np.all(np.isfinite(vals)):
        raise ValueError("sample size expression is not finite on the grid; check the parameters")
    k = int(np.argmax(vals))
    best = float(vals[k])
    lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, grid - 1)]
    if hi > lo:
        res = minimize_scalar(lambda x: -_size_expr(x, dhat, rho_hat, epsilon, delta, log_multiplier),
                              bounds=(lo, hi), method="bounded", options={"xatol": lo * 1e-9})
        if res.success and np.isfinite(res.fun):
            best = max(best, -float(res.fun))
    return max(1, math.ceil(best))


def sample_size_di(D: int, dhat: float, epsilon: float, delta: float) -> int:
    """Data-independent variant: ``rho_hat = D`` and the largest possible variance."""
    return sample_size_theorem1(dhat, float(D), dhat / 2.0, epsilon, delta, 2)


def sample_size_unif(D: int, epsilon: float, delta: float) -> int:
    """Uniform-sampling baseline sample size, ``c/eps^2 (floor(log2(D-2)) + 1 + ln(1/delta))``."""
    if D < 2:
        raise ValueError("D must be >= 2")
    vc = math.floor(math.log2(max(D - 2, 2))) + 1
    return math.ceil(0.5 / epsilon**2 * (vc + math.log(1.0 / delta)))


def default_ell1(epsilon: float, delta: float) -> int:
    return max(MIN_ELL1, math.ceil(math.log(1.0 / delta) / epsilon))


def _check_cap(ell: int, cap: int | None) -> None:
    if cap is not None and ell > cap:
        raise SampleCapExceeded(ell, cap)


def percis(g: Graph, ps: PercolationStates, epsilon: float, delta: float,
           ell1: int | None = None, seed: int = 0, workers: int = 1,
           vertex_diam_ub: int | None = None,
           max_samples: int | None = DEFAULT_MAX_SAMPLES) -> tuple[CentralityScores, BoundParams]:
    """Two-phase importance sampling with a data-dependent sample size.

    Phase one draws ``ell1`` samples to bound ``rho`` (confidence delta/4)
    and the largest variance (delta/4); the resulting sample size uses the
    remaining delta/2.  Phase two draws fresh samples from an independent
    stream and returns their estimate.
    """
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise ValueError("epsilon and delta must lie in (0, 1)")
    ell1 = default_ell1(epsilon, delta) if ell1 is None else int(ell1)
    if ell1 < 2:
        raise ValueError("ell1 must be >= 2")
    D = vertex_diameter_ub(g, vertex_diam_ub)
    index = build_importance_index(ps)
    first = draw_batch(g, ps, ell1, "importance", seed=seed, workers=workers, index=index, stream=0)
    p1 = estimate_importance(first, ps)
    rt, lam, rh = rho_hat(first, D, delta / 4.0)
    vh = v_hat(p1, ps.dhat, ell1, delta / 4.0)
    xh = x_hat(ps.dhat, vh)
    ell = sample_size_theorem1(ps.dhat, rh, xh, epsilon, delta, 4)
    params = BoundParams(ps.dhat, rh, vh, xh, epsilon, delta, ell1, ell, D, rt, lam)
    _check_cap(ell, max_samples)
    second = summarize(g, ps, ell, "importance", seed=seed, workers=workers, index=index, stream=1)
    est = estimate_importance(second, ps)
    est = replace(est, sample_time=est.sample_time + first.sample_time, bfs_time=est.bfs_time + first.bfs_time)
    return est, params


def percis_di(g: Graph, ps: PercolationStates, epsilon: float, delta: float,
              seed: int = 0, workers: int = 1, vertex_diam_ub: int | None = None,
              max_samples: int | None = DEFAULT_MAX_SAMPLES) -> tuple[CentralityScores, BoundParams]:
    """Importance sampling with the data-independent sample size (no first phase)."""
    D = vertex_diameter_ub(g, vertex_diam_ub)
    ell = sample_size_di(D, ps.dhat, epsilon, delta)
    vh = ps.dhat**2 / 4.0
    params = BoundParams(ps.dhat, float(D), vh, ps.dhat / 2.0, epsilon, delta, 0, ell, D, math.nan, math.nan)
    _check_cap(ell, max_samples)
    batch = summarize(g, ps, ell, "importance", seed=seed, workers=workers, stream=1)
    return estimate_importance(batch, ps), params


def unif(g: Graph, ps: PercolationStates, epsilon: float, delta: float,
         seed: int = 0, workers: int = 1, vertex_diam_ub: int | None = None,
         max_samples: int | None = DEFAULT_MAX_SAMPLES) -> tuple[CentralityScores, BoundParams]:
    """Uniform pair sampling baseline, rescaled to estimate percolation centrality."""
    D = vertex_diameter_ub(g, vertex_diam_ub)
    ell = sample_size_unif(max(D, 2), epsilon, delta)
    params = BoundParams(ps.dhat, math.nan, math.nan, math.nan, epsilon, delta, 0, ell, D, math.nan, math.nan)
    _check_cap(ell, max_samples)
    batch = summarize(g, ps, ell, "uniform", seed=seed, workers=workers, stream=1)
    return estimate_uniform(batch, ps, rescale=True), params

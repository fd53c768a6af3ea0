"""Why uniform pair sampling can miss a node entirely.

Nodes a -> b -> c carry states 1, 0 and 1/2; every other node has state 0 and
they form a strongly connected star that feeds a.  Node b lies only on the
a -> c path, so uniform sampling must hit that single pair out of n(n-1)
before it sees b at all.  Importance sampling draws pairs in proportion to
their state difference, which gives that pair probability about 1/(3n)
instead of 1/n^2.
"""
import numpy as np

from percis import build_states, estimate_uniform, exact_percolation, max_error, percis, summarize
from percis.instances import gap_instance

n = 1000
g, x = gap_instance(n)
ps = build_states(x)
exact = exact_percolation(g, ps)
pb = exact.values[1]
eps = pb / 2
print(f"n={n}: p(b) = {pb:.3e}, target error eps = {eps:.3e}")

for ell in (10**4, 10**5, 10**6):
    hits = 0
    for seed in range(5):
        u = estimate_uniform(summarize(g, ps, ell, "uniform", seed=seed, workers=4), ps)
        hits += u.values[1] > 0
    print(f"uniform, {ell:>8} samples: b seen in {hits}/5 runs")

est, params = percis(g, ps, eps, delta=0.1, seed=0, workers=4)
print(f"importance sampling with {params.ell} samples: p~(b) = {est.values[1]:.3e}, "
      f"ME = {max_error(est, exact):.2e}")

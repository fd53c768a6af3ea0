"""Exact vs. sampled percolation centrality on a random digraph.

Run with ``python demos/quickstart.py``.
"""
import numpy as np

from percis import build_states, exact_percolation, gen_states, max_error, percis, avg_error
from percis.graph import Graph

rng = np.random.default_rng(0)

# A sparse random digraph on 3000 nodes, about 4 out-edges per node.
n = 3000
src = rng.integers(0, n, size=4 * n)
dst = rng.integers(0, n, size=4 * n)
g = Graph.from_edges(n, np.column_stack([src, dst]), directed=True)
print(f"graph: n={g.n} m={g.m}")

# 50 random "infected" nodes with state 1, everyone else 0.
g, x = gen_states(g, "rs", seed=1)
ps = build_states(x)
print(f"largest likelihood ratio dhat = {ps.dhat:.5f}")

exact = exact_percolation(g, ps, workers=4)

# The two-phase estimator picks its own sample size from a short pilot run.
for eps in (0.05, 0.02, 0.01):
    est, params = percis(g, ps, eps, delta=0.1, seed=7, workers=4)
    print(f"eps={eps:<5} samples={params.ell:>7}  ME={max_error(est, exact):.5f}  "
          f"AE={avg_error(est, exact):.2e}  rho_hat={params.rho_hat:.2f}")

top = np.argsort(-exact.values)[:5]
print("top nodes by exact score:", g.labels[top].tolist())
print("their estimates:         ", np.round(est.values[top], 4).tolist())

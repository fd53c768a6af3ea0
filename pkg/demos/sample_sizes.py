"""Data-dependent vs. worst-case sample sizes.

On the "ic" setting (a 50-node path appended to the graph, half of it at
state 1) only few pairs have positive weight and their paths are short, so
the pilot estimates of rho and of the variance are far below their worst-case
values and the two-phase bound asks for much fewer samples.
"""
import numpy as np

from percis import build_states, gen_states, percis, sample_size_di, sample_size_unif, vertex_diameter_ub
from percis.graph import Graph

rng = np.random.default_rng(3)
n = 2000
edges = rng.integers(0, n, size=(3 * n, 2))
g0 = Graph.from_edges(n, edges, directed=False)
g, x = gen_states(g0, "ic", seed=0)
ps = build_states(x)
D = vertex_diameter_ub(g)
print(f"n={g.n} m={g.m} D={D} dhat={ps.dhat:.4f}")

print(f"{'eps':>6} {'percis':>9} {'di':>9} {'unif':>9}")
for eps in (0.05, 0.02, 0.01, 0.005):
    _, params = percis(g, ps, eps, 0.05, seed=0, workers=4, max_samples=None)
    di = sample_size_di(D, ps.dhat, eps, 0.05)
    un = sample_size_unif(D, eps, 0.05)
    print(f"{eps:>6} {params.ell:>9} {di:>9} {un:>9}")

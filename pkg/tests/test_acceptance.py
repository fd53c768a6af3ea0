"""End-to-end acceptance checks, one test per criterion.

Each test prints a PASS/FAIL line (bypassing output capture) before asserting.
"""
import math
import time

import networkx as nx
import numpy as np
import pytest

from percis.bounds import fn_g, fn_h, percis, rho_hat, sample_size_di, sample_size_theorem1, v_hat, x_hat
from percis.cli import main
from percis.estimators import (brute_force_moments, brute_force_percolation, estimate_importance,
                               estimate_uniform, exact_percolation)
from percis.graph import from_networkx, grid_graph, path_graph, vertex_diameter_ub, write_edge_list
from percis.instances import gap_instance, ratio_instance, state_path, three_path
from percis.metrics import max_error
from percis.rng import stream_key, uniforms
from percis.sampling import _paths, build_importance_index, draw_batch, sample_pair_importance, summarize
from percis.states import build_states, gen_states, write_states

from conftest import er_digraph
from test_sampling import linear_scan_pair


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number:>2}] {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def test_c01_exact_matches_brute_force(report):
    t0 = time.perf_counter()
    worst = 0.0
    cases = 0
    for seed in range(100):
        g = er_digraph(10, 0.3, seed)
        rng = np.random.default_rng(seed)
        seeds_x = np.zeros(10)
        seeds_x[rng.choice(10, 3, replace=False)] = 1.0
        for x in (seeds_x, rng.random(10)):
            ps = build_states(x)
            worst = max(worst, max_error(exact_percolation(g, ps), brute_force_percolation(g, ps)))
            cases += 1
    for make in (gap_instance, ratio_instance):
        for n in (10, 12):
            g, x = make(n)
            ps = build_states(x)
            worst = max(worst, max_error(exact_percolation(g, ps), brute_force_percolation(g, ps)))
            cases += 1
    elapsed = time.perf_counter() - t0
    report(1, worst <= 1e-9 and elapsed < 10,
           f"{cases} instances, max |exact - brute| = {worst:.2e}, {elapsed:.2f}s")


def test_c02_gap_instance_value(report):
    g, x = gap_instance(10)
    p = exact_percolation(g, build_states(x)).values[1]
    report(2, abs(p - 0.5 / 11) <= 1e-12, f"p(b) = {float(p)!r}, target 0.5/11 = {0.5 / 11!r}")


def test_c03_rs_dhat(report):
    _, x = gen_states(path_graph(10_000), "rs", seed=0)
    dhat = build_states(x).dhat
    report(3, abs(dhat - 50 / 49) <= 1e-12, f"dhat = {dhat!r}, 50/49 = {50 / 49!r}")


def test_c04_sampler_distribution(report):
    t0 = time.perf_counter()
    g, x = three_path()
    ps = build_states(x)
    b = draw_batch(g, ps, 1_000_000, seed=0)
    freq = {k: np.mean((b.s == k[0]) & (b.t == k[1])) for k in ((0, 1), (0, 2), (1, 2))}
    target = {(0, 1): 0.25, (0, 2): 0.5, (1, 2): 0.25}
    dev = max(abs(freq[k] - target[k]) for k in target)
    idx = build_importance_index(ps)
    xs = ps.sorted.tolist()
    u = uniforms(stream_key(1), 0, 10_000, 2)
    mismatches = sum(sample_pair_importance(idx, a, c) != linear_scan_pair(xs, a, c) for a, c in u)
    elapsed = time.perf_counter() - t0
    report(4, dev <= 0.01 and mismatches == 0 and elapsed < 30,
           f"max freq deviation {dev:.4f}, linear-scan mismatches {mismatches}/10000, {elapsed:.2f}s")


def test_c05_grid_path_uniformity(report):
    g = grid_graph(3, 3)
    n = 1_000_000
    ss = np.zeros(n, dtype=np.int64)
    ts = np.full(n, 8, dtype=np.int64)
    cnt, hops, sig = np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64), np.zeros(n)
    nodes = _paths(g.fwd_ptr, g.fwd_idx, g.bwd_ptr, g.bwd_idx, g.n, stream_key(0), 0, ss, ts, cnt, hops, sig)
    _, counts = np.unique(nodes.reshape(-1, 3), axis=0, return_counts=True)
    dev = np.abs(counts / n - 1 / 6).max()
    report(5, len(counts) == 6 and dev <= 0.01, f"{len(counts)} distinct paths, max deviation from 1/6 {dev:.4f}")


def test_c06_unbiasedness(report):
    g = er_digraph(12, 0.3, seed=4)
    ps = build_states(np.random.default_rng(11).random(12))
    exact = exact_percolation(g, ps).values
    reps = np.array([estimate_importance(summarize(g, ps, 1000, seed=s), ps).values for s in range(200)])
    se = reps.std(axis=0, ddof=1) / math.sqrt(200)
    z = np.where(se > 0, np.abs(reps.mean(axis=0) - exact) / np.where(se > 0, se, 1), 0.0)
    zero_ok = np.all(reps.mean(axis=0)[se == 0] == exact[se == 0])
    report(6, bool(z.max() <= 5 and zero_ok), f"max |mean - exact| / SE = {z.max():.2f} over {g.n} nodes")


def test_c07_end_to_end(report):
    t0 = time.perf_counter()
    g = from_networkx(nx.barabasi_albert_graph(2000, 3, seed=1))
    _, x = gen_states(g, "rs", seed=1)
    ps = build_states(x)
    exact = exact_percolation(g, ps, workers=4)
    errs = [max_error(percis(g, ps, 0.05, 0.1, seed=s, workers=4)[0], exact) for s in range(10)]
    ok = sum(e <= 0.05 for e in errs)
    elapsed = time.perf_counter() - t0
    report(7, ok >= 9 and elapsed < 300, f"{ok}/10 runs with ME <= 0.05 (max ME {max(errs):.4f}), {elapsed:.1f}s")


def test_c08_uniform_gap(report):
    g, x = gap_instance(1000)
    ps = build_states(x)
    exact = exact_percolation(g, ps)
    pb = exact.values[1]
    eps = pb / 2
    unif_fail = 0
    percis_ok = 0
    for s in range(10):
        u = estimate_uniform(summarize(g, ps, 100_000, "uniform", seed=s, workers=4), ps)
        unif_fail += u.values[1] == 0 and max_error(u, exact) == pb
        est, params = percis(g, ps, eps, 0.1, seed=s, workers=4)
        percis_ok += max_error(est, exact) <= eps
    report(8, unif_fail >= 8 and percis_ok >= 9,
           f"UNIF missed b in {unif_fail}/10 runs at 1e5 samples; PERCIS within eps in {percis_ok}/10 "
           f"(ell = {params.ell})")


@pytest.mark.parametrize("directed", [False, True])
def test_c09_bound_dominance(report, directed):
    base = nx.barabasi_albert_graph(2000, 3, seed=2)
    g, x = gen_states(from_networkx(base.to_directed() if directed else base), "ic", seed=0)
    ps = build_states(x)
    _, params = percis(g, ps, 0.01, 0.05, seed=0, workers=4, max_samples=None)
    di = sample_size_di(vertex_diameter_ub(g), ps.dhat, 0.01, 0.05)
    kind = "directed" if directed else "undirected"
    report(9, params.ell * 10 <= di, f"{kind} IC: PERCIS ell {params.ell}, DI ell {di}, ratio {di / params.ell:.1f}")


def test_c10_union_bound_grid(report):
    cases = [(1.05, 30.0, 0.01, 0.05), (2.0, 1.0, 0.1, 0.05), (4.0, 0.2, 0.05, 0.01), (1.3, 7.0, 0.02, 0.1)]
    worst = 0.0
    for dhat, rho, eps, delta in cases:
        for frac in (1.0, 0.2, 1e-3):
            xh = dhat / 2 * frac
            ell = sample_size_theorem1(dhat, rho, xh, eps, delta, 2)
            xs = np.geomspace(xh * 1e-12, xh, 100_000)
            gx = fn_g(xs, dhat)
            lhs = 2 * np.exp(-ell * gx / dhat**2 * fn_h(eps * dhat / gx)) * rho / xs
            worst = max(worst, float((lhs / delta).max()))
    report(10, worst <= 1.0, f"max (2B rho/x) / delta over {len(cases) * 3} settings x 1e5 points = {worst:.4f}")


def test_c11_coverage(report):
    delta1 = 0.05
    lines = []
    ok = True
    for seed, make in ((4, None), (7, None), (0, gap_instance)):
        if make is None:
            g = er_digraph(12, 0.3, seed)
            ps = build_states(np.random.default_rng(seed).random(12))
        else:
            g, x = make(12)
            ps = build_states(x)
        m = brute_force_moments(g, ps)
        D = vertex_diameter_ub(g)
        vmax = m["variance"].max()
        rho_hits = v_hits = 0
        for s in range(200):
            b = draw_batch(g, ps, 1000, seed=s)
            rho_hits += rho_hat(b, D, delta1)[2] >= m["rho"]
            v_hits += v_hat(estimate_importance(b, ps), ps.dhat, 1000, delta1) >= vmax
        ok &= min(rho_hits, v_hits) / 200 >= 1 - delta1 - 0.05
        lines.append(f"rho {rho_hits}/200, v {v_hits}/200")
    report(11, ok, "; ".join(lines))


def test_c12_determinism(report, tmp_path):
    g, x = state_path(100)
    write_edge_list(g, tmp_path / "g.txt")
    write_states(tmp_path / "x.txt", g, x)
    configs = [["--algo", "percis", "--epsilon", "0.05"], ["--algo", "percis-di", "--epsilon", "0.05"],
               ["--algo", "unif", "--epsilon", "0.05"], ["--samples", "50000", "--dist", "uniform"]]
    same = True
    for k, cfg in enumerate(configs):
        outs = []
        for w in (1, 4, 8):
            out = tmp_path / f"s{k}-{w}.csv"
            rc = main(["estimate", str(tmp_path / "g.txt"), "--states", str(tmp_path / "x.txt"),
                       "--seed", "17", "--workers", str(w), "-o", str(out), *cfg])
            assert rc == 0
            outs.append(out.read_bytes())
        same &= outs[0] == outs[1] == outs[2]
    report(12, same, f"{len(configs)} configurations, score CSVs identical at workers 1, 4, 8: {same}")

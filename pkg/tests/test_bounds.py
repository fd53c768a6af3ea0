import itertools
import math

import numpy as np
import pytest

from percis.bounds import (BoundParams, SampleCapExceeded, default_ell1, fn_g, fn_h, percis,
                           percis_di, rho_hat, sample_size_di, sample_size_theorem1,
                           sample_size_unif, unif, v_hat, x_hat)
from percis.estimators import brute_force_moments, estimate_importance, exact_percolation
from percis.graph import vertex_diameter_ub
from percis.instances import state_path, three_path
from percis.metrics import max_error
from percis.sampling import draw_batch, summarize
from percis.states import build_states, gen_states

from conftest import er_digraph


def test_g_and_h():
    assert fn_h(0.0) == 0.0
    assert fn_g(1.5, 3.0) == 9 / 4
    assert fn_h(1.0) == pytest.approx(2 * math.log(2) - 1, abs=1e-15)
    np.testing.assert_allclose(fn_h(np.array([0.0, 1.0])), [0.0, 2 * math.log(2) - 1])
    with pytest.raises(ValueError):
        fn_h(-0.1)


def test_rho_hat_constant_counts():
    mean, lam, bound = rho_hat(np.full(50, 3), D=10, delta=0.1)
    assert (mean, lam) == (3.0, 0.0)
    assert bound == pytest.approx(3 + 7 * 10 * math.log(20) / (3 * 49))


def test_rho_hat_two_samples():
    mean, lam, bound = rho_hat([0, 2], D=2, delta=0.5)
    assert (mean, lam) == (1.0, 2.0)
    L = math.log(4)
    assert bound == pytest.approx(1 + math.sqrt(2 * 2 * L / 2) + 7 * 2 * L / 3)


def test_rho_hat_pairwise_variance():
    c = np.random.default_rng(0).integers(0, 9, size=700)
    ell = len(c)
    pairwise = sum((a - b) ** 2 for a, b in itertools.combinations(c.tolist(), 2)) / (ell * (ell - 1))
    assert rho_hat(c, 9, 0.1)[1] == pytest.approx(pairwise, abs=1e-9)


def test_rho_hat_errors():
    with pytest.raises(ValueError):
        rho_hat([3], 5, 0.1)
    with pytest.raises(ValueError):
        rho_hat([1, 7], 5, 0.1)


def test_v_hat_examples():
    assert v_hat(np.zeros(5), 1.7, 100, 0.0125) == pytest.approx(1.7**2 * math.log(80) / 300)
    L = math.log(80)
    expect = 4 * (1 + math.sqrt(2 * L / 1000) + L / 3000)
    assert v_hat(np.array([0.0, 1.0, 0.0]), 2.0, 1000, 0.0125) == pytest.approx(expect)


def test_x_hat_examples():
    assert x_hat(2.0, 0.75) == pytest.approx(0.5)
    assert x_hat(2.0, 5.0) == 1.0
    assert 0 < x_hat(2.0, 1e-12) < 1e-11
    for v in (1e-6, 0.1, 0.9, 1.0):
        xh = x_hat(2.0, v)
        assert fn_g(xh, 2.0) >= min(v, 1.0) - 1e-9


def test_theorem1_monotone_in_epsilon():
    a = sample_size_theorem1(2.0, 1.0, 0.5, 0.1, 0.05)
    b = sample_size_theorem1(2.0, 1.0, 0.5, 0.2, 0.05)
    assert a >= b


def _expr(x, dhat, rho, eps, delta, mult=2):
    gx = fn_g(x, dhat)
    return dhat**2 * np.log(mult * dhat * rho / (x * delta)) / (gx * fn_h(eps * dhat / gx))


def test_theorem1_against_fine_grid():
    ell = sample_size_theorem1(2.0, 1.0, 0.5, 0.1, 0.05)
    fine = _expr(np.geomspace(0.5e-9, 0.5, 100_000), 2.0, 1.0, 0.1, 0.05).max()
    assert abs(ell - fine) <= 0.01 * fine
    assert ell >= fine


@pytest.mark.parametrize("dhat,rho,vh,eps,delta", [(2.0, 1.0, 0.75, 0.1, 0.05),
                                                   (1.05, 20.0, 0.01, 0.01, 0.1),
                                                   (4.0, 3.0, 4.0, 0.05, 0.01)])
def test_theorem1_closed_form_sanity(dhat, rho, vh, eps, delta):
    xh = x_hat(dhat, vh)
    ell = sample_size_theorem1(dhat, rho, xh, eps, delta)
    v = fn_g(xh, dhat)
    approx = (2 * v + 2 / 3 * eps * dhat) / eps**2 * (math.log(dhat * rho / v) + math.log(2 / delta))
    assert approx / 3 <= ell <= 3 * approx


def test_theorem1_rejects_bad_inputs():
    with pytest.raises(ValueError):
        sample_size_theorem1(2.0, 1.0, 1.5, 0.1, 0.05)
    with pytest.raises(ValueError):
        sample_size_theorem1(2.0, 1.0, 0.5, 1.5, 0.05)
    with pytest.raises(ValueError):
        sample_size_theorem1(2.0, -1.0, 0.5, 0.1, 0.05)


@pytest.mark.parametrize("x_frac", [1.0, 0.3, 1e-3])
def test_union_bound_inequality(x_frac):
    dhat, rho, eps, delta = 1.3, 7.0, 0.02, 0.05
    xh = dhat / 2 * x_frac
    ell = sample_size_theorem1(dhat, rho, xh, eps, delta)
    xs = np.geomspace(xh * 1e-12, xh, 100_000)
    gx = fn_g(xs, dhat)
    lhs = 2 * np.exp(-ell * gx / dhat**2 * fn_h(eps * dhat / gx)) * rho / xs
    assert np.all(lhs <= delta)


def test_di_examples():
    d = sample_size_di(50, 1.02, 0.05, 0.1)
    assert d >= sample_size_theorem1(1.02, 10.0, 0.3, 0.05, 0.1)
    d2 = sample_size_di(100, 1.02, 0.05, 0.1)
    assert d <= d2 <= d * math.log(200) / math.log(100) * 1.0001
    half = sample_size_di(50, 1.02, 0.025, 0.1)
    assert 2 <= half / d <= 8


def test_unif_size():
    assert sample_size_unif(31, 0.05, 0.05) == 1600
    sizes = [sample_size_unif(D, 0.05, 0.05) for D in range(2, 300)]
    assert sizes == sorted(sizes)
    ratio = sample_size_unif(31, 0.0005, 0.05) / sample_size_unif(31, 0.05, 0.05)
    assert ratio == pytest.approx(1e4, rel=1e-3)


def test_default_ell1():
    assert default_ell1(0.05, 0.1) == 1000
    assert default_ell1(1e-4, 0.01) == math.ceil(math.log(100) / 1e-4)


def test_params_json_keys():
    p = BoundParams(1.0, 2.0, 0.1, 0.2, 0.05, 0.1, 1000, 500, 7, 1.5, 0.3)
    assert set(p.to_dict()) == {"dhat", "rho_hat", "v_hat", "x_hat", "epsilon", "delta",
                                "ell1", "ell", "D", "rho_tilde", "lambda"}


def test_percis_state_path_runs():
    g, x = state_path(100)
    ps = build_states(x)
    exact = exact_percolation(g, ps)
    ok = 0
    for seed in range(10):
        est, params = percis(g, ps, 0.05, 0.1, seed=seed)
        assert params.ell >= 1 and params.ell1 == 1000
        ok += max_error(est, exact) <= 0.05
    assert ok >= 9


def test_percis_delta_split():
    g, x = state_path(60)
    ps = build_states(x)
    eps, delta = 0.05, 0.1
    _, params = percis(g, ps, eps, delta, seed=4)
    D = vertex_diameter_ub(g)
    first = draw_batch(g, ps, params.ell1, seed=4, stream=0)
    rt, lam, rh = rho_hat(first, D, delta / 4)
    assert (params.rho_tilde, params.lambda_, params.rho_hat) == (rt, lam, rh)
    L8 = math.log(8 / delta)
    assert rh == pytest.approx(rt + math.sqrt(2 * lam * L8 / params.ell1) + 7 * D * L8 / (3 * (params.ell1 - 1)))
    vh = v_hat(estimate_importance(first, ps), ps.dhat, params.ell1, delta / 4)
    assert params.v_hat == vh
    assert params.x_hat == x_hat(ps.dhat, vh)
    assert params.ell == sample_size_theorem1(ps.dhat, rh, params.x_hat, eps, delta, 4)


def test_percis_deterministic_across_workers():
    g, x = state_path(80)
    ps = build_states(x)
    a, pa = percis(g, ps, 0.05, 0.1, seed=2, workers=1)
    for w in (4, 8):
        b, pb = percis(g, ps, 0.05, 0.1, seed=2, workers=w)
        np.testing.assert_array_equal(a.values, b.values)
        assert pa == pb


def test_cap():
    g, x = state_path(50)
    ps = build_states(x)
    with pytest.raises(SampleCapExceeded) as info:
        percis(g, ps, 0.001, 0.1, max_samples=10_000)
    assert info.value.ell > 10_000
    with pytest.raises(SampleCapExceeded):
        percis_di(g, ps, 0.001, 0.1, max_samples=10_000)
    with pytest.raises(SampleCapExceeded):
        unif(g, ps, 0.001, 0.1, max_samples=10_000)


@pytest.mark.parametrize("seed", range(3))
def test_di_at_least_percis_when_premises_hold(seed):
    g = er_digraph(400, 0.01, seed)
    _, x = gen_states(g, "rs", seed=seed)
    ps = build_states(x)
    _, p = percis(g, ps, 0.05, 0.1, seed=seed)
    _, q = percis_di(g, ps, 0.05, 0.1, seed=seed)
    assert p.rho_hat <= q.D and p.v_hat <= ps.dhat**2 / 4
    assert q.ell >= p.ell


def _small_instances():
    for seed in (1, 3):
        g = er_digraph(11, 0.3, seed)
        yield g, build_states(np.random.default_rng(seed).random(11))


@pytest.mark.parametrize("g,ps", list(_small_instances()))
def test_end_to_end_coverage(g, ps):
    exact = exact_percolation(g, ps)
    eps, delta, runs = 0.05, 0.1, 100
    fails = sum(max_error(percis(g, ps, eps, delta, seed=s)[0], exact) > eps for s in range(runs))
    assert fails / runs <= delta + 3 * math.sqrt(delta / runs)


@pytest.mark.parametrize("g,ps", list(_small_instances()))
def test_theorem1_with_exact_moments(g, ps):
    m = brute_force_moments(g, ps)
    exact = exact_percolation(g, ps)
    eps, delta = 0.05, 0.1
    xh = x_hat(ps.dhat, float(m["variance"].max()))
    ell = sample_size_theorem1(ps.dhat, m["rho"], xh, eps, delta, 2)
    fails = sum(max_error(estimate_importance(summarize(g, ps, ell, seed=s), ps), exact) > eps
                for s in range(200))
    assert fails / 200 <= delta

import math

import numpy as np
import pytest

import lognull as ln
from lognull.models import (
    DegeneratePartitionError,
    UndefinedGammaError,
    estimate_params,
    loglik_at,
)

from conftest import random_graph, random_partition


def nondegenerate_instance(rng, n_max=12):
    """Random (graph, stats) with intra and inter structure."""
    while True:
        g = random_graph(rng, int(rng.integers(4, n_max + 1)))
        p = random_partition(rng, g.n, kmax=3)
        s = ln.compute_stats(g, p)
        if s.m_in > 0 and s.m_out > 0 and s.P_in > 0 and s.P_out > 0:
            return g, p, s


# --- modularity ------------------------------------------------------------

def test_simple_modularity_two_triangles(two_triangles):
    g, p = two_triangles
    s = ln.compute_stats(g, p)
    assert ln.simple_modularity(s, 1.0) == pytest.approx(0.6)
    assert ln.simple_modularity(s, 2.5) == pytest.approx(0.0)


def test_simple_modularity_singletons_zero():
    rng = np.random.default_rng(0)
    g = random_graph(rng, 8)
    s = ln.compute_stats(g, ln.Partition(np.arange(8)))
    assert ln.simple_modularity(s, 3.7) == 0.0


def test_modularity_two_triangles(two_triangles):
    g, p = two_triangles
    s = ln.compute_stats(g, p)
    assert ln.modularity(s, 1.0) == pytest.approx(0.5)


def test_modularity_karate_ground_truth(karate):
    g, gt = karate
    s = ln.compute_stats(g, gt)
    assert ln.modularity(s, 1.0) == pytest.approx(0.3715, abs=5e-4)


def test_modularity_single_community_zero(karate):
    g, _ = karate
    s = ln.compute_stats(g, ln.Partition(np.zeros(g.n, dtype=int)))
    assert ln.modularity(s, 1.0) == pytest.approx(0.0)


# --- planted partition model ------------------------------------------------

def test_ppm_loglik_two_triangles(two_triangles):
    g, p = two_triangles
    s = ln.compute_stats(g, p)
    for p_out in (0.1, 0.5, 1.0):
        assert ln.loglik_ppm(s, 1.0, p_out) == pytest.approx(-6 - 9 * p_out)


def test_ppm_loglik_karate(karate):
    g, gt = karate
    s = ln.compute_stats(g, gt)
    p_in, p_out = ln.estimate_ppm(s)
    assert ln.loglik_ppm(s, p_in, p_out) == pytest.approx(-206.12, abs=0.05)


def test_ppm_loglik_dolphins(dolphins):
    g, gt = dolphins
    s = ln.compute_stats(g, gt)
    p_in, p_out = ln.estimate_ppm(s)
    assert ln.loglik_ppm(s, p_in, p_out) == pytest.approx(-483.50, abs=0.05)


def test_estimate_ppm_two_triangles(two_triangles):
    g, p = two_triangles
    s = ln.compute_stats(g, p)
    p_in, p_out = ln.estimate_ppm(s)
    assert p_in == 1.0
    assert p_out == pytest.approx(1.0 / 24.0)  # clamped from zero


def test_estimate_ppm_degenerate(karate):
    g, _ = karate
    s = ln.compute_stats(g, ln.Partition(np.zeros(g.n, dtype=int)))
    with pytest.raises(DegeneratePartitionError):
        ln.estimate_ppm(s)


def test_gamma_ppm_karate(karate):
    g, gt = karate
    s = ln.compute_stats(g, gt)
    p_in, p_out = ln.estimate_ppm(s)
    assert ln.gamma_ppm(p_in, p_out, s.m, s.P) == pytest.approx(0.78, abs=0.01)


def test_gamma_ppm_identity():
    # p_in = e * p_out with P*p_out*(e-1) == m forces gamma == 1
    p_out = 0.05
    p_in = math.e * p_out
    P = 200.0
    m = P * p_out * (math.e - 1.0)
    assert ln.gamma_ppm(p_in, p_out, m, P) == pytest.approx(1.0)


def test_gamma_ppm_equal_params_error():
    with pytest.raises(UndefinedGammaError):
        ln.gamma_ppm(0.3, 0.3, 10.0, 100.0)


# --- degree-corrected PPM ----------------------------------------------------

def test_dcppm_loglik_karate(karate):
    g, gt = karate
    s = ln.compute_stats(g, gt)
    p_in, p_out = ln.estimate_dcppm(s)
    assert ln.loglik_dcppm(g, s, p_in, p_out) == pytest.approx(-168.65, abs=0.05)


def test_dcppm_equal_params_partition_independent(karate):
    g, gt = karate
    p_val = 0.8
    s1 = ln.compute_stats(g, gt)
    s2 = ln.compute_stats(g, ln.Partition(np.arange(g.n) % 5))
    assert ln.loglik_dcppm(g, s1, p_val, p_val) == pytest.approx(
        ln.loglik_dcppm(g, s2, p_val, p_val)
    )


def test_estimate_dcppm_two_triangles(two_triangles):
    g, p = two_triangles
    s = ln.compute_stats(g, p)
    p_in, p_out = ln.estimate_dcppm(s)
    assert p_in == pytest.approx(2.0)  # Poisson rate above 1 is legal here
    assert p_out == pytest.approx(1.0 / 24.0)


def test_estimate_dcppm_single_community_degenerate(two_triangles):
    g, _ = two_triangles
    s = ln.compute_stats(g, ln.Partition(np.zeros(6, dtype=int)))
    with pytest.raises(DegeneratePartitionError):
        ln.estimate_dcppm(s)


def test_gamma_dcppm_karate(karate):
    g, gt = karate
    s = ln.compute_stats(g, gt)
    p_in, p_out = ln.estimate_dcppm(s)
    assert ln.gamma_dcppm(p_in, p_out) == pytest.approx(0.78, abs=0.01)


def test_gamma_dcppm_symmetric():
    assert ln.gamma_dcppm(1.7, 0.2) == pytest.approx(ln.gamma_dcppm(0.2, 1.7))


# --- ILFR / ILFRS ------------------------------------------------------------

def test_ilfr_loglik_karate(karate):
    g, gt = karate
    s = ln.compute_stats(g, gt)
    mu = ln.estimate_mu_ilfr(g, s)
    assert ln.loglik_ilfr(g, s, mu) == pytest.approx(-168.63, abs=0.05)


def test_ilfr_loglik_dolphins(dolphins):
    g, gt = dolphins
    s = ln.compute_stats(g, gt)
    mu = ln.estimate_mu_ilfr(g, s)
    assert ln.loglik_ilfr(g, s, mu) == pytest.approx(-428.64, abs=0.05)


def test_ilfr_two_triangles_at_floor(two_triangles):
    # direct substitution with m_out = 0: two community terms of
    # 3*log((1-mu)/6 + mu/12), plus sum d log d = 12 log 2, minus m;
    # approaches 6*log(1/6) + 12*log(2) - 6 as mu -> 0
    g, p = two_triangles
    s = ln.compute_stats(g, p)
    mu = ln.param_floor(s.m)
    exact = 6 * math.log((1 - mu) / 6 + mu / 12) + 12 * math.log(2.0) - 6.0
    assert ln.loglik_ilfr(g, s, mu) == pytest.approx(exact, rel=1e-12)
    limit = 6 * math.log(1.0 / 6.0) + 12 * math.log(2.0) - 6.0
    assert ln.loglik_ilfr(g, s, mu) == pytest.approx(limit, abs=0.2)


def test_ilfr_domain_error(two_triangles):
    g, p = two_triangles
    s = ln.compute_stats(g, p)
    with pytest.raises(ValueError):
        ln.loglik_ilfr(g, s, 0.0)
    with pytest.raises(ValueError):
        ln.loglik_ilfr(g, s, 1.0)


def test_ilfrs_loglik_karate(karate):
    g, gt = karate
    s = ln.compute_stats(g, gt)
    assert ln.loglik_ilfrs(g, s, 0.128205) == pytest.approx(-176, abs=1.0)


def test_ilfrs_loglik_dolphins(dolphins):
    g, gt = dolphins
    s = ln.compute_stats(g, gt)
    mu = ln.estimate_mu_ilfrs(s)
    assert ln.loglik_ilfrs(g, s, mu) == pytest.approx(-434, abs=1.0)


def test_ilfrs_all_singletons_form():
    rng = np.random.default_rng(3)
    g = random_graph(rng, 9)
    s = ln.compute_stats(g, ln.Partition(np.arange(9)))
    mu = 0.4
    expected = (
        s.m * math.log(mu) - s.m * math.log(2 * s.m) + s.sum_dlogd - s.m
    )
    assert ln.loglik_ilfrs(g, s, mu) == pytest.approx(expected)


def test_estimate_mu_ilfrs(karate, two_triangles):
    g, gt = karate
    assert ln.estimate_mu_ilfrs(ln.compute_stats(g, gt)) == pytest.approx(
        0.128, abs=0.001
    )
    g2, p2 = two_triangles
    s2 = ln.compute_stats(g2, p2)
    assert ln.estimate_mu_ilfrs(s2) == ln.param_floor(s2.m)


def test_estimate_mu_ilfr_matches_grid_scan(karate):
    g, gt = karate
    s = ln.compute_stats(g, gt)
    mu = ln.estimate_mu_ilfr(g, s)
    lo = ln.param_floor(s.m)
    grid = np.linspace(lo, 1 - lo, 4001)
    best_grid = max(ln.loglik_ilfr(g, s, float(x)) for x in grid)
    assert ln.loglik_ilfr(g, s, mu) >= best_grid - 1e-6


def test_estimate_mu_ilfr_two_triangles_floor(two_triangles):
    g, p = two_triangles
    s = ln.compute_stats(g, p)
    mu = ln.estimate_mu_ilfr(g, s)
    assert mu == pytest.approx(ln.param_floor(s.m), abs=1e-4)


def test_estimate_mu_ilfr_near_closed_form():
    # where the simplified form is a good approximation the numeric optimum
    # sits near m_out / m
    rng = np.random.default_rng(11)
    g, p, s = nondegenerate_instance(rng, n_max=12)
    mu = ln.estimate_mu_ilfr(g, s)
    assert abs(mu - min(0.999, s.m_out / s.m)) < 0.05 or abs(
        ln.loglik_ilfr(g, s, mu)
        - ln.loglik_ilfr(g, s, max(1e-6, min(1 - 1e-6, s.m_out / s.m)))
    ) < 1.0


# --- non-parametric forms ----------------------------------------------------

def test_nonparametric_ppm_karate(karate):
    g, gt = karate
    s = ln.compute_stats(g, gt)
    assert ln.loglik_ppm_nonparametric(s) == pytest.approx(-206.12, abs=0.05)


@pytest.mark.parametrize("trial", range(100))
def test_nonparametric_composition(trial):
    rng = np.random.default_rng(5000 + trial)
    g, p, s = nondegenerate_instance(rng)
    assert ln.loglik_ppm_nonparametric(s) == pytest.approx(
        ln.loglik_ppm(s, *ln.estimate_ppm(s)), rel=1e-12
    )
    assert ln.loglik_dcppm_nonparametric(g, s) == pytest.approx(
        ln.loglik_dcppm(g, s, *ln.estimate_dcppm(s)), rel=1e-12
    )
    assert ln.loglik_ilfrs_nonparametric(g, s) == pytest.approx(
        ln.loglik_ilfrs(g, s, ln.estimate_mu_ilfrs(s)), rel=1e-12
    )


def test_nonparametric_ilfrs_two_triangles(two_triangles):
    g, p = two_triangles
    s = ln.compute_stats(g, p)
    assert ln.loglik_ilfrs_nonparametric(g, s) == pytest.approx(
        ln.loglik_ilfrs(g, s, ln.estimate_mu_ilfrs(s))
    )


def test_nonparametric_degenerate_errors(two_triangles):
    g, p = two_triangles
    s = ln.compute_stats(g, p)  # m_out == 0
    with pytest.raises(DegeneratePartitionError):
        ln.loglik_ppm_nonparametric(s)
    with pytest.raises(DegeneratePartitionError):
        ln.loglik_dcppm_nonparametric(g, s)


# --- equivalences and bounds -------------------------------------------------

@pytest.mark.parametrize("trial", range(25))
def test_dcppm_modularity_difference_equivalence(trial):
    """Fixed-parameter likelihood differences are modularity differences."""
    rng = np.random.default_rng(7000 + trial)
    g = random_graph(rng, int(rng.integers(5, 12)))
    p1 = random_partition(rng, g.n)
    p2 = random_partition(rng, g.n)
    s1, s2 = ln.compute_stats(g, p1), ln.compute_stats(g, p2)
    p_in, p_out = 1.9, 0.23
    gamma = ln.gamma_dcppm(p_in, p_out)
    lhs = ln.loglik_dcppm(g, s1, p_in, p_out) - ln.loglik_dcppm(g, s2, p_in, p_out)
    rhs = (
        s1.m
        * (math.log(p_in) - math.log(p_out))
        * (ln.modularity(s1, gamma) - ln.modularity(s2, gamma))
    )
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("trial", range(25))
def test_ppm_simple_modularity_difference_equivalence(trial):
    rng = np.random.default_rng(8000 + trial)
    g = random_graph(rng, int(rng.integers(5, 12)))
    p1 = random_partition(rng, g.n)
    p2 = random_partition(rng, g.n)
    s1, s2 = ln.compute_stats(g, p1), ln.compute_stats(g, p2)
    p_in, p_out = 0.8, 0.1
    gamma = ln.gamma_ppm(p_in, p_out, s1.m, s1.P)
    lhs = ln.loglik_ppm(s1, p_in, p_out) - ln.loglik_ppm(s2, p_in, p_out)
    rhs = (
        s1.m
        * (math.log(p_in) - math.log(p_out))
        * (ln.simple_modularity(s1, gamma) - ln.simple_modularity(s2, gamma))
    )
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("trial", range(20))
def test_ilfr_ilfrs_gap_bound(trial):
    """The dropped log(1+x) term bounds the gap between the two likelihoods."""
    rng = np.random.default_rng(9000 + trial)
    g, p, s = nondegenerate_instance(rng)
    mu = float(rng.uniform(0.05, 0.6))
    gap = ln.loglik_ilfr(g, s, mu) - ln.loglik_ilfrs(g, s, mu)
    bound = sum(
        0.5 * s.D_in[c] * mu * s.D[c] / ((1 - mu) * 2 * s.m)
        for c in range(s.k)
    )
    assert -1e-9 <= gap <= bound + 1e-9


def test_partition_independent_terms(karate):
    g, gt = karate
    s1 = ln.compute_stats(g, gt)
    s2 = ln.compute_stats(g, ln.Partition(np.arange(g.n) % 7))
    assert s1.sum_dlogd == pytest.approx(s2.sum_dlogd)
    assert s1.m == s2.m


# --- null-model degree structure ----------------------------------------------

def test_expected_degrees_ilfr_exact(karate):
    g, gt = karate
    for mu in (0.05, 0.128, 0.7):
        e = ln.expected_degrees(g, gt, ln.QualityModel("ilfr", mu=mu))
        assert np.allclose(e, g.degree, rtol=0, atol=1e-12)


def test_blockwise_rates_preserve_degrees_on_karate(karate):
    """Per-pair block rates 2m*w(Cq,Cr)/(D(Cq)D(Cr)) preserve every degree."""
    g, gt = karate
    s = ln.compute_stats(g, gt)
    assign = gt.normalize().assignment
    k = s.k
    rates = np.zeros((k, k))
    for (q, r), w in s.inter.items():
        rates[q, r] = rates[r, q] = 2 * s.m * w / (s.D[q] * s.D[r])
    deg = g.degree
    expected = np.zeros(g.n)
    for i in range(g.n):
        expected[i] = sum(
            deg[i] * deg[j] * rates[assign[i], assign[j]] / (2 * s.m)
            for j in range(g.n)
        )
    assert np.allclose(expected, deg, rtol=1e-12)


def test_expected_degrees_dcppm_violation_on_karate(karate):
    g, gt = karate
    s = ln.compute_stats(g, gt)
    p_in, p_out = ln.estimate_dcppm(s)
    assert s.D[0] != s.D[1]
    e = ln.expected_degrees(g, gt, ln.QualityModel("dcppm", p_in=p_in, p_out=p_out))
    assert not np.allclose(e, g.degree, atol=1e-6)


def test_expected_degrees_dcppm_configuration_reduction(karate):
    g, gt = karate
    e = ln.expected_degrees(g, gt, ln.QualityModel("dcppm", p_in=1.0, p_out=1.0))
    assert np.allclose(e, g.degree)


def test_expected_degrees_unsupported_kind(karate):
    g, gt = karate
    with pytest.raises(ValueError):
        ln.expected_degrees(g, gt, ln.QualityModel("modularity", gamma=1.0))


def test_sample_ppm_edge_count():
    rng = np.random.default_rng(0)
    n, p_val, samples = 20, 0.3, 400
    part = ln.Partition(np.zeros(n, dtype=int) % 1)
    model = ln.QualityModel("ppm", p_in=p_val, p_out=p_val)
    counts = [
        ln.sample_null_model(np.ones(n), part, model, seed=s).m
        for s in range(samples)
    ]
    P = n * (n - 1) / 2
    mean, se = P * p_val, math.sqrt(P * p_val / samples)
    assert abs(np.mean(counts) - mean) < 3 * se


def test_sample_ilfr_low_mu_inter_rate(two_triangles):
    # analytic mean inter-community weight: 9 cross pairs at mu*d_i*d_j/(2m)
    g, p = two_triangles
    mu = ln.param_floor(g.m)
    model = ln.QualityModel("ilfr", mu=mu)
    assign = p.assignment
    samples = 200
    inter = 0.0
    for s in range(samples):
        h = ln.sample_null_model(g.degree, p, model, seed=s)
        inter += sum(w for u, v, w in h.edges if assign[u] != assign[v])
    mean_rate = 9 * mu * 4.0 / (2 * g.m)
    se = math.sqrt(mean_rate / samples)
    assert abs(inter / samples - mean_rate) < 3 * se


def test_estimator_argmax_on_grids():
    rng = np.random.default_rng(6)
    for _ in range(20):
        g, p, s = nondegenerate_instance(rng)
        lo = ln.param_floor(s.m)
        p_in0, p_out0 = ln.estimate_ppm(s)
        best = ln.loglik_ppm(s, p_in0, p_out0)
        grid = np.linspace(lo, 1.0, 25)
        assert best >= max(
            ln.loglik_ppm(s, a, b) for a in grid for b in grid
        ) - 1e-9
        mu0 = ln.estimate_mu_ilfrs(s)
        best = ln.loglik_ilfrs(g, s, mu0)
        for x in np.linspace(lo, 1 - lo, 101):
            assert best >= ln.loglik_ilfrs(g, s, float(x)) - 1e-9


def test_quality_model_validation():
    with pytest.raises(ValueError):
        ln.QualityModel("nonsense")
    with pytest.raises(ValueError):
        ln.QualityModel("modularity", gamma=0.0)
    with pytest.raises(ValueError):
        ln.QualityModel("ppm", p_in=1.2, p_out=0.1)  # probability above 1
    ln.QualityModel("dcppm", p_in=1.2, p_out=0.1)  # rate above 1 is fine
    with pytest.raises(ValueError):
        ln.QualityModel("ppm", p_in=0.5)
    with pytest.raises(ValueError):
        ln.QualityModel("ilfr", mu=0.0)
    with pytest.raises(ValueError):
        ln.QualityModel("ilfrs")


def test_loglik_at_estimate_params_round_trip(karate):
    g, gt = karate
    s = ln.compute_stats(g, gt)
    for kind in ("ppm", "dcppm", "ilfr", "ilfrs"):
        est = estimate_params(g, s, kind)
        assert est.kind == kind
        assert np.isfinite(loglik_at(g, s, est))
        if kind in ("ppm", "dcppm"):
            assert est.gamma is not None
        else:
            assert est.gamma is None

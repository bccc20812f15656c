import io

import numpy as np
import pytest

import lognull as ln
from lognull import ParseError, ValidationError

from conftest import brute_stats, random_graph, random_partition


def test_load_triangle():
    g = ln.load_edge_list(io.StringIO("0 1\n1 2\n0 2\n"))
    assert g.n == 3 and g.m == 3
    assert np.allclose(g.degree, 2.0)


def test_load_karate_counts(karate):
    g, gt = karate
    assert g.n == 34 and g.m == 78
    assert gt.k == 2


def test_load_rejects_self_loop():
    with pytest.raises(ValidationError):
        ln.load_edge_list(io.StringIO("0 0\n"))


def test_load_rejects_duplicate_edge():
    with pytest.raises(ValidationError):
        ln.load_edge_list(io.StringIO("0 1\n1 0\n"))


def test_load_rejects_malformed_line():
    with pytest.raises(ParseError, match="line 2"):
        ln.load_edge_list(io.StringIO("0 1\n0 1 2\n"))


def test_load_skips_comments_and_blanks():
    g = ln.load_edge_list(io.StringIO("# header\n\na b\n"))
    assert g.n == 2 and g.labels == ["a", "b"]


def test_partition_single_cluster():
    g = ln.load_edge_list(io.StringIO("0 1\n1 2\n0 2\n"))
    p = ln.load_partition(io.StringIO("0 a\n1 a\n2 a\n"), g)
    assert p.k == 1


def test_partition_missing_vertex():
    g = ln.load_edge_list(io.StringIO("0 1\n1 2\n0 2\n"))
    with pytest.raises(ValidationError, match="missing"):
        ln.load_partition(io.StringIO("0 a\n1 a\n"), g)


def test_partition_unknown_and_duplicate_vertex():
    g = ln.load_edge_list(io.StringIO("0 1\n"))
    with pytest.raises(ValidationError, match="unknown"):
        ln.load_partition(io.StringIO("0 a\n1 a\n7 b\n"), g)
    with pytest.raises(ValidationError, match="duplicate"):
        ln.load_partition(io.StringIO("0 a\n0 b\n1 a\n"), g)


def test_stats_two_triangles(two_triangles):
    g, p = two_triangles
    s = ln.compute_stats(g, p)
    assert (s.m, s.m_in, s.m_out) == (6, 6, 0)
    assert (s.P, s.P_in, s.P_out) == (15, 6, 9)
    assert np.array_equal(s.D, [6, 6]) and np.array_equal(s.D_in, [6, 6])


def test_stats_karate_mixing(karate):
    g, gt = karate
    s = ln.compute_stats(g, gt)
    assert s.m_out / s.m == pytest.approx(0.128, abs=0.002)


def test_stats_singletons_have_no_intra():
    g = ln.load_edge_list(io.StringIO("0 1\n1 2\n0 2\n3 0\n"))
    s = ln.compute_stats(g, ln.Partition(np.arange(g.n)))
    assert s.m_in == 0 and s.P_in == 0 and not s.D_in.any()


def test_contract_two_triangles(two_triangles):
    g, p = two_triangles
    c = ln.contract(g, p)
    assert c.n == 2 and c.m == g.m
    assert np.array_equal(c.loop_weight, [3, 3])
    assert np.array_equal(c.degree, [6, 6])
    assert len([e for e in c.edges if e[0] != e[1]]) == 0


def test_contract_by_singletons_is_identity(two_triangles):
    g, _ = two_triangles
    c = ln.contract(g, ln.Partition(np.arange(g.n)))
    assert c.n == g.n and sorted(c.edges) == sorted(g.edges)


def test_contract_triangle_two_blocks():
    g = ln.load_edge_list(io.StringIO("0 1\n1 2\n0 2\n"))
    c = ln.contract(g, ln.Partition([0, 0, 1]))
    inter = [e for e in c.edges if e[0] != e[1]]
    assert inter == [(0, 1, 2.0)]
    assert c.loop_weight[0] == 1.0 and c.loop_weight[1] == 0.0


def test_degree_loop_identity_on_all_levels(two_triangles):
    g, p = two_triangles
    c = ln.contract(g, p)
    assert c.degree.sum() == pytest.approx(2 * c.m)


@pytest.mark.parametrize("trial", range(30))
def test_stats_match_bruteforce(trial):
    rng = np.random.default_rng(1000 + trial)
    g = random_graph(rng, int(rng.integers(2, 13)), weighted=trial % 3 == 0,
                     loops=trial % 4 == 0)
    p = random_partition(rng, g.n)
    s = ln.compute_stats(g, p)
    ref = brute_stats(g, p)
    assert s.m == pytest.approx(ref["m"])
    assert s.m_in == pytest.approx(ref["m_in"])
    assert (s.P, s.P_in) == (ref["P"], ref["P_in"])
    assert np.allclose(s.D, ref["D"]) and np.allclose(s.D_in, ref["D_in"])
    assert s.sum_dlogd == pytest.approx(ref["sum_dlogd"])
    assert {k: pytest.approx(v) for k, v in s.inter.items()} == ref["inter"]


@pytest.mark.parametrize("trial", range(10))
def test_contraction_preserves_stats(trial):
    rng = np.random.default_rng(2000 + trial)
    g = random_graph(rng, int(rng.integers(3, 12)))
    p = random_partition(rng, g.n).normalize()
    c = ln.contract(g, p)
    s_orig = ln.compute_stats(g, p)
    s_contr = ln.compute_stats(c, ln.Partition(np.arange(c.n)))
    assert s_contr.m == pytest.approx(s_orig.m)
    assert s_contr.m_in == pytest.approx(s_orig.m_in)
    assert s_contr.P_in == pytest.approx(s_orig.P_in)
    assert np.allclose(np.sort(s_contr.D), np.sort(s_orig.D))
    assert np.allclose(np.sort(s_contr.D_in), np.sort(s_orig.D_in))


def test_write_round_trip(tmp_path, two_triangles):
    g, p = two_triangles
    ln.write_edge_list(g, tmp_path / "g.edges")
    ln.write_partition(p, tmp_path / "g.clusters", graph=g)
    g2 = ln.load_edge_list(tmp_path / "g.edges")
    p2 = ln.load_partition(tmp_path / "g.clusters", g2)
    assert g2.n == g.n and g2.m == g.m
    assert p2 == p

import itertools
from pathlib import Path

import numpy as np
import pytest

import lognull as ln

DATA = Path(__file__).resolve().parent.parent / "datasets"


@pytest.fixture(scope="session")
def karate():
    g = ln.load_edge_list(DATA / "karate.edges")
    gt = ln.load_partition(DATA / "karate.clusters", g)
    return g, gt


@pytest.fixture(scope="session")
def dolphins():
    g = ln.load_edge_list(DATA / "dolphins.edges")
    gt = ln.load_partition(DATA / "dolphins.clusters", g)
    return g, gt


@pytest.fixture
def two_triangles():
    g = ln.Graph(6, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1)])
    p = ln.Partition([0, 0, 0, 1, 1, 1])
    return g, p


def random_graph(rng, n, p=0.35, weighted=False, loops=False):
    """Random test graph with at least one edge."""
    edges = []
    for u in range(n):
        for v in range(u if loops else u + 1, n):
            if rng.random() < p:
                w = float(rng.integers(1, 4)) if weighted else 1.0
                edges.append((u, v, w))
    if not edges:
        edges = [(0, 1, 1.0)]
    return ln.Graph(n, edges)


def random_partition(rng, n, kmax=None):
    k = int(rng.integers(1, (kmax or max(2, n // 2)) + 1))
    return ln.Partition(rng.integers(0, k, n))


def brute_stats(graph, partition):
    """Pairwise-enumeration oracle for all sufficient statistics."""
    assign = partition.normalize().assignment
    n = graph.n
    k = int(assign.max()) + 1
    deg = [0.0] * n
    m = 0.0
    m_in = 0.0
    D_in = [0.0] * k
    inter = {}
    for u, v, w in graph.edges:
        m += w
        if u == v:
            deg[u] += 2 * w
        else:
            deg[u] += w
            deg[v] += w
        cu, cv = int(assign[u]), int(assign[v])
        if cu == cv:
            m_in += w
            D_in[cu] += 2 * w
            inter[(cu, cu)] = inter.get((cu, cu), 0.0) + 2 * w
        else:
            key = (min(cu, cv), max(cu, cv))
            inter[key] = inter.get(key, 0.0) + w
    D = [0.0] * k
    size = [0] * k
    for v in range(n):
        D[assign[v]] += deg[v]
        size[assign[v]] += int(graph.sizes[v])
    # pair counts by explicit enumeration over original-vertex blocks
    N = int(graph.sizes.sum())
    owners = []
    for v in range(n):
        owners.extend([int(assign[v])] * int(graph.sizes[v]))
    P = P_in = 0
    for i, j in itertools.combinations(range(N), 2):
        P += 1
        if owners[i] == owners[j]:
            P_in += 1
    sum_dlogd = sum(d * np.log(d) for d in deg if d > 0)
    return dict(
        m=m, m_in=m_in, m_out=m - m_in, P=P, P_in=P_in, P_out=P - P_in,
        size=size, D=D, D_in=D_in, inter=inter, sum_dlogd=sum_dlogd,
    )


def set_partitions(items):
    """All partitions of a list (Bell-number enumeration)."""
    if not items:
        yield []
        return
    head, *rest = items
    for sub in set_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [[head] + sub[i]] + sub[i + 1:]
        yield [[head]] + sub


def best_partition_exhaustive(graph, model):
    """Exact optimum of a quality model by full partition enumeration."""
    best, best_q = None, -np.inf
    for blocks in set_partitions(list(range(graph.n))):
        assign = np.zeros(graph.n, dtype=int)
        for c, block in enumerate(blocks):
            for v in block:
                assign[v] = c
        part = ln.Partition(assign)
        q = ln.evaluate(model, graph, ln.compute_stats(graph, part))
        if q > best_q:
            best, best_q = part, q
    return best, best_q

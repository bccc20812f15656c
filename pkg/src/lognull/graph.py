"""Graph and partition containers, file ingestion, sufficient statistics, contraction.

Graphs are undirected and weighted. Base graphs loaded from edge lists are
simple with unit weights; weighted loops appear on the contracted graphs
produced by the multi-level optimizer. A loop of weight w contributes 2w to
the degree of its endpoint and w to the total edge weight m, so that
sum(degree) == 2*m holds at every level.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class GraphError(Exception):
    """Base class for ingestion and validation failures."""


class ParseError(GraphError):
    """Malformed input line; carries the 1-based line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ValidationError(GraphError):
    """Structurally invalid input (self-loop, duplicate edge, bad cover)."""


class Graph:
    """Undirected weighted multigraph with dense integer vertex ids.

    Parameters
    ----------
    n : number of vertices.
    edges : iterable of (u, v, weight) with 0 <= u, v < n. Loops allowed.
    sizes : per-vertex supervertex sizes (number of original vertices each
        vertex stands for). Defaults to all-ones for base graphs.
    labels : optional list mapping dense id -> original label.
    """

    def __init__(self, n, edges, sizes=None, labels=None):
        self.n = int(n)
        canon = []
        for u, v, w in edges:
            u, v = int(u), int(v)
            if u > v:
                u, v = v, u
            canon.append((u, v, float(w)))
        self.edges = canon
        self.sizes = (
            np.ones(self.n, dtype=np.int64)
            if sizes is None
            else np.asarray(sizes, dtype=np.int64)
        )
        self.labels = labels

        deg = np.zeros(self.n, dtype=np.float64)
        loops = np.zeros(self.n, dtype=np.float64)
        m = 0.0
        nbr_count = np.zeros(self.n, dtype=np.int64)
        for u, v, w in canon:
            m += w
            if u == v:
                loops[u] += w
                deg[u] += 2.0 * w
            else:
                deg[u] += w
                deg[v] += w
                nbr_count[u] += 1
                nbr_count[v] += 1
        self.degree = deg
        self.loop_weight = loops
        self.m = m

        # CSR adjacency over non-loop edges; loops are kept separate.
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(nbr_count, out=indptr[1:])
        nbr = np.zeros(indptr[-1], dtype=np.int64)
        wt = np.zeros(indptr[-1], dtype=np.float64)
        cursor = indptr[:-1].copy()
        for u, v, w in canon:
            if u == v:
                continue
            nbr[cursor[u]] = v
            wt[cursor[u]] = w
            cursor[u] += 1
            nbr[cursor[v]] = u
            wt[cursor[v]] = w
            cursor[v] += 1
        self.adj_indptr = indptr
        self.adj_nbr = nbr
        self.adj_wt = wt

    @property
    def total_size(self):
        """Number of original vertices represented (n for base graphs)."""
        return int(self.sizes.sum())

    def neighbors(self, v):
        """(neighbor ids, edge weights) of v, loops excluded."""
        lo, hi = self.adj_indptr[v], self.adj_indptr[v + 1]
        return self.adj_nbr[lo:hi], self.adj_wt[lo:hi]

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m:g})"


class Partition:
    """Assignment of every vertex to exactly one community.

    Community ids of a normalized partition are dense 0..k-1 in order of
    first appearance.
    """

    def __init__(self, assignment):
        self.assignment = np.asarray(assignment, dtype=np.int64)

    @property
    def n(self):
        return self.assignment.size

    @property
    def k(self):
        return int(np.unique(self.assignment).size)

    def normalize(self):
        """Return an equivalent partition with dense community ids."""
        remap = {}
        out = np.zeros_like(self.assignment)
        for i, c in enumerate(self.assignment):
            c = int(c)
            if c not in remap:
                remap[c] = len(remap)
            out[i] = remap[c]
        return Partition(out)

    def communities(self):
        """List of member-vertex lists, indexed by normalized community id."""
        norm = self.normalize()
        groups = [[] for _ in range(norm.k)]
        for v, c in enumerate(norm.assignment):
            groups[c].append(v)
        return groups

    def __eq__(self, other):
        return isinstance(other, Partition) and np.array_equal(
            self.normalize().assignment, other.normalize().assignment
        )

    def __repr__(self):
        return f"Partition(n={self.n}, k={self.k})"


@dataclass
class PartitionStats:
    """Sufficient statistics of (graph, partition) for every quality function.

    Pair counts use original-vertex sizes, so they agree between a base graph
    and any of its contractions. ``inter`` maps community pairs (q, r), q <= r,
    to total edge weight; its diagonal holds D_in(C), i.e. twice the
    intra-community weight.
    """

    m: float
    m_in: float
    m_out: float
    P: float
    P_in: float
    P_out: float
    size: np.ndarray
    D: np.ndarray
    D_in: np.ndarray
    inter: dict = field(repr=False)
    sum_dlogd: float = 0.0

    @property
    def k(self):
        return self.size.size

    def sum_D_sq(self):
        return float(np.dot(self.D, self.D))


def compute_stats(graph, partition):
    """All sufficient statistics of a partition of a graph.

    The partition must cover every vertex; community ids are normalized
    internally, so callers may pass sparse ids.
    """
    if partition.n != graph.n:
        raise ValidationError(
            f"partition covers {partition.n} vertices, graph has {graph.n}"
        )
    norm = partition.normalize()
    assign = norm.assignment
    k = norm.k

    size = np.zeros(k, dtype=np.int64)
    np.add.at(size, assign, graph.sizes)
    D = np.zeros(k, dtype=np.float64)
    np.add.at(D, assign, graph.degree)

    D_in = np.zeros(k, dtype=np.float64)
    m_in = 0.0
    inter = {}
    for u, v, w in graph.edges:
        cu, cv = int(assign[u]), int(assign[v])
        if cu == cv:
            m_in += w
            D_in[cu] += 2.0 * w
            inter[(cu, cu)] = inter.get((cu, cu), 0.0) + 2.0 * w
        else:
            if cu > cv:
                cu, cv = cv, cu
            inter[(cu, cv)] = inter.get((cu, cv), 0.0) + w

    N = graph.total_size
    P = N * (N - 1) / 2.0
    P_in = float((size * (size - 1)).sum()) / 2.0
    deg = graph.degree
    pos = deg > 0
    sum_dlogd = float(np.sum(deg[pos] * np.log(deg[pos])))
    return PartitionStats(
        m=graph.m,
        m_in=m_in,
        m_out=graph.m - m_in,
        P=P,
        P_in=P_in,
        P_out=P - P_in,
        size=size,
        D=D,
        D_in=D_in,
        inter=inter,
        sum_dlogd=sum_dlogd,
    )


def contract(graph, partition):
    """Collapse each community into one supervertex.

    Inter-community weights become supervertex edges, intra-community weight
    becomes a loop, and supervertex sizes accumulate so that pair counts stay
    those of the original vertex set. Total weight m is preserved.
    """
    norm = partition.normalize()
    assign = norm.assignment
    k = norm.k
    sizes = np.zeros(k, dtype=np.int64)
    np.add.at(sizes, assign, graph.sizes)

    agg = {}
    for u, v, w in graph.edges:
        cu, cv = int(assign[u]), int(assign[v])
        if cu > cv:
            cu, cv = cv, cu
        agg[(cu, cv)] = agg.get((cu, cv), 0.0) + w
    edges = [(q, r, w) for (q, r), w in sorted(agg.items())]
    return Graph(k, edges, sizes=sizes)


def _open_lines(source):
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as f:
            yield from f
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        yield from source
    else:  # iterable of lines
        yield from source


def _tokenized(source):
    for line_no, raw in enumerate(_open_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield line_no, line.split()


def load_edge_list(source):
    """Read a simple undirected graph from SNAP-style edge-list text.

    One edge per line as two whitespace-separated labels; '#' starts a
    comment. Labels are mapped to dense ids in order of first appearance
    (the mapping is kept in ``Graph.labels``). Self-loops and duplicate
    edges are rejected.
    """
    ids = {}
    labels = []
    edges = []
    seen = set()
    for line_no, tokens in _tokenized(source):
        if len(tokens) != 2:
            raise ParseError(
                f"expected 2 tokens, got {len(tokens)}: {' '.join(tokens)!r}",
                line_no,
            )
        pair = []
        for tok in tokens:
            if tok not in ids:
                ids[tok] = len(ids)
                labels.append(tok)
            pair.append(ids[tok])
        u, v = pair
        if u == v:
            raise ValidationError(f"line {line_no}: self-loop at {tokens[0]!r}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ValidationError(
                f"line {line_no}: duplicate edge {tokens[0]!r} {tokens[1]!r}"
            )
        seen.add(key)
        edges.append((u, v, 1.0))
    return Graph(len(ids), edges, labels=labels)


def load_partition(source, graph):
    """Read a partition file ("vertex-label community-label" per line).

    Every graph vertex must appear exactly once; community labels are mapped
    to dense ids in order of first appearance.
    """
    if graph.labels is None:
        label_to_id = {str(i): i for i in range(graph.n)}
    else:
        label_to_id = {lab: i for i, lab in enumerate(graph.labels)}
    assign = np.full(graph.n, -1, dtype=np.int64)
    comm_ids = {}
    for line_no, tokens in _tokenized(source):
        if len(tokens) != 2:
            raise ParseError(
                f"expected 2 tokens, got {len(tokens)}: {' '.join(tokens)!r}",
                line_no,
            )
        vert, comm = tokens
        if vert not in label_to_id:
            raise ValidationError(f"line {line_no}: unknown vertex {vert!r}")
        vid = label_to_id[vert]
        if assign[vid] != -1:
            raise ValidationError(f"line {line_no}: duplicate vertex {vert!r}")
        if comm not in comm_ids:
            comm_ids[comm] = len(comm_ids)
        assign[vid] = comm_ids[comm]
    if (assign == -1).any():
        missing = int(np.argmax(assign == -1))
        label = graph.labels[missing] if graph.labels else str(missing)
        raise ValidationError(f"vertex {label!r} missing from partition")
    return Partition(assign)


def write_edge_list(graph, path, header=None):
    """Write a graph in the edge-list format accepted by load_edge_list."""
    labels = graph.labels or [str(i) for i in range(graph.n)]
    with open(path, "w", encoding="utf-8") as f:
        if header:
            f.write(f"# {header}\n")
        for u, v, _ in sorted(graph.edges):
            f.write(f"{labels[u]} {labels[v]}\n")


def write_partition(partition, path, graph=None, header=None):
    """Write a partition in the two-token format accepted by load_partition."""
    labels = (
        graph.labels
        if graph is not None and graph.labels is not None
        else [str(i) for i in range(partition.n)]
    )
    norm = partition.normalize()
    with open(path, "w", encoding="utf-8") as f:
        if header:
            f.write(f"# {header}\n")
        for v in range(norm.n):
            f.write(f"{labels[v]} {norm.assignment[v]}\n")

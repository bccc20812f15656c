"""Multi-level local-move optimizer for any fixed-parameter quality model.

The classic two-phase scheme: repeated sweeps move single vertices to the
neighboring community with the best strictly positive quality gain (ties to
the lowest community id); when a sweep makes no move the communities are
contracted into supervertices and the process repeats on the smaller graph.

Gains are computed incrementally in O(deg(v)) from cached per-community
aggregates (degree sums, intra-degree sums, supervertex sizes). The sweep
loop is JIT-compiled with numba when it is installed; a pure-Python fallback
with identical semantics is used otherwise.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import Graph, Partition, compute_stats, contract
from .models import evaluate

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    _HAVE_NUMBA = False

_USE_KERNEL = _HAVE_NUMBA
_MAX_PASSES = 1024
_MIN_LEVEL_GAIN = 1e-9

_CODES = {"simple": 0, "modularity": 1, "ppm": 2, "dcppm": 3, "ilfr": 4, "ilfrs": 5}


def _model_constants(model, m, P):
    """(code, c0, c1, c2) driving the shared gain formulas."""
    code = _CODES[model.kind]
    if code == 0:
        return code, 1.0 / m, model.gamma * m / P, 0.0
    if code == 1:
        return code, 1.0 / m, model.gamma / (4.0 * m * m), 0.0
    if code == 2:
        return (
            code,
            math.log(model.p_in) - math.log(model.p_out),
            model.p_in - model.p_out,
            0.0,
        )
    if code == 3:
        return (
            code,
            math.log(model.p_in) - math.log(model.p_out),
            (model.p_in - model.p_out) / (4.0 * m),
            0.0,
        )
    if code == 4:
        return (
            code,
            math.log(model.mu) - math.log(2.0 * m),
            1.0 - model.mu,
            model.mu / (2.0 * m),
        )
    return (
        code,
        math.log(1.0 - model.mu) - math.log(model.mu) + math.log(2.0 * m),
        0.0,
        0.0,
    )


class LouvainState:
    """One optimization level: graph, working assignment, cached aggregates.

    Community ids live in the vertex-id space of the level graph (initially
    the singleton partition); emptied communities are only garbage-collected
    at contraction time.
    """

    def __init__(self, graph, model, assignment=None):
        self.graph = graph
        self.model = model
        n = graph.n
        if assignment is None:
            self.assignment = np.arange(n, dtype=np.int64)
        else:
            self.assignment = np.asarray(assignment, dtype=np.int64).copy()
        self.comm_D = np.zeros(n, dtype=np.float64)
        self.comm_Din = np.zeros(n, dtype=np.float64)
        self.comm_S = np.zeros(n, dtype=np.int64)
        np.add.at(self.comm_D, self.assignment, graph.degree)
        np.add.at(self.comm_S, self.assignment, graph.sizes)
        m_in = 0.0
        for u, v, w in graph.edges:
            if self.assignment[u] == self.assignment[v]:
                m_in += w
                self.comm_Din[self.assignment[u]] += 2.0 * w
        self.m = graph.m
        self.m_in = m_in
        self.P = graph.total_size * (graph.total_size - 1) / 2.0
        s = self.comm_S.astype(np.float64)
        self.P_in = float((s * (s - 1.0)).sum()) / 2.0
        self.code, self.c0, self.c1, self.c2 = _model_constants(
            model, self.m, self.P
        )

    @property
    def m_out(self):
        return self.m - self.m_in

    def neighbor_weights(self, v):
        """Map community id -> total edge weight from v (loops excluded)."""
        nbr, wt = self.graph.neighbors(v)
        out = {}
        for u, w in zip(nbr, wt):
            c = int(self.assignment[u])
            out[c] = out.get(c, 0.0) + float(w)
        return out

    def quality_core(self):
        """Partition-dependent part of the model's quality.

        Omits the constants (sum of d*log d, -m, ...) that do not change
        with the partition, so the value is comparable across contraction
        levels of the same base graph.
        """
        code = self.code
        m, m_in, m_out = self.m, self.m_in, self.m_out
        if code == 0:
            return (m_in - self.model.gamma * self.P_in * m / self.P) / m
        if code == 1:
            return m_in / m - self.c1 * float(np.dot(self.comm_D, self.comm_D))
        if code == 2:
            lp_in = math.log(self.model.p_in)
            lp_out = math.log(self.model.p_out)
            return (
                m_in * lp_in
                + m_out * lp_out
                - self.P_in * self.model.p_in
                - (self.P - self.P_in) * self.model.p_out
            )
        if code == 3:
            return m_in * self.c0 - self.c1 * float(
                np.dot(self.comm_D, self.comm_D)
            )
        if code == 4:
            total = m_out * self.c0
            for c in np.nonzero(self.comm_Din > 0)[0]:
                total += 0.5 * self.comm_Din[c] * math.log(
                    self.c1 / self.comm_D[c] + self.c2
                )
            return total
        mu = self.model.mu
        total = 0.0
        if m_in > 0:
            total += m_in * math.log(1.0 - mu)
        if m_out > 0:
            total += m_out * (math.log(mu) - math.log(2.0 * m))
        for c in np.nonzero(self.comm_Din > 0)[0]:
            total -= 0.5 * self.comm_Din[c] * math.log(self.comm_D[c])
        return total

    def _gain(self, v, a, b, w_va, w_vb):
        """Quality change of moving v from community a to community b."""
        if a == b:
            return 0.0
        dv = float(self.graph.degree[v])
        sv = float(self.graph.sizes[v])
        lv = float(self.graph.loop_weight[v])
        dmin = w_vb - w_va
        code = self.code
        if code == 0:
            d_pin = sv * (self.comm_S[b] - self.comm_S[a] + sv)
            return (dmin - self.c1 * d_pin) * self.c0
        if code == 1:
            return dmin * self.c0 - self.c1 * 2.0 * dv * (
                self.comm_D[b] - self.comm_D[a] + dv
            )
        if code == 2:
            d_pin = sv * (self.comm_S[b] - self.comm_S[a] + sv)
            return dmin * self.c0 - d_pin * self.c1
        if code == 3:
            return dmin * self.c0 - self.c1 * 2.0 * dv * (
                self.comm_D[b] - self.comm_D[a] + dv
            )
        din_a, da = self.comm_Din[a], self.comm_D[a]
        din_b, db = self.comm_Din[b], self.comm_D[b]
        din_a2 = din_a - 2.0 * (w_va + lv)
        din_b2 = din_b + 2.0 * (w_vb + lv)
        da2, db2 = da - dv, db + dv
        if code == 4:
            g = -dmin * self.c0
            if din_a > 0:
                g -= 0.5 * din_a * math.log(self.c1 / da + self.c2)
            if din_a2 > 0:
                g += 0.5 * din_a2 * math.log(self.c1 / da2 + self.c2)
            if din_b > 0:
                g -= 0.5 * din_b * math.log(self.c1 / db + self.c2)
            if din_b2 > 0:
                g += 0.5 * din_b2 * math.log(self.c1 / db2 + self.c2)
            return g
        g = dmin * self.c0
        if din_a > 0:
            g += 0.5 * din_a * math.log(da)
        if din_a2 > 0:
            g -= 0.5 * din_a2 * math.log(da2)
        if din_b > 0:
            g += 0.5 * din_b * math.log(db)
        if din_b2 > 0:
            g -= 0.5 * din_b2 * math.log(db2)
        return g


def move_gain(state, v, target):
    """Exact quality gain of moving ``v`` into community ``target``.

    ``target`` may be any community id of the level (including an empty
    one); moving a vertex to its own community has zero gain. Cost is
    O(deg(v)).
    """
    n = state.graph.n
    if not 0 <= target < n:
        raise ValueError(f"unknown community id {target}")
    a = int(state.assignment[v])
    if target == a:
        return 0.0
    weights = state.neighbor_weights(v)
    return state._gain(v, a, int(target), weights.get(a, 0.0), weights.get(int(target), 0.0))


def apply_move(state, v, target):
    """Move ``v`` into ``target`` and update all cached aggregates."""
    a = int(state.assignment[v])
    b = int(target)
    if a == b:
        return
    weights = state.neighbor_weights(v)
    w_va = weights.get(a, 0.0)
    w_vb = weights.get(b, 0.0)
    dv = float(state.graph.degree[v])
    sv = int(state.graph.sizes[v])
    lv = float(state.graph.loop_weight[v])
    state.m_in += w_vb - w_va
    state.P_in += sv * (state.comm_S[b] - state.comm_S[a] + sv)
    state.assignment[v] = b
    state.comm_D[a] -= dv
    state.comm_D[b] += dv
    state.comm_Din[a] -= 2.0 * (w_va + lv)
    state.comm_Din[b] += 2.0 * (w_vb + lv)
    state.comm_S[a] -= sv
    state.comm_S[b] += sv


def _sweep_python(state, order):
    """One local-move pass; returns the number of accepted moves."""
    moves = 0
    assignment = state.assignment
    for v in order:
        v = int(v)
        a = int(assignment[v])
        weights = state.neighbor_weights(v)
        w_va = weights.get(a, 0.0)
        best_gain = 0.0
        best_c = a
        for b in sorted(weights):
            if b == a:
                continue
            g = state._gain(v, a, b, w_va, weights[b])
            if g > best_gain:
                best_gain = g
                best_c = b
        if best_c != a:
            apply_move(state, v, best_c)
            moves += 1
    return moves


def _sweep_kernel_impl(
    indptr,
    nbr,
    wt,
    loops,
    deg,
    sizes,
    assign,
    comm_D,
    comm_Din,
    comm_S,
    comm_wt,
    comm_stamp,
    cand,
    order,
    code,
    c0,
    c1,
    c2,
):
    moves = 0
    for idx in range(order.size):
        v = order[idx]
        a = assign[v]
        stamp = v + 1
        ncand = 0
        for e in range(indptr[v], indptr[v + 1]):
            c = assign[nbr[e]]
            if comm_stamp[c] != stamp:
                comm_stamp[c] = stamp
                comm_wt[c] = 0.0
                cand[ncand] = c
                ncand += 1
            comm_wt[c] += wt[e]
        if ncand == 0:
            continue
        # ascending candidate ids make the strict comparison below break
        # gain ties toward the lowest community id
        for i in range(1, ncand):
            key = cand[i]
            j = i - 1
            while j >= 0 and cand[j] > key:
                cand[j + 1] = cand[j]
                j -= 1
            cand[j + 1] = key
        w_va = comm_wt[a] if comm_stamp[a] == stamp else 0.0
        dv = deg[v]
        sv = sizes[v]
        lv = loops[v]
        best_gain = 0.0
        best_c = a
        for i in range(ncand):
            b = cand[i]
            if b == a:
                continue
            w_vb = comm_wt[b]
            dmin = w_vb - w_va
            if code == 0:
                g = (dmin - c1 * sv * (comm_S[b] - comm_S[a] + sv)) * c0
            elif code == 1:
                g = dmin * c0 - c1 * 2.0 * dv * (comm_D[b] - comm_D[a] + dv)
            elif code == 2:
                g = dmin * c0 - c1 * sv * (comm_S[b] - comm_S[a] + sv)
            elif code == 3:
                g = dmin * c0 - c1 * 2.0 * dv * (comm_D[b] - comm_D[a] + dv)
            else:
                din_a = comm_Din[a]
                da = comm_D[a]
                din_b = comm_Din[b]
                db = comm_D[b]
                din_a2 = din_a - 2.0 * (w_va + lv)
                din_b2 = din_b + 2.0 * (w_vb + lv)
                da2 = da - dv
                db2 = db + dv
                if code == 4:
                    g = -dmin * c0
                    if din_a > 0:
                        g -= 0.5 * din_a * math.log(c1 / da + c2)
                    if din_a2 > 0:
                        g += 0.5 * din_a2 * math.log(c1 / da2 + c2)
                    if din_b > 0:
                        g -= 0.5 * din_b * math.log(c1 / db + c2)
                    if din_b2 > 0:
                        g += 0.5 * din_b2 * math.log(c1 / db2 + c2)
                else:
                    g = dmin * c0
                    if din_a > 0:
                        g += 0.5 * din_a * math.log(da)
                    if din_a2 > 0:
                        g -= 0.5 * din_a2 * math.log(da2)
                    if din_b > 0:
                        g += 0.5 * din_b * math.log(db)
                    if din_b2 > 0:
                        g -= 0.5 * din_b2 * math.log(db2)
            if g > best_gain:
                best_gain = g
                best_c = b
        if best_c != a:
            b = best_c
            w_vb = comm_wt[b]
            assign[v] = b
            comm_D[a] -= dv
            comm_D[b] += dv
            comm_Din[a] -= 2.0 * (w_va + lv)
            comm_Din[b] += 2.0 * (w_vb + lv)
            comm_S[a] -= sv
            comm_S[b] += sv
            moves += 1
    return moves


if _HAVE_NUMBA:
    _sweep_kernel = numba.njit(cache=True)(_sweep_kernel_impl)
else:  # pragma: no cover
    _sweep_kernel = _sweep_kernel_impl


def _optimize_level(state, rng):
    """Sweep until a full pass accepts no move; returns total moves."""
    graph = state.graph
    total = 0
    if _USE_KERNEL:
        comm_wt = np.zeros(graph.n, dtype=np.float64)
        comm_stamp = np.full(graph.n, -1, dtype=np.int64)
        cand = np.zeros(graph.n + 1, dtype=np.int64)
        for _ in range(_MAX_PASSES):
            order = rng.permutation(graph.n).astype(np.int64)
            moves = _sweep_kernel(
                graph.adj_indptr,
                graph.adj_nbr,
                graph.adj_wt,
                graph.loop_weight,
                graph.degree,
                graph.sizes,
                state.assignment,
                state.comm_D,
                state.comm_Din,
                state.comm_S,
                comm_wt,
                comm_stamp,
                cand,
                order,
                state.code,
                state.c0,
                state.c1,
                state.c2,
            )
            comm_stamp.fill(-1)
            total += moves
            if moves == 0:
                break
        # kernel does not maintain the scalar aggregates; refresh them
        s = state.comm_S.astype(np.float64)
        state.P_in = float((s * (s - 1.0)).sum()) / 2.0
        state.m_in = state.m - 0.5 * float(
            state.comm_D.sum() - state.comm_Din.sum()
        )
        return total
    for _ in range(_MAX_PASSES):
        moves = _sweep_python(state, rng.permutation(graph.n))
        total += moves
        if moves == 0:
            break
    return total


def louvain(graph, model, seed=0, return_info=False):
    """Multi-level optimization of a fixed-parameter quality model.

    Deterministic for a given (graph, model, seed): vertex sweep orders are
    drawn from a PCG64 generator seeded with ``seed``. Returns the flattened
    partition of the original vertices (and a per-level quality trace when
    ``return_info`` is set).
    """
    rng = np.random.default_rng(seed)
    flat = np.arange(graph.n, dtype=np.int64)
    level_graph = graph
    quality = evaluate(model, graph, compute_stats(graph, Partition(flat)))
    level_qualities = [quality]
    while True:
        state = LouvainState(level_graph, model)
        moved = _optimize_level(state, rng)
        if moved == 0:
            break
        part = Partition(state.assignment).normalize()
        flat = part.assignment[flat]
        new_quality = evaluate(
            model, graph, compute_stats(graph, Partition(flat))
        )
        level_qualities.append(new_quality)
        gain = new_quality - quality
        quality = new_quality
        if gain < _MIN_LEVEL_GAIN * max(1.0, abs(new_quality)):
            break
        if part.k == level_graph.n:
            break
        level_graph = contract(level_graph, part)
    result = Partition(flat).normalize()
    if return_info:
        return result, {"levels": len(level_qualities) - 1, "qualities": level_qualities}
    return result

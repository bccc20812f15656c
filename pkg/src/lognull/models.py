"""Quality functions, likelihoods, estimators and samplers for the null models.

Six partition quality functions are supported:

=================  ==========================  =========================
kind               parameters                  global form
=================  ==========================  =========================
simple             gamma                       simple modularity Q0
modularity         gamma                       standard modularity Q1
ppm                p_in, p_out                 planted-partition Poisson log-likelihood
dcppm              p_in, p_out                 degree-corrected PPM log-likelihood
ilfr               mu                          degree-preserving one-parameter log-likelihood
ilfrs              mu                          simplified (closed-form mu) variant
=================  ==========================  =========================

Natural logarithms throughout, and 0*log(0) == 0 wherever an isolated vertex
or an intra-empty community makes a term vanish. Maximum-likelihood parameter
estimates are clamped below by 1/(4m) (a cut of less than one edge is below
the models' resolution); PPM probabilities are additionally clamped to <= 1,
while DCPPM rates may legitimately exceed 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph

MODEL_KINDS = ("simple", "modularity", "ppm", "dcppm", "ilfr", "ilfrs")
_GAMMA_KINDS = ("simple", "modularity")
_P_KINDS = ("ppm", "dcppm")
_MU_KINDS = ("ilfr", "ilfrs")


class DegeneratePartitionError(ValueError):
    """Estimator undefined: partition has no intra or no inter structure."""


class UndefinedGammaError(ValueError):
    """Equivalent resolution undefined because p_in == p_out."""


def param_floor(m):
    """Lower clamp for estimated parameters: one quarter-edge resolution."""
    return 1.0 / (4.0 * m)


@dataclass(frozen=True)
class QualityModel:
    """A model kind plus its fixed parameters.

    Exactly the parameters relevant to the kind must be set: gamma for the
    modularity kinds, (p_in, p_out) for ppm/dcppm, mu for ilfr/ilfrs.
    """

    kind: str
    gamma: float = 1.0
    p_in: float | None = None
    p_out: float | None = None
    mu: float | None = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind in _GAMMA_KINDS:
            if not self.gamma > 0:
                raise ValueError("gamma must be positive")
        elif self.kind in _P_KINDS:
            if self.p_in is None or self.p_out is None:
                raise ValueError(f"{self.kind} needs p_in and p_out")
            if not (self.p_in > 0 and self.p_out > 0):
                raise ValueError("p_in and p_out must be positive")
            if self.kind == "ppm" and (self.p_in > 1 or self.p_out > 1):
                raise ValueError("ppm probabilities must be <= 1")
        else:
            if self.mu is None:
                raise ValueError(f"{self.kind} needs mu")
            if not 0.0 < self.mu < 1.0:
                raise ValueError("mu must lie in (0, 1)")


@dataclass(frozen=True)
class EstimatedParams:
    """Closed-form (or numeric) optimal parameters for one model kind.

    ``gamma`` carries the equivalent resolution and is set only for
    ppm/dcppm (None when p_in == p_out makes it undefined).
    """

    kind: str
    p_in: float | None = None
    p_out: float | None = None
    mu: float | None = None
    gamma: float | None = None


def _xlogy(x, y):
    return 0.0 if x == 0.0 else x * math.log(y)


# ---------------------------------------------------------------------------
# modularity


def simple_modularity(stats, gamma):
    """Simple modularity Q0 (Erdos-Renyi null expectation)."""
    if stats.m <= 0:
        raise ValueError("graph has no edges")
    return (stats.m_in - gamma * stats.P_in * stats.m / stats.P) / stats.m


def modularity(stats, gamma):
    """Standard modularity Q1 (configuration-model null expectation)."""
    if stats.m <= 0:
        raise ValueError("graph has no edges")
    return stats.m_in / stats.m - gamma * stats.sum_D_sq() / (4.0 * stats.m**2)


# ---------------------------------------------------------------------------
# planted partition model


def loglik_ppm(stats, p_in, p_out):
    """Poissonized planted-partition log-likelihood."""
    if not (p_in > 0 and p_out > 0):
        raise ValueError("p_in and p_out must be positive")
    return (
        _xlogy(stats.m_in, p_in)
        + _xlogy(stats.m_out, p_out)
        - stats.P_in * p_in
        - stats.P_out * p_out
    )


def estimate_ppm(stats):
    """Maximum-likelihood (p_in, p_out), clamped into [1/(4m), 1]."""
    if stats.P_in <= 0 or stats.P_out <= 0:
        raise DegeneratePartitionError(
            "ppm estimate needs intra and inter vertex pairs"
        )
    eps = param_floor(stats.m)
    p_in = min(1.0, max(eps, stats.m_in / stats.P_in))
    p_out = min(1.0, max(eps, stats.m_out / stats.P_out))
    return p_in, p_out


def gamma_ppm(p_in, p_out, m, P):
    """Resolution at which fixed-parameter PPM likelihood matches Q0."""
    if not (p_in > 0 and p_out > 0):
        raise ValueError("p_in and p_out must be positive")
    if p_in == p_out:
        raise UndefinedGammaError("gamma undefined for p_in == p_out")
    return P * (p_in - p_out) / (m * (math.log(p_in) - math.log(p_out)))


# ---------------------------------------------------------------------------
# degree-corrected planted partition model


def loglik_dcppm(graph, stats, p_in, p_out):
    """Degree-corrected PPM log-likelihood (Poisson rates d(i)d(j)p/2m)."""
    if not (p_in > 0 and p_out > 0):
        raise ValueError("p_in and p_out must be positive")
    m = stats.m
    if m <= 0:
        raise ValueError("graph has no edges")
    return (
        stats.m_in * (math.log(p_in) - math.log(p_out))
        - (p_in - p_out) / (4.0 * m) * stats.sum_D_sq()
        + stats.sum_dlogd
        + m * math.log(p_out)
        - m * p_out
        - m * math.log(2.0 * m)
    )


def estimate_dcppm(stats):
    """Maximum-likelihood (p_in, p_out) rates, clamped below by 1/(4m)."""
    m = stats.m
    sum_sq = stats.sum_D_sq()
    if sum_sq >= 4.0 * m * m:
        raise DegeneratePartitionError(
            "dcppm estimate needs more than one community"
        )
    eps = param_floor(m)
    p_in = max(eps, 4.0 * m * stats.m_in / sum_sq)
    p_out = max(eps, 4.0 * m * stats.m_out / (4.0 * m * m - sum_sq))
    return p_in, p_out


def gamma_dcppm(p_in, p_out):
    """Resolution at which fixed-parameter DCPPM likelihood matches Q1."""
    if not (p_in > 0 and p_out > 0):
        raise ValueError("p_in and p_out must be positive")
    if p_in == p_out:
        raise UndefinedGammaError("gamma undefined for p_in == p_out")
    return (p_in - p_out) / (math.log(p_in) - math.log(p_out))


# ---------------------------------------------------------------------------
# independent LFR model


def _ilfr_community_terms(stats, mu):
    total = 0.0
    two_m = 2.0 * stats.m
    for c in range(stats.k):
        din = stats.D_in[c]
        if din > 0:
            total += 0.5 * din * math.log((1.0 - mu) / stats.D[c] + mu / two_m)
    return total


def loglik_ilfr(graph, stats, mu):
    """One-parameter degree-preserving log-likelihood."""
    if not 0.0 < mu < 1.0:
        raise ValueError("mu must lie in (0, 1)")
    two_m = 2.0 * stats.m
    return (
        _ilfr_community_terms(stats, mu)
        + _xlogy(stats.m_out, mu)
        + stats.sum_dlogd
        - stats.m_out * math.log(two_m)
        - stats.m
    )


def loglik_ilfrs(graph, stats, mu):
    """Simplified variant: drops the log(1 + x) <= x correction term."""
    if not 0.0 < mu < 1.0:
        raise ValueError("mu must lie in (0, 1)")
    comm = 0.0
    for c in range(stats.k):
        din = stats.D_in[c]
        if din > 0:
            comm += 0.5 * din * math.log(stats.D[c])
    return (
        _xlogy(stats.m_in, 1.0 - mu)
        + _xlogy(stats.m_out, mu)
        - stats.m_out * math.log(2.0 * stats.m)
        - comm
        + stats.sum_dlogd
        - stats.m
    )


def estimate_mu_ilfrs(stats):
    """Closed-form optimal mu = m_out / m, clamped into [1/(4m), 1 - 1/(4m)]."""
    if stats.m <= 0:
        raise ValueError("graph has no edges")
    lo = param_floor(stats.m)
    return min(1.0 - lo, max(lo, stats.m_out / stats.m))


def _golden_section_max(f, a, b, tol):
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = f(x1)
    return (a + b) / 2.0


def estimate_mu_ilfr(graph, stats, tol=1e-6, scan_points=200):
    """Numeric optimal mu for the full (non-simplified) likelihood.

    A coarse scan picks the bracketing window (the likelihood is not known
    to be unimodal), then golden-section search refines it to absolute
    tolerance ``tol``.
    """
    if stats.m <= 0:
        raise ValueError("graph has no edges")
    lo = param_floor(stats.m)
    hi = 1.0 - lo
    grid = np.linspace(lo, hi, scan_points)
    values = [loglik_ilfr(graph, stats, float(mu)) for mu in grid]
    best = int(np.argmax(values))
    a = float(grid[max(0, best - 1)])
    b = float(grid[min(scan_points - 1, best + 1)])
    refined = _golden_section_max(
        lambda mu: loglik_ilfr(graph, stats, mu), a, b, tol
    )
    # at a boundary maximum the slope is nonzero, so the exact bracket
    # endpoint can beat the interior estimate
    return max(
        (refined, a, b), key=lambda mu: loglik_ilfr(graph, stats, mu)
    )


# ---------------------------------------------------------------------------
# non-parametric forms (optimal parameters substituted back)


def loglik_ppm_nonparametric(stats):
    """PPM log-likelihood at its closed-form optimum."""
    if stats.P_in <= 0 or stats.P_out <= 0 or stats.m_in <= 0 or stats.m_out <= 0:
        raise DegeneratePartitionError("non-parametric ppm needs a mixed partition")
    return (
        stats.m_in * math.log(stats.m_in / stats.P_in)
        + stats.m_out * math.log(stats.m_out / stats.P_out)
        - stats.m
    )


def loglik_dcppm_nonparametric(graph, stats):
    """DCPPM log-likelihood at its closed-form optimum."""
    m = stats.m
    sum_sq = stats.sum_D_sq()
    rest = 4.0 * m * m - sum_sq
    if stats.m_in <= 0 or stats.m_out <= 0 or rest <= 0:
        raise DegeneratePartitionError("non-parametric dcppm needs a mixed partition")
    return (
        stats.m_in * math.log(stats.m_in * rest / (stats.m_out * sum_sq))
        - (stats.m_in - stats.m_out * sum_sq / rest)
        + stats.sum_dlogd
        + m * math.log(4.0 * m * stats.m_out / rest)
        - 4.0 * m * m * stats.m_out / rest
        - m * math.log(2.0 * m)
    )


def loglik_ilfrs_nonparametric(graph, stats):
    """Simplified likelihood with the closed-form mu substituted back."""
    return loglik_ilfrs(graph, stats, estimate_mu_ilfrs(stats))


# ---------------------------------------------------------------------------
# dispatch helpers


def evaluate(model, graph, stats):
    """Global quality of a partition (via its stats) under a fixed model."""
    if model.kind == "simple":
        return simple_modularity(stats, model.gamma)
    if model.kind == "modularity":
        return modularity(stats, model.gamma)
    if model.kind == "ppm":
        return loglik_ppm(stats, model.p_in, model.p_out)
    if model.kind == "dcppm":
        return loglik_dcppm(graph, stats, model.p_in, model.p_out)
    if model.kind == "ilfr":
        return loglik_ilfr(graph, stats, model.mu)
    return loglik_ilfrs(graph, stats, model.mu)


def estimate_params(graph, stats, kind):
    """Optimal parameters of one likelihood kind for a given partition."""
    if kind == "ppm":
        p_in, p_out = estimate_ppm(stats)
        try:
            g = gamma_ppm(p_in, p_out, stats.m, stats.P)
        except UndefinedGammaError:
            g = None
        return EstimatedParams(kind, p_in=p_in, p_out=p_out, gamma=g)
    if kind == "dcppm":
        p_in, p_out = estimate_dcppm(stats)
        try:
            g = gamma_dcppm(p_in, p_out)
        except UndefinedGammaError:
            g = None
        return EstimatedParams(kind, p_in=p_in, p_out=p_out, gamma=g)
    if kind == "ilfr":
        return EstimatedParams(kind, mu=estimate_mu_ilfr(graph, stats))
    if kind == "ilfrs":
        return EstimatedParams(kind, mu=estimate_mu_ilfrs(stats))
    raise ValueError(f"no estimator for model kind {kind!r}")


def loglik_at(graph, stats, params):
    """Log-likelihood of the partition at explicit EstimatedParams."""
    if params.kind == "ppm":
        return loglik_ppm(stats, params.p_in, params.p_out)
    if params.kind == "dcppm":
        return loglik_dcppm(graph, stats, params.p_in, params.p_out)
    if params.kind == "ilfr":
        return loglik_ilfr(graph, stats, params.mu)
    if params.kind == "ilfrs":
        return loglik_ilfrs(graph, stats, params.mu)
    raise ValueError(f"no likelihood for model kind {params.kind!r}")


# ---------------------------------------------------------------------------
# null-model degree structure


def expected_degrees(graph, partition, model):
    """Expected degree of every vertex under the model's edge rates."""
    if model.kind not in ("ppm", "dcppm", "ilfr"):
        raise ValueError(f"expected_degrees undefined for kind {model.kind!r}")
    norm = partition.normalize()
    assign = norm.assignment
    k = norm.k
    if model.kind == "ppm":
        counts = np.bincount(assign, minlength=k).astype(np.float64)
        same = counts[assign] - 1.0
        return same * model.p_in + (graph.n - 1.0 - same) * model.p_out

    deg = graph.degree
    two_m = float(deg.sum())
    D = np.zeros(k)
    np.add.at(D, assign, deg)
    if model.kind == "dcppm":
        return deg / two_m * (
            D[assign] * (model.p_in - model.p_out) + two_m * model.p_out
        )
    # ilfr: exact preservation, computed through the explicit rate sums
    mu = model.mu
    ratio = np.divide(
        D[assign], D[assign], out=np.zeros(graph.n), where=D[assign] > 0
    )
    return deg * ((1.0 - mu) * ratio + mu * two_m / two_m)


def sample_null_model(degrees, partition, model, seed):
    """Draw one multigraph from a null model (independent Poisson pair counts).

    ``degrees`` is the target degree sequence (ignored by ppm). Loops follow
    the half-rate convention of the degree-corrected models; the plain ppm
    has no loop rates. Returns a Graph whose integer edge weights are the
    sampled multiplicities.
    """
    if model.kind not in ("ppm", "dcppm", "ilfr"):
        raise ValueError(f"sample_null_model undefined for kind {model.kind!r}")
    deg = np.asarray(degrees, dtype=np.float64)
    n = deg.size
    norm = partition.normalize()
    assign = norm.assignment
    rng = np.random.default_rng(seed)

    same = assign[:, None] == assign[None, :]
    if model.kind == "ppm":
        rates = np.where(same, model.p_in, model.p_out).astype(np.float64)
        np.fill_diagonal(rates, 0.0)
    elif model.kind == "dcppm":
        two_m = float(deg.sum())
        dd = np.outer(deg, deg) / two_m
        rates = dd * np.where(same, model.p_in, model.p_out)
        np.fill_diagonal(rates, np.diag(rates) / 2.0)
    else:
        two_m = float(deg.sum())
        D = np.zeros(norm.k)
        np.add.at(D, assign, deg)
        dd = np.outer(deg, deg)
        inter = model.mu * dd / two_m
        with np.errstate(divide="ignore", invalid="ignore"):
            intra_comm = np.where(D > 0, (1.0 - model.mu) / D, 0.0)
        intra = dd * intra_comm[assign][:, None] + inter
        rates = np.where(same, intra, inter)
        np.fill_diagonal(rates, np.diag(rates) / 2.0)

    counts = rng.poisson(np.triu(rates))
    edges = []
    for u, v in zip(*np.nonzero(counts)):
        edges.append((int(u), int(v), float(counts[u, v])))
    return Graph(n, edges)

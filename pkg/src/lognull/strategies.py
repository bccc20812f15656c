"""Parameter-search strategies wrapping the multi-level optimizer.

Two strategies find the free parameter (resolution gamma for the planted
partition models, mixing mu for the degree-preserving ones):

* iterative - alternate optimization at a fixed parameter with closed-form
  (or numeric) re-estimation from the obtained partition, until the
  parameter converges, revisits an already seen value, or the iteration cap
  is reached;
* maximization - grid search over the fixed parameter, keeping the grid
  point whose partition attains the highest log-likelihood at its own
  optimal parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Partition, compute_stats
from .optimizer import louvain
from .models import (
    DegeneratePartitionError,
    EstimatedParams,
    QualityModel,
    estimate_params,
    loglik_at,
    param_floor,
)

LIKELIHOOD_KINDS = ("ppm", "dcppm", "ilfr", "ilfrs")

# quality optimized by the inner loop for each likelihood kind: the planted
# partition likelihoods at fixed parameters are equivalent to (simple)
# modularity at the matching resolution
_SURROGATE = {"ppm": "simple", "dcppm": "modularity"}


@dataclass
class IterativeConfig:
    max_iters: int = 50
    tol: float = 1e-4
    cycle_detection: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass
class GridConfig:
    gamma_grid: np.ndarray = field(
        default_factory=lambda: np.logspace(np.log10(0.1), np.log10(10.0), 40)
    )
    mu_grid: np.ndarray = field(
        default_factory=lambda: np.linspace(0.025, 0.975, 39)
    )
    seeds_per_point: int = 1

    def __post_init__(self):
        self.gamma_grid = np.asarray(self.gamma_grid, dtype=np.float64)
        self.mu_grid = np.asarray(self.mu_grid, dtype=np.float64)
        if self.gamma_grid.size == 0 or self.mu_grid.size == 0:
            raise ValueError("parameter grids must be non-empty")
        if (self.gamma_grid <= 0).any():
            raise ValueError("gamma grid must be positive")
        if ((self.mu_grid <= 0) | (self.mu_grid >= 1)).any():
            raise ValueError("mu grid must lie in (0, 1)")
        if self.seeds_per_point < 1:
            raise ValueError("seeds_per_point must be >= 1")


@dataclass
class StrategyResult:
    partition: Partition
    params: EstimatedParams
    loglik: float
    evaluations: int
    stop_reason: str
    best_loglik: float


def _fixed_model(kind, param, m):
    """Fixed-parameter quality optimized by the inner loop."""
    if kind in _SURROGATE:
        return QualityModel(_SURROGATE[kind], gamma=param)
    return QualityModel(kind, mu=param)


def _estimate(graph, stats, kind):
    """(params, loglik, was_clamped_to_degenerate) for one partition."""
    params = estimate_params(graph, stats, kind)
    return params, loglik_at(graph, stats, params)


def run_iterative(graph, kind, config=None, seed=0):
    """Alternate fixed-parameter optimization with parameter re-estimation.

    Starts at gamma = 1 (ppm, dcppm) or mu = 0.5 (ilfr, ilfrs). On a
    degenerate partition the parameters are clamped to the floor values and
    the loop continues; two consecutive degenerate estimates stop it.
    """
    if kind not in LIKELIHOOD_KINDS:
        raise ValueError(f"unknown likelihood kind {kind!r}")
    if config is None:
        config = IterativeConfig()
    if graph.m <= 0:
        raise ValueError("graph has no edges")

    param = 1.0 if kind in _SURROGATE else 0.5
    seen = set()
    eps = param_floor(graph.m)
    degenerate_streak = 0
    partition = None
    params = None
    loglik = None
    best_loglik = -np.inf
    stop = "max-iters"
    iterations = 0

    for it in range(1, config.max_iters + 1):
        iterations = it
        # the inner optimizer is deterministic within one run so that a
        # revisited parameter reproduces its partition and the cycle check
        # can fire on exact repeats
        model = _fixed_model(kind, param, graph.m)
        partition = louvain(graph, model, seed=seed)
        stats = compute_stats(graph, partition)
        try:
            params, loglik = _estimate(graph, stats, kind)
            param_new = params.gamma if kind in _SURROGATE else params.mu
        except DegeneratePartitionError:
            params = (
                EstimatedParams(kind, p_in=eps, p_out=eps, gamma=None)
                if kind in _SURROGATE
                else EstimatedParams(kind, mu=eps)
            )
            param_new = None
            loglik = None
        if param_new is None:  # degenerate, or p_in == p_out after clamping
            degenerate_streak += 1
            if degenerate_streak >= 2:
                stop = "converged-degenerate"
                break
            continue
        degenerate_streak = 0
        best_loglik = max(best_loglik, loglik if loglik is not None else -np.inf)
        if abs(param - param_new) < config.tol:
            stop = "converged"
            break
        if config.cycle_detection and round(param_new, 6) in seen:
            stop = "cycle"
            break
        seen.add(round(param_new, 6))
        param = param_new

    if loglik is None:
        loglik = -np.inf
    return StrategyResult(
        partition=partition,
        params=params,
        loglik=loglik,
        evaluations=iterations,
        stop_reason=stop,
        best_loglik=best_loglik,
    )


def run_maximization(graph, kind, grid=None, seed=0):
    """Grid search over the fixed parameter, maximizing the log-likelihood.

    Each grid point runs the optimizer at that fixed parameter, re-estimates
    the partition's own optimal parameters, and scores the partition by its
    log-likelihood at those parameters. Degenerate grid points are skipped;
    if every point is degenerate a RuntimeError is raised.
    """
    if kind not in LIKELIHOOD_KINDS:
        raise ValueError(f"unknown likelihood kind {kind!r}")
    if grid is None:
        grid = GridConfig()
    if graph.m <= 0:
        raise ValueError("graph has no edges")

    points = grid.gamma_grid if kind in _SURROGATE else grid.mu_grid
    best = None
    evaluations = 0
    for gi, value in enumerate(points):
        for rep in range(grid.seeds_per_point):
            evaluations += 1
            model = _fixed_model(kind, float(value), graph.m)
            partition = louvain(graph, model, seed=[seed, gi, rep])
            stats = compute_stats(graph, partition)
            try:
                params, loglik = _estimate(graph, stats, kind)
            except DegeneratePartitionError:
                continue
            if best is None or loglik > best[0]:
                best = (loglik, partition, params)
    if best is None:
        raise RuntimeError("no valid partition: all grid points degenerate")
    loglik, partition, params = best
    return StrategyResult(
        partition=partition,
        params=params,
        loglik=loglik,
        evaluations=evaluations,
        stop_reason="grid-exhausted",
        best_loglik=loglik,
    )

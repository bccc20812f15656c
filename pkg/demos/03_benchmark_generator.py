"""Generate synthetic benchmarks and sweep the mixing parameter.

Planted-partition benchmark graphs with power-law degrees and community
sizes: as the target mixing grows, communities blur and recovery degrades.
Every algorithm is scored against the planted partition by NMI.
"""

import numpy as np

import lognull as ln
from lognull.lfr import LfrConfig, generate

BASE = dict(
    n=1000, degree_exponent=2.5, mean_degree=30.0, size_exponent=1.5,
    s_min=50, s_max=200, d_max=250,
)

print("generator sanity at mu=0.2:")
graph, planted, info = generate(LfrConfig(mu_target=0.2, seed=1, **BASE))
print(f"  n={graph.n} m={graph.m:.0f} k={planted.k}")
print(f"  realized mixing {info.realized_mixing:.3f}, "
      f"mean degree {info.realized_mean_degree:.1f}, "
      f"dropped stub pairs {info.dropped_stub_pairs}")

print("\nmean NMI vs planted partition (3 seeds per cell):")
header = "mu    " + "".join(f"{kind + '-max':>11s}" for kind in ("ppm", "dcppm", "ilfr", "ilfrs"))
print(header)
for mu in (0.1, 0.3, 0.5, 0.7):
    row = f"{mu:.1f} "
    for kind in ("ppm", "dcppm", "ilfr", "ilfrs"):
        scores = []
        for seed in range(3):
            g, p, _ = generate(LfrConfig(mu_target=mu, seed=seed, **BASE))
            result = ln.run_maximization(g, kind, seed=seed)
            scores.append(ln.nmi(result.partition, p))
        row += f"{np.mean(scores):11.3f}"
    print(row)

print("\nhigh mixing hides the planted structure from the two-probability "
      "model first; the degree-preserving likelihoods hold on longest.")

"""Community detection by likelihood optimization over random-graph null models.

The package fits planted-partition style null models (PPM, its
degree-corrected variant, and a one-parameter degree-preserving model in
full and simplified form) to observed networks by maximizing the model
log-likelihood with a pluggable-quality multi-level local-move optimizer,
plus a power-law benchmark generator and partition-similarity metrics for
evaluation.
"""

from .graph import (
    Graph,
    GraphError,
    ParseError,
    Partition,
    PartitionStats,
    ValidationError,
    compute_stats,
    contract,
    load_edge_list,
    load_partition,
    write_edge_list,
    write_partition,
)
from .lfr import LfrConfig, LfrConfigError, LfrInfo, generate
from .optimizer import LouvainState, apply_move, louvain, move_gain
from .metrics import ConfusionCounts, confusion_counts, jaccard_index, nmi, rand_index
from .models import (
    DegeneratePartitionError,
    EstimatedParams,
    QualityModel,
    UndefinedGammaError,
    estimate_dcppm,
    estimate_mu_ilfr,
    estimate_mu_ilfrs,
    estimate_params,
    estimate_ppm,
    evaluate,
    expected_degrees,
    gamma_dcppm,
    gamma_ppm,
    loglik_at,
    loglik_dcppm,
    loglik_dcppm_nonparametric,
    loglik_ilfr,
    loglik_ilfrs,
    loglik_ilfrs_nonparametric,
    loglik_ppm,
    loglik_ppm_nonparametric,
    modularity,
    param_floor,
    sample_null_model,
    simple_modularity,
)
from .strategies import (
    GridConfig,
    IterativeConfig,
    StrategyResult,
    run_iterative,
    run_maximization,
)

__version__ = "0.1.0"

"""Rank-based neighborhood fidelity scores for low-dimensional embeddings.

The package measures how well an embedding preserves each case's nearest-
neighbor structure (four local rank correlations and their means), provides
reference reducers (PCA, Isomap, LTSA) and synthetic benchmark manifolds,
and turns the scores into decisions: choosing the comparison size J, tuning
a reducer's graph size K, and estimating intrinsic dimensionality.
"""

from .datasets import Dataset, ManifoldSpec, generate
from .errors import (
    DisconnectedGraphError,
    FormatError,
    LocalRankError,
    NumericalError,
    ValidationError,
)
from .geometry import NeighborhoodTable, build_neighborhoods, pairwise_distances, validate_data
from .matrixio import read_matrix, write_matrix
from .rankcorr import (
    MEASURES,
    AffineAdjustment,
    GoodnessScore,
    LocalScoreVector,
    TrimmedRanks,
    evaluate,
    fit_affine_adjustment,
    goodness,
    goodness_adjusted,
    local_rho_input,
    local_rho_output,
    local_scores,
    local_tau_input,
    local_tau_output,
    trimmed_ranks,
)
from .reducers import (
    Embedding,
    ReducerConfig,
    import_embedding,
    reduce,
    reduce_isomap,
    reduce_ltsa,
    reduce_pca,
)
from .sweeps import (
    SelectionResult,
    SweepCurve,
    select_dim,
    select_J,
    select_K,
    sweep_dim,
    sweep_J,
    sweep_K,
)

__version__ = "0.1.0"

__all__ = [
    "AffineAdjustment",
    "Dataset",
    "DisconnectedGraphError",
    "Embedding",
    "FormatError",
    "GoodnessScore",
    "LocalRankError",
    "LocalScoreVector",
    "ManifoldSpec",
    "MEASURES",
    "NeighborhoodTable",
    "NumericalError",
    "ReducerConfig",
    "SelectionResult",
    "SweepCurve",
    "TrimmedRanks",
    "ValidationError",
    "build_neighborhoods",
    "evaluate",
    "fit_affine_adjustment",
    "generate",
    "goodness",
    "goodness_adjusted",
    "import_embedding",
    "local_rho_input",
    "local_rho_output",
    "local_scores",
    "local_tau_input",
    "local_tau_output",
    "pairwise_distances",
    "read_matrix",
    "reduce",
    "reduce_isomap",
    "reduce_ltsa",
    "reduce_pca",
    "select_dim",
    "select_J",
    "select_K",
    "sweep_dim",
    "sweep_J",
    "sweep_K",
    "trimmed_ranks",
    "validate_data",
    "write_matrix",
]

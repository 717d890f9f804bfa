"""Robust regularized locality preserving indexing (RRLPI).

Fiedler vector estimation that is resistant to outlying samples, with the
LE, LPI and RLPI baselines, penalty selection, modularity-based cluster
enumeration and synthetic / image experiment pipelines.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .graph import AffinityGraph, cosine_affinity, edge_weight_errors, laplacian, typical_edge_weight
from .spectral import EigenDecomposition, EmbeddingVector, count_near_zero, eig_generalized, eig_sym, fiedler_le
from .estimators import estimate, fit_transform_vector, huber_psi, madn, robust_weights
from .penalty import GammaSearchConfig, estimate_fiedler_rrlpi, select_gamma
from .partition import align_labels, kmeans_1d, kmedoids_1d
from .enumeration import enumerate_clusters, modularity
from .metrics import f_score, jaccard, p_acc, p_det

__all__ = [
    "AffinityGraph",
    "cosine_affinity",
    "edge_weight_errors",
    "laplacian",
    "typical_edge_weight",
    "EigenDecomposition",
    "EmbeddingVector",
    "count_near_zero",
    "eig_generalized",
    "eig_sym",
    "fiedler_le",
    "estimate",
    "fit_transform_vector",
    "huber_psi",
    "madn",
    "robust_weights",
    "GammaSearchConfig",
    "estimate_fiedler_rrlpi",
    "select_gamma",
    "align_labels",
    "kmeans_1d",
    "kmedoids_1d",
    "enumerate_clusters",
    "modularity",
    "f_score",
    "jaccard",
    "p_acc",
    "p_det",
]

"""Modularity of a labelling and modularity-based choice of the cluster count."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyGraph
from .graph import AffinityGraph
from .partition import get_partitioner

__all__ = ["modularity", "enumerate_clusters", "EnumerationResult"]


def modularity(G: AffinityGraph, labels) -> float:
    """Newman modularity of ``labels`` on the weighted graph ``G``.

    Evaluated per community as ``in_c / 2g - (D_c / 2g)**2`` with ``D_c`` the
    summed degree and ``in_c = D_c - cut_c`` the internal weight, so that a
    single community scores exactly 0.
    """
    labels = np.asarray(labels).ravel()
    if labels.size != G.n:
        raise ValueError("label vector length differs from the number of vertices")
    two_g = float(G.d.sum())
    if two_g <= 0:
        raise EmptyGraph("graph has no edges")
    q = 0.0
    for lab in np.unique(labels):
        mask = labels == lab
        D_c = float(G.d[mask].sum())
        cut = float(G.W[np.ix_(mask, ~mask)].sum())
        q += (D_c - cut) / two_g - (D_c / two_g) ** 2
    return q


@dataclass(frozen=True)
class EnumerationResult:
    k_hat: int
    table: np.ndarray  # columns K, Q
    labels: np.ndarray  # labelling at k_hat


def enumerate_clusters(
    G: AffinityGraph, y, k_min: int = 1, k_max: int = 10, partitioner="kmeans"
) -> EnumerationResult:
    """Partition the embedding for each candidate K and keep the best modularity.

    Parameters
    ----------
    G : AffinityGraph
    y : array_like, shape (n,)
        One-dimensional embedding.
    k_min, k_max : int
        Inclusive candidate range.
    partitioner : str or callable
        ``"kmeans"``, ``"kmedoids"`` or ``f(points, K) -> labels``.

    Returns
    -------
    EnumerationResult
        Ties in modularity resolve to the smaller K.
    """
    if k_min < 1 or k_max < k_min:
        raise ValueError("need 1 <= k_min <= k_max")
    if k_max > G.n:
        raise ValueError("k_max exceeds the number of samples")
    part = get_partitioner(partitioner) if isinstance(partitioner, str) else partitioner
    rows = []
    best = (-np.inf, None, None)
    for K in range(k_min, k_max + 1):
        lab = np.asarray(part(y, K))
        q = modularity(G, lab)
        rows.append((K, q))
        if q > best[0]:
            best = (q, K, lab)
    return EnumerationResult(k_hat=int(best[1]), table=np.array(rows, dtype=float), labels=best[2])

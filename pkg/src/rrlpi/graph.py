"""Affinity graphs, Laplacians and the edge-weight error model."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, NotSymmetric, ZeroColumn

__all__ = [
    "AffinityGraph",
    "Laplacian",
    "check_data_matrix",
    "cosine_affinity",
    "graph_from_weights",
    "laplacian",
    "typical_edge_weight",
    "edge_weight_errors",
    "register_affinity",
    "get_affinity",
    "available_affinities",
    "build_graph",
]


@dataclass(frozen=True)
class AffinityGraph:
    """Symmetric nonnegative affinity matrix with its degree structure.

    Attributes
    ----------
    W : ndarray, shape (n, n)
        Edge weights, zero diagonal.
    d : ndarray, shape (n,)
        Overall edge weight (degree) of every vertex, ``d_i = sum_j w_ij``.
    d_typ : float
        Typical overall edge weight, the median of ``d``.
    g : float
        Half the total edge weight, ``0.5 * sum_ij w_ij``.
    """

    W: np.ndarray
    d: np.ndarray
    d_typ: float
    g: float

    @property
    def n(self) -> int:
        return self.W.shape[0]


@dataclass(frozen=True)
class Laplacian:
    L: np.ndarray
    d: np.ndarray

    @property
    def D(self) -> np.ndarray:
        return np.diag(self.d)


def check_data_matrix(X) -> np.ndarray:
    """Validate an ``m x n`` feature matrix (columns are samples)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch(f"data matrix must be 2-D, got shape {X.shape}")
    if X.shape[1] < 2:
        raise DimensionMismatch("need at least two samples (columns)")
    if not np.all(np.isfinite(X)):
        raise ValueError("data matrix contains non-finite entries")
    return X


def typical_edge_weight(d) -> float:
    """Median of the degree vector (mean of the two central values for even length)."""
    d = np.asarray(d, dtype=float)
    if d.size == 0:
        raise ValueError("degree vector is empty")
    return float(np.median(d))


def graph_from_weights(W, check: bool = True) -> AffinityGraph:
    """Wrap a precomputed affinity matrix, checking the graph invariants."""
    W = np.array(W, dtype=float) if check else W
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise DimensionMismatch(f"affinity matrix must be square, got {W.shape}")
    if check:
        if not np.array_equal(W, W.T):
            raise NotSymmetric("affinity matrix is not exactly symmetric")
        if np.any(W < 0):
            raise ValueError("affinity matrix has negative weights")
        if np.any(np.diag(W) != 0):
            raise ValueError("affinity matrix must have a zero diagonal")
    d = W.sum(axis=1)
    return AffinityGraph(W=W, d=d, d_typ=typical_edge_weight(d), g=0.5 * float(d.sum()))


def _mirror_upper(C, block: int = 1024):
    # copy the strict upper triangle onto the lower one, in place and blockwise
    # so that large matrices need no full-size temporaries
    n = C.shape[0]
    for b0 in range(0, n, block):
        b1 = min(n, b0 + block)
        D = C[b0:b1, b0:b1]
        U = np.triu(D, 1)
        C[b0:b1, b0:b1] = U + U.T
        if b1 < n:
            C[b1:, b0:b1] = C[b0:b1, b1:].T


def cosine_affinity(X) -> AffinityGraph:
    """Clamped cosine similarity between the columns of ``X``.

    ``w_ij = max(0, cos(x_i, x_j))`` for ``i != j`` and ``w_ii = 0``.
    """
    X = check_data_matrix(X)
    norms = np.linalg.norm(X, axis=0)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise ZeroColumn(int(zero[0]))
    Xn = X / norms
    W = Xn.T @ Xn
    np.clip(W, 0.0, 1.0, out=W)
    # gemm output is not bitwise symmetric
    _mirror_upper(W)
    return graph_from_weights(W, check=False)


def laplacian(G: AffinityGraph) -> Laplacian:
    L = -G.W.copy()
    L[np.diag_indices_from(L)] = G.d
    return Laplacian(L=L, d=G.d.copy())


def edge_weight_errors(G: AffinityGraph) -> np.ndarray:
    """Deviation of every degree from the typical degree, ``eps_i = d_i - d_typ``."""
    return G.d - G.d_typ


_AFFINITIES: dict[str, Callable[[np.ndarray], AffinityGraph]] = {}


def register_affinity(name: str):
    """Decorator registering an affinity constructor under ``name``."""

    def deco(fn):
        _AFFINITIES[name] = fn
        return fn

    return deco


register_affinity("cosine")(cosine_affinity)


def available_affinities() -> list[str]:
    return sorted(_AFFINITIES)


def get_affinity(name: str):
    try:
        return _AFFINITIES[name]
    except KeyError:
        raise KeyError(
            f"unknown affinity {name!r}; registered: {', '.join(available_affinities())}"
        ) from None


def build_graph(X, kind: str = "cosine") -> AffinityGraph:
    return get_affinity(kind)(X)

"""Fiedler vector estimators (LE, LPI, RLPI, RRLPI) and the robust kernel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, IsolatedVertex, SingularSystem
from .graph import AffinityGraph, edge_weight_errors
from .spectral import EmbeddingVector, fiedler_le, fix_sign

__all__ = [
    "HUBER_C",
    "MADN_CONST",
    "RobustFitState",
    "madn",
    "huber_psi",
    "robust_weights",
    "scale_floor",
    "robust_state",
    "fit_transform_vector",
    "lpi_beta",
    "le_fiedler",
    "estimate",
    "METHODS",
    "rrlpi_state",
]

HUBER_C = 1.345
MADN_CONST = 1.4826
LPI_RCOND = 1e-12
METHODS = ("le", "lpi", "rlpi", "rrlpi")


@dataclass(frozen=True)
class RobustFitState:
    """Result of one weighted ridge fit.

    Attributes
    ----------
    beta : ndarray, shape (m,)
        Transformation vector; the embedding is ``X.T @ beta``.
    gamma : float
        Penalty parameter.
    sigma_hat : float
        Robust scale of the edge-weight errors (MADN).
    epsilon : ndarray, shape (n,)
        Edge-weight errors ``d - d_typ``.
    omega : ndarray, shape (n,)
        Diagonal of the Huber weight matrix.
    huber_c : float
    """

    beta: np.ndarray
    gamma: float
    sigma_hat: float
    epsilon: np.ndarray
    omega: np.ndarray
    huber_c: float


def madn(eps) -> float:
    """Normalized median absolute deviation, ``1.4826 * med|eps - med(eps)|``."""
    eps = np.asarray(eps, dtype=float)
    if eps.size == 0:
        raise ValueError("madn of an empty vector")
    return MADN_CONST * float(np.median(np.abs(eps - np.median(eps))))


def huber_psi(u, c: float = HUBER_C):
    """Huber score function: identity on ``[-c, c]``, clipped outside."""
    if c <= 0:
        raise ValueError("Huber constant must be positive")
    return np.clip(u, -c, c)


def scale_floor(d_typ: float) -> float:
    return 1e-12 * (1.0 + abs(d_typ))


def robust_weights(eps, sigma_hat: float, c: float = HUBER_C, floor: float = 0.0) -> np.ndarray:
    """Huber weights ``psi(u)/u`` of the standardized errors ``u = eps/sigma_hat``.

    Zero residuals get weight 1. When ``sigma_hat <= floor`` every weight is 1.
    """
    if c <= 0:
        raise ValueError("Huber constant must be positive")
    eps = np.asarray(eps, dtype=float)
    if not sigma_hat > floor:
        return np.ones_like(eps)
    a = np.abs(eps / sigma_hat)
    w = np.ones_like(a)
    big = a > c
    w[big] = c / a[big]
    return w


def robust_state(G: AffinityGraph, c: float = HUBER_C):
    """Errors, robust scale, weights and the effective ridge scale of a graph.

    Returns
    -------
    eps, sigma_hat, omega, sigma2
        ``sigma2`` multiplies the penalty. It equals ``sigma_hat**2`` unless
        the scale has collapsed below the floor, in which case it is 1 and
        all weights are 1.
    """
    eps = edge_weight_errors(G)
    sigma = madn(eps)
    floor = scale_floor(G.d_typ)
    omega = robust_weights(eps, sigma, c, floor)
    sigma2 = sigma * sigma if sigma > floor else 1.0
    return eps, sigma, omega, sigma2


def fit_transform_vector(X, y, gamma: float, omega=None, sigma_hat: float = 1.0) -> np.ndarray:
    """Weighted ridge solve ``(X W X^T + gamma sigma^2 I) beta = X W y``.

    Parameters
    ----------
    X : ndarray, shape (m, n)
    y : ndarray, shape (n,)
    gamma : float
        Nonnegative penalty.
    omega : ndarray, shape (n,), optional
        Diagonal weights; defaults to ones.
    sigma_hat : float
        Scale multiplying the penalty as ``gamma * sigma_hat**2``.

    Raises
    ------
    SingularSystem
        If the system matrix is not positive definite.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    m, n = X.shape
    if y.shape != (n,):
        raise DimensionMismatch(f"y has shape {y.shape}, expected ({n},)")
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    omega = np.ones(n) if omega is None else np.asarray(omega, dtype=float)
    if omega.shape != (n,):
        raise DimensionMismatch(f"omega has shape {omega.shape}, expected ({n},)")
    XO = X * omega
    A = XO @ X.T
    A = 0.5 * (A + A.T)
    ridge = gamma * sigma_hat * sigma_hat
    A[np.diag_indices(m)] += ridge
    b = XO @ y
    try:
        cf = scipy.linalg.cho_factor(A, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"system matrix not positive definite: {exc}") from None
    piv = np.abs(np.diag(cf[0]))
    if ridge == 0 and piv.min() <= 1e-10 * max(piv.max(), np.finfo(float).tiny):
        raise SingularSystem("X Omega X^T is rank deficient and gamma * sigma^2 = 0")
    return scipy.linalg.cho_solve(cf, b, check_finite=False)


def lpi_beta(X, y, rcond: float = LPI_RCOND) -> np.ndarray:
    """Least-squares ``beta`` minimizing ``||X^T beta - y||`` by truncated SVD."""
    X = np.asarray(X, dtype=float)
    U, s, Vt = np.linalg.svd(X.T, full_matrices=False)
    keep = s > rcond * s[0]
    return Vt[keep].T @ ((U[:, keep].T @ y) / s[keep])


def le_fiedler(G: AffinityGraph, backend: str = "auto") -> EmbeddingVector:
    """Generalized-mode Fiedler vector, falling back to standard mode on isolated vertices."""
    try:
        return fiedler_le(G, "generalized", backend=backend)
    except IsolatedVertex:
        return fiedler_le(G, "standard", backend=backend)


def estimate(
    method: str,
    X,
    G: AffinityGraph,
    gamma: float | None = None,
    c: float = HUBER_C,
    y_F=None,
    force_identity: bool = False,
    backend: str = "auto",
) -> EmbeddingVector:
    """Estimate the Fiedler vector with one of the four methods.

    Parameters
    ----------
    method : {"le", "lpi", "rlpi", "rrlpi"}
    X : ndarray, shape (m, n)
        Features, one column per sample.
    G : AffinityGraph
        Graph built from ``X``.
    gamma : float, optional
        Penalty, required for ``rlpi`` and ``rrlpi``.
    c : float
        Huber tuning constant.
    y_F : ndarray, optional
        Precomputed LE Fiedler vector used as the regression target.
    force_identity : bool
        For ``rrlpi``, replace the Huber weights by ones.

    Returns
    -------
    EmbeddingVector
        ``y = X^T beta`` (or the eigenvector for LE), sign fixed so its
        largest-magnitude entry is positive.
    """
    method = method.lower()
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != G.n:
        raise DimensionMismatch(f"X has shape {X.shape} but graph has {G.n} vertices")
    if method == "le" and y_F is None:
        return le_fiedler(G, backend=backend)
    if y_F is None:
        y_F = le_fiedler(G, backend=backend).y
    y_F = np.asarray(y_F, dtype=float)
    if method == "le":
        return EmbeddingVector(y=fix_sign(y_F), eigenvalue=float("nan"), kind="LE")
    if method == "lpi":
        beta = lpi_beta(X, y_F)
        return EmbeddingVector(y=fix_sign(X.T @ beta), eigenvalue=float("nan"), kind="LPI")
    if gamma is None:
        raise ValueError(f"{method} requires gamma")
    _, sigma, omega, sigma2 = robust_state(G, c)
    if method == "rlpi" or force_identity:
        omega = np.ones(G.n)
    beta = fit_transform_vector(X, y_F, gamma, omega, np.sqrt(sigma2))
    return EmbeddingVector(
        y=fix_sign(X.T @ beta), eigenvalue=float("nan"), kind=method.upper(), gamma=float(gamma)
    )


def rrlpi_state(X, G: AffinityGraph, y_F, gamma: float, c: float = HUBER_C) -> RobustFitState:
    """Full robust fit state for inspection and diagnostics."""
    eps, sigma, omega, sigma2 = robust_state(G, c)
    beta = fit_transform_vector(X, y_F, gamma, omega, np.sqrt(sigma2))
    return RobustFitState(
        beta=beta, gamma=float(gamma), sigma_hat=sigma, epsilon=eps, omega=omega, huber_c=c
    )

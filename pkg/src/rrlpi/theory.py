"""Closed-form spectra of small block graphs and related numerical checks.

These serve as independent oracles for the eigensolvers and estimators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation, RankDeficient
from .graph import graph_from_weights, laplacian
from .spectral import count_near_zero, eig_generalized, eig_sym

__all__ = [
    "two_block_weights",
    "corrupted_block_weights",
    "block_diagonal_weights",
    "uncorrelated_block_eigs",
    "corrupted_block_eigs",
    "PinvCheck",
    "weighted_pinv_check",
    "constant_deviation",
    "isolated_sample_check",
    "outlier_collapse_sweep",
    "run_all",
]


def two_block_weights(w1: float, w2: float) -> np.ndarray:
    """Two disconnected pairs with internal weights ``w1`` and ``w2``."""
    W = np.zeros((4, 4))
    W[0, 1] = W[1, 0] = w1
    W[2, 3] = W[3, 2] = w2
    return W


def corrupted_block_weights(w1: float, w2: float, wu: float) -> np.ndarray:
    """Two pairs joined by a uniform cross weight ``wu``."""
    W = two_block_weights(w1, w2)
    W[:2, 2:] = wu
    W[2:, :2] = wu
    return W


def block_diagonal_weights(sizes, weights) -> np.ndarray:
    """Complete blocks of constant weight; a block of size 1 is isolated."""
    n = int(sum(sizes))
    W = np.zeros((n, n))
    i = 0
    for sz, w in zip(sizes, weights):
        W[i : i + sz, i : i + sz] = w
        i += sz
    np.fill_diagonal(W, 0.0)
    return W


def uncorrelated_block_eigs(w1: float, w2: float, mode: str = "generalized") -> np.ndarray:
    if w1 <= 0 or w2 <= 0:
        raise DomainViolation("block weights must be positive")
    if mode == "generalized":
        return np.array([0.0, 0.0, 2.0, 2.0])
    if mode == "standard":
        return np.sort([0.0, 0.0, 2 * w1, 2 * w2])
    raise ValueError(f"unknown mode {mode!r}")


def corrupted_block_eigs(w1: float, w2: float, wu: float, mode: str = "generalized") -> np.ndarray:
    """Spectrum of the corrupted two-pair graph, sorted ascending.

    Requires ``0 < wu < min(w1, w2)`` and ``w1 != w2``.
    """
    if not (0 < wu < min(w1, w2)) or w1 == w2:
        raise DomainViolation("need 0 < wu < min(w1, w2) and w1 != w2")
    if mode == "generalized":
        lam1 = 2 * (w1 * wu + w2 * wu + 4 * wu * wu) / ((w1 + 2 * wu) * (w2 + 2 * wu))
        vals = [0.0, lam1, 2 * (w2 + wu) / (w2 + 2 * wu), 2 * (w1 + wu) / (w1 + 2 * wu)]
    elif mode == "standard":
        vals = [0.0, 4 * wu, 2 * w2 + 2 * wu, 2 * w1 + 2 * wu]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return np.sort(vals)


@dataclass(frozen=True)
class PinvCheck:
    passed: bool
    residuals: tuple  # relative Frobenius residual of each condition
    max_residual: float


def _psd_sqrt(M):
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        if np.any(M <= 0):
            raise DomainViolation("weight matrix must be positive definite")
        return np.diag(np.sqrt(M)), np.diag(1 / np.sqrt(M)), np.diag(M)
    lam, Q = np.linalg.eigh(0.5 * (M + M.T))
    if np.any(lam <= 0):
        raise DomainViolation("weight matrix must be positive definite")
    return (Q * np.sqrt(lam)) @ Q.T, (Q / np.sqrt(lam)) @ Q.T, M


def weighted_pinv_check(X, omega, psi=None, tol: float = 1e-8) -> PinvCheck:
    """Verify the four weighted Moore-Penrose conditions.

    A weighted SVD ``X = U S V^T`` with ``U^T Psi U = I`` and
    ``V^T Omega V = I`` is built from the ordinary SVD of
    ``Psi^1/2 X Omega^1/2``. With ``A = X Omega`` and
    ``B = V S^-1 U^T Psi`` the conditions are ``ABA = A``, ``BAB = B`` and
    symmetry of ``Psi A B`` and ``Omega B A``.

    Parameters
    ----------
    X : ndarray, shape (m, n)
    omega : ndarray, shape (n,) or (n, n)
        Positive weights (diagonal) or a positive-definite matrix.
    psi : ndarray, shape (m,) or (m, m), optional
        Defaults to the identity.
    """
    X = np.asarray(X, dtype=float)
    m, n = X.shape
    psi = np.ones(m) if psi is None else psi
    Wo, Wo_inv, Om = _psd_sqrt(omega)
    Wp, Wp_inv, Ps = _psd_sqrt(psi)
    P, s, Qt = np.linalg.svd(Wp @ X @ Wo, full_matrices=False)
    if s[-1] <= 1e-12 * s[0]:
        raise RankDeficient("X is rank deficient")
    U = Wp_inv @ P
    V = Wo_inv @ Qt.T
    A = X @ Om
    B = (V / s) @ U.T @ Ps
    AB = Ps @ A @ B
    BA = Om @ B @ A

    def rel(E, R):
        return float(np.linalg.norm(E) / max(np.linalg.norm(R), np.finfo(float).tiny))

    res = (
        rel(A @ B @ A - A, A),
        rel(B @ A @ B - B, B),
        rel(AB.T - AB, AB),
        rel(BA.T - BA, BA),
    )
    mx = max(res)
    return PinvCheck(passed=mx <= tol, residuals=res, max_residual=mx)


def constant_deviation(v) -> float:
    """Largest deviation from the mean of the unit-normalized vector ``v``."""
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    return float(np.max(np.abs(v - v.mean())))


def isolated_sample_check(W, n_out: int, tol: float = 1e-8, mode: str = "standard"):
    """Near-zero eigenvalue counts before and after appending isolated samples.

    Returns
    -------
    before, after : int
    """
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    Wa = np.zeros((n + n_out, n + n_out))
    Wa[:n, :n] = W
    lam0 = eig_sym(laplacian(graph_from_weights(W)).L).eigenvalues
    lam1 = eig_sym(laplacian(graph_from_weights(Wa)).L).eigenvalues
    return count_near_zero(lam0, tol), count_near_zero(lam1, tol)


def outlier_collapse_sweep(n_a: int = 5, n_b: int = 7, w_a: float = 0.9, w_b: float = 0.8, steps: int = 12):
    """Inter-block distance of null-space embeddings as the outlier entry grows.

    For two complete blocks and one isolated sample, every unit vector
    ``y = a 1_A + b 1_B + t e_o`` orthogonal to the constant vector lies in
    the Laplacian null space. As the outlier coordinate ``t`` approaches its
    largest admissible value the block coordinates merge.

    Returns
    -------
    t : ndarray
        Outlier coordinates.
    dist : ndarray
        ``|a - b|`` for each ``t``.
    residual : float
        Largest ``||L y||`` over the sweep (null-space certificate).
    """
    n = n_a + n_b + 1
    W = block_diagonal_weights([n_a, n_b, 1], [w_a, w_b, 0.0])
    L = laplacian(graph_from_weights(W)).L
    t_max = np.sqrt((n - 1) / n)
    ts = np.linspace(0.0, t_max, steps)
    dist = np.empty(steps)
    res = 0.0
    for k, t in enumerate(ts):
        qa = n_a + n_a * n_a / n_b
        qb = 2 * t * n_a / n_b
        qc = t * t / n_b - (1 - t * t)
        a = (-qb + np.sqrt(max(qb * qb - 4 * qa * qc, 0.0))) / (2 * qa)
        b = -(t + n_a * a) / n_b
        y = np.r_[np.full(n_a, a), np.full(n_b, b), t]
        dist[k] = abs(a - b)
        res = max(res, float(np.linalg.norm(L @ y)))
    return ts, dist, res


def run_all(n_random: int = 200, seed: int = 0, tol: float = 1e-8):
    """Evaluate every oracle and return rows ``(check, value, tolerance, passed)``."""
    rng = np.random.default_rng(seed)
    rows = []

    worst_g = worst_s = 0.0
    for _ in range(n_random):
        w1, w2 = rng.uniform(0.05, 1.0, 2)
        while w1 == w2:
            w2 = rng.uniform(0.05, 1.0)
        wu = rng.uniform(0.0, min(w1, w2) / 2)
        Lap = laplacian(graph_from_weights(corrupted_block_weights(w1, w2, wu)))
        lg = eig_generalized(Lap).eigenvalues
        ls = eig_sym(Lap.L).eigenvalues
        worst_g = max(worst_g, float(np.max(np.abs(lg - corrupted_block_eigs(w1, w2, wu, "generalized")))))
        worst_s = max(worst_s, float(np.max(np.abs(ls - corrupted_block_eigs(w1, w2, wu, "standard")))))
    rows.append(("corrupted_block_generalized", worst_g, tol, worst_g <= tol))
    rows.append(("corrupted_block_standard", worst_s, tol, worst_s <= tol))

    Lap = laplacian(graph_from_weights(two_block_weights(0.9, 0.8)))
    e = float(np.max(np.abs(eig_generalized(Lap).eigenvalues - uncorrelated_block_eigs(0.9, 0.8))))
    rows.append(("uncorrelated_block_generalized", e, tol, e <= tol))
    e = float(np.max(np.abs(eig_sym(Lap.L).eigenvalues - uncorrelated_block_eigs(0.9, 0.8, "standard"))))
    rows.append(("uncorrelated_block_standard", e, tol, e <= tol))

    Lap = laplacian(graph_from_weights(corrupted_block_weights(0.9, 0.8, 0.1)))
    dev = max(
        constant_deviation(eig_sym(Lap.L).eigenvectors[:, 0]),
        constant_deviation(eig_generalized(Lap).eigenvectors[:, 0]),
    )
    rows.append(("smallest_eigenvector_constant", dev, tol, dev <= tol))

    bad = 0
    for _ in range(50):
        k = int(rng.integers(1, 4))
        sizes = rng.integers(2, 8, size=k)
        W = block_diagonal_weights(sizes, rng.uniform(0.1, 1.0, size=k))
        n_o = int(rng.integers(1, 5))
        before, after = isolated_sample_check(W, n_o, tol)
        bad += after - before != n_o
    rows.append(("isolated_samples_add_zero_eigenvalues", float(bad), 0.0, bad == 0))

    worst = 0.0
    for _ in range(50):
        m, n = int(rng.integers(2, 6)), int(rng.integers(6, 12))
        chk = weighted_pinv_check(rng.standard_normal((m, n)), rng.uniform(0.1, 2.0, n), rng.uniform(0.1, 2.0, m), tol)
        worst = max(worst, chk.max_residual)
    rows.append(("weighted_pseudoinverse_conditions", worst, tol, worst <= tol))

    _, dist, res = outlier_collapse_sweep()
    mono = bool(np.all(np.diff(dist) < 0)) and dist[-1] <= 1e-8 and res <= tol
    rows.append(("outlier_collapses_block_distance", float(dist[-1]), tol, mono))
    return rows

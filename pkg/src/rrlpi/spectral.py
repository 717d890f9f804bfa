"""Dense symmetric eigen-decomposition and Fiedler vector extraction.

The default solver is a Householder tridiagonalization followed by implicit
QL iterations with shifts, compiled with numba. A LAPACK backend (via numpy)
is available for large matrices such as downsampled images.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numba
import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .errors import DegenerateSpectrumWarning, IsolatedVertex, NoConvergence, NotSymmetric
from .graph import AffinityGraph, Laplacian, laplacian

__all__ = [
    "EigenDecomposition",
    "EmbeddingVector",
    "SYMMETRY_TOL",
    "DEGREE_FLOOR",
    "TIE_TOL",
    "eig_sym",
    "eig_generalized",
    "fiedler_le",
    "fix_sign",
    "count_near_zero",
]

SYMMETRY_TOL = 1e-10
DEGREE_FLOOR = 1e-12
TIE_TOL = 1e-9
QL_MAX_ITER = 60
AUTO_QL_MAX_N = 1000
AUTO_DENSE_MAX_N = 2000


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues with unit-norm eigenvectors stored as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    generalized: bool = False


@dataclass(frozen=True)
class EmbeddingVector:
    """One-dimensional embedding of the samples.

    ``kind`` is one of ``"LE"``, ``"LPI"``, ``"RLPI"``, ``"RRLPI"``. For LE the
    eigenvalue is the Laplacian eigenvalue paired with ``y``; for the
    regression estimators it is ``nan``.
    """

    y: np.ndarray
    eigenvalue: float
    kind: str
    gamma: float | None = None


# ---------------------------------------------------------------------------
# numba kernels


@numba.njit(cache=True)
def _tred2(V, d, e):
    # Householder reduction to tridiagonal form; V holds A on entry and the
    # accumulated orthogonal transform on exit.
    n = V.shape[0]
    for j in range(n):
        d[j] = V[n - 1, j]
    for i in range(n - 1, 0, -1):
        scale = 0.0
        h = 0.0
        for k in range(i):
            scale += abs(d[k])
        if scale == 0.0:
            e[i] = d[i - 1]
            for j in range(i):
                d[j] = V[i - 1, j]
                V[i, j] = 0.0
                V[j, i] = 0.0
        else:
            for k in range(i):
                d[k] /= scale
                h += d[k] * d[k]
            f = d[i - 1]
            g = np.sqrt(h)
            if f > 0:
                g = -g
            e[i] = scale * g
            h = h - f * g
            d[i - 1] = f - g
            for j in range(i):
                e[j] = 0.0
            for j in range(i):
                f = d[j]
                V[j, i] = f
                g = e[j] + V[j, j] * f
                for k in range(j + 1, i):
                    g += V[k, j] * d[k]
                    e[k] += V[k, j] * f
                e[j] = g
            f = 0.0
            for j in range(i):
                e[j] /= h
                f += e[j] * d[j]
            hh = f / (h + h)
            for j in range(i):
                e[j] -= hh * d[j]
            for j in range(i):
                f = d[j]
                g = e[j]
                for k in range(j, i):
                    V[k, j] -= f * e[k] + g * d[k]
                d[j] = V[i - 1, j]
                V[i, j] = 0.0
        d[i] = h

    for i in range(n - 1):
        V[n - 1, i] = V[i, i]
        V[i, i] = 1.0
        h = d[i + 1]
        if h != 0.0:
            for k in range(i + 1):
                d[k] = V[k, i + 1] / h
            for j in range(i + 1):
                g = 0.0
                for k in range(i + 1):
                    g += V[k, i + 1] * V[k, j]
                for k in range(i + 1):
                    V[k, j] -= g * d[k]
        for k in range(i + 1):
            V[k, i + 1] = 0.0
    for j in range(n):
        d[j] = V[n - 1, j]
        V[n - 1, j] = 0.0
    V[n - 1, n - 1] = 1.0
    e[0] = 0.0


@numba.njit(cache=True)
def _tql2(Z, d, e, max_iter):
    # Implicit QL on the tridiagonal (d, e). Z is the transposed eigenvector
    # matrix so that each plane rotation touches two contiguous rows.
    # Returns 0 on success, otherwise the iteration count reached.
    n = d.shape[0]
    for i in range(1, n):
        e[i - 1] = e[i]
    e[n - 1] = 0.0
    f = 0.0
    tst1 = 0.0
    eps = 2.0 ** -52
    for l in range(n):
        tst1 = max(tst1, abs(d[l]) + abs(e[l]))
        m = l
        while m < n - 1:
            if abs(e[m]) <= eps * tst1:
                break
            m += 1
        if m > l:
            it = 0
            while True:
                it += 1
                if it > max_iter:
                    return it
                g = d[l]
                p = (d[l + 1] - g) / (2.0 * e[l])
                r = np.hypot(p, 1.0)
                if p < 0:
                    r = -r
                d[l] = e[l] / (p + r)
                d[l + 1] = e[l] * (p + r)
                dl1 = d[l + 1]
                h = g - d[l]
                for i in range(l + 2, n):
                    d[i] -= h
                f += h
                p = d[m]
                c = 1.0
                c2 = c
                c3 = c
                el1 = e[l + 1]
                s = 0.0
                s2 = 0.0
                for i in range(m - 1, l - 1, -1):
                    c3 = c2
                    c2 = c
                    s2 = s
                    g = c * e[i]
                    h = c * p
                    r = np.hypot(p, e[i])
                    e[i + 1] = s * r
                    s = e[i] / r
                    c = p / r
                    p = c * d[i] - s * g
                    d[i + 1] = h + s * (c * g + s * d[i])
                    for k in range(n):
                        h = Z[i + 1, k]
                        Z[i + 1, k] = s * Z[i, k] + c * h
                        Z[i, k] = c * Z[i, k] - s * h
                p = -s * s2 * c3 * el1 * e[l] / dl1
                e[l] = s * p
                d[l] = c * p
                if abs(e[l]) <= eps * tst1:
                    break
        d[l] = d[l] + f
        e[l] = 0.0
    return 0


def _eig_ql(A):
    n = A.shape[0]
    V = np.array(A, dtype=np.float64, order="C")
    d = np.empty(n)
    e = np.empty(n)
    if n == 1:
        return np.array([A[0, 0]], dtype=float), np.ones((1, 1))
    _tred2(V, d, e)
    Z = np.ascontiguousarray(V.T)
    status = _tql2(Z, d, e, QL_MAX_ITER)
    if status:
        raise NoConvergence(status)
    order = np.argsort(d, kind="stable")
    return d[order], np.ascontiguousarray(Z[order].T)


def _check_symmetric(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSymmetric(f"matrix must be square, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    asym = float(np.max(np.abs(A - A.T))) if A.size else 0.0
    if asym > SYMMETRY_TOL * scale:
        raise NotSymmetric(f"max |A - A^T| = {asym:.3e} exceeds tolerance")
    return 0.5 * (A + A.T)


def eig_sym(A, backend: str = "auto") -> EigenDecomposition:
    """Full eigen-decomposition of a symmetric matrix.

    Parameters
    ----------
    A : array_like, shape (n, n)
        Symmetric matrix (asymmetry up to ``1e-10`` relative is averaged out).
    backend : {"auto", "ql", "lapack"}
        ``"ql"`` uses the compiled Householder/QL solver, ``"lapack"`` defers
        to :func:`numpy.linalg.eigh`. ``"auto"`` picks QL for ``n <= 1000``.

    Returns
    -------
    EigenDecomposition
        Eigenvalues ascending, eigenvectors as unit-norm columns.
    """
    A = _check_symmetric(A)
    n = A.shape[0]
    if backend == "auto":
        backend = "ql" if n <= AUTO_QL_MAX_N else "lapack"
    if backend == "ql":
        lam, V = _eig_ql(A)
    elif backend == "lapack":
        lam, V = np.linalg.eigh(A)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return EigenDecomposition(eigenvalues=lam, eigenvectors=V)


def _normalized_operator(Lap: Laplacian):
    d = np.asarray(Lap.d, dtype=float)
    dmax = float(d.max()) if d.size else 0.0
    low = np.flatnonzero(d <= DEGREE_FLOOR * dmax) if dmax > 0 else np.arange(d.size)
    if low.size:
        raise IsolatedVertex(int(low[0]))
    s = 1.0 / np.sqrt(d)
    N = Lap.L * s[:, None] * s[None, :]
    return 0.5 * (N + N.T), s


def eig_generalized(Lap: Laplacian, backend: str = "auto") -> EigenDecomposition:
    """Solve ``L y = lambda D y`` through the normalized Laplacian.

    The symmetric problem ``D^-1/2 L D^-1/2 v = lambda v`` is solved and each
    ``y = D^-1/2 v`` is rescaled to unit Euclidean norm.

    Raises
    ------
    IsolatedVertex
        If a degree is at most ``1e-12 * max(d)``.
    """
    N, s = _normalized_operator(Lap)
    dec = eig_sym(N, backend=backend)
    Y = dec.eigenvectors * s[:, None]
    Y /= np.linalg.norm(Y, axis=0)
    return EigenDecomposition(eigenvalues=dec.eigenvalues, eigenvectors=Y, generalized=True)


def fix_sign(y) -> np.ndarray:
    """Flip ``y`` so that its entry of largest magnitude is positive."""
    y = np.asarray(y, dtype=float)
    if y.size and y[np.argmax(np.abs(y))] < 0:
        return -y
    return y.copy()


def _canonical_null_direction(V, trivial):
    # Within a tied low cluster the eigenbasis is arbitrary. Remove the
    # trivial direction and keep the dominant remaining direction.
    t = trivial / np.linalg.norm(trivial)
    R = V - np.outer(t, t @ V)
    U, sv, _ = np.linalg.svd(R, full_matrices=False)
    return U[:, 0]


def _fiedler_partial(G: AffinityGraph, mode: str, k: int = 3):
    # Lowest k eigenpairs by Lanczos on the dense weights, avoiding the
    # full-size Laplacian copies of the dense path.
    W, d = G.W, G.d
    n = G.n
    v0 = np.linspace(1.0, 2.0, n)
    if mode == "generalized":
        dmax = float(d.max())
        low = np.flatnonzero(d <= DEGREE_FLOOR * dmax) if dmax > 0 else np.arange(n)
        if low.size:
            raise IsolatedVertex(int(low[0]))
        s = 1.0 / np.sqrt(d)
        op = LinearOperator((n, n), matvec=lambda v: s * (W @ (s * v.ravel())), dtype=float)
        mu, V = eigsh(op, k=k, which="LA", v0=v0, tol=1e-12)
        lam = 1.0 - mu
        trivial = 1.0 / s
    else:
        s = None
        shift = 2.0 * float(d.max())
        op = LinearOperator((n, n), matvec=lambda v: shift * v.ravel() - (d * v.ravel() - W @ v.ravel()),
                            dtype=float)
        mu, V = eigsh(op, k=k, which="LA", v0=v0, tol=1e-12)
        lam = shift - mu
        trivial = np.ones(n)
    order = np.argsort(lam, kind="stable")
    return lam[order], V[:, order], s, trivial


def fiedler_le(G: AffinityGraph, mode: str = "generalized", backend: str = "auto") -> EmbeddingVector:
    """Laplacian-eigenmap Fiedler vector.

    Parameters
    ----------
    G : AffinityGraph
    mode : {"generalized", "standard"}
        Solve ``L y = lambda D y`` or ``L y = lambda y``.
    backend : {"auto", "ql", "lapack", "lanczos"}
        Dense solvers compute the full spectrum. ``"lanczos"`` computes only
        the three lowest pairs and is chosen by ``"auto"`` above 2000
        vertices, where dense copies of the Laplacian become costly.

    Returns
    -------
    EmbeddingVector
        Eigenvector of the second smallest eigenvalue, unit norm, with the
        largest-magnitude entry positive.

    Warns
    -----
    DegenerateSpectrumWarning
        If the second and third smallest eigenvalues coincide.
    """
    n = G.n
    if n < 2:
        raise ValueError("need at least two vertices")
    if mode not in ("generalized", "standard"):
        raise ValueError(f"unknown mode {mode!r}")
    if backend == "auto" and n > AUTO_DENSE_MAX_N:
        backend = "lanczos"
    if backend == "lanczos" and n > 4:
        lam, V, s, trivial = _fiedler_partial(G, mode)
    else:
        backend = "auto" if backend == "lanczos" else backend
        Lap = laplacian(G)
        if mode == "generalized":
            N, s = _normalized_operator(Lap)
            dec = eig_sym(N, backend=backend)
            trivial = 1.0 / s
        else:
            dec = eig_sym(Lap.L, backend=backend)
            s = None
            trivial = np.ones(n)
        lam, V = dec.eigenvalues, dec.eigenvectors

    tol = TIE_TOL * max(float(np.max(np.abs(lam))), np.finfo(float).tiny)
    if lam.size > 2 and abs(lam[2] - lam[1]) <= tol:
        warnings.warn(
            f"second and third eigenvalues tie ({lam[1]:.3e}, {lam[2]:.3e}); "
            "Fiedler vector is not unique",
            DegenerateSpectrumWarning,
            stacklevel=2,
        )
    if abs(lam[1] - lam[0]) <= tol:
        cluster = np.flatnonzero(lam - lam[0] <= tol)
        v = _canonical_null_direction(V[:, cluster], trivial)
    else:
        v = V[:, 1]
    if s is not None:
        v = v * s
    v = v / np.linalg.norm(v)
    return EmbeddingVector(y=fix_sign(v), eigenvalue=float(lam[1]), kind="LE")


def count_near_zero(lam, tol: float = 1e-8) -> int:
    """Number of eigenvalues not exceeding ``tol``."""
    return int(np.count_nonzero(np.asarray(lam) <= tol))

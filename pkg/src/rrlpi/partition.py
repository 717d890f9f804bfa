"""One-dimensional K-means / K-medoids and label alignment."""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import KTooLarge, TooFewPoints
from .estimators import madn

__all__ = [
    "kmeans_1d",
    "kmedoids_1d",
    "tukey_rho",
    "align_labels",
    "get_partitioner",
    "PARTITIONERS",
]

KMEANS_TOL = 1e-10
KMEANS_MAX_ITER = 300
EXHAUSTIVE_MAX_K = 8
ALIGN_MAX_K = 12


def _check(points, K):
    p = np.asarray(points, dtype=float).ravel()
    if K < 1:
        raise ValueError("K must be at least 1")
    if p.size < K:
        raise TooFewPoints(f"{p.size} points cannot form {K} clusters")
    return p


def kmeans_1d(points, K: int) -> np.ndarray:
    """Lloyd's algorithm on a line with quantile initialization.

    Parameters
    ----------
    points : array_like, shape (n,)
    K : int

    Returns
    -------
    ndarray of int, shape (n,)
        Labels in ``1..K``.
    """
    p = _check(points, K)
    c = np.quantile(p, (np.arange(K) + 0.5) / K)
    for _ in range(KMEANS_MAX_ITER):
        lab = np.argmin(np.abs(p[:, None] - c[None, :]), axis=1)
        counts = np.bincount(lab, minlength=K)
        sums = np.bincount(lab, weights=p, minlength=K)
        new = c.copy()
        nz = counts > 0
        new[nz] = sums[nz] / counts[nz]
        for k in np.flatnonzero(~nz):
            # reseed an empty cluster at the point farthest from its centroid
            far = int(np.argmax(np.abs(p - new[lab])))
            new[k] = p[far]
            lab[far] = k
        shift = np.max(np.abs(new - c))
        c = new
        if shift < KMEANS_TOL:
            break
    lab = np.argmin(np.abs(p[:, None] - c[None, :]), axis=1)
    return lab + 1


def tukey_rho(u, c: float = 3.0):
    """Tukey biweight loss, saturating at ``c**2 / 6`` for ``|u| >= c``."""
    u = np.asarray(u, dtype=float)
    r = np.minimum(np.abs(u) / c, 1.0)
    return c * c / 6.0 * (1.0 - (1.0 - r * r) ** 3)


def _robust_init(p, K, tukey_c):
    n = p.size
    D = np.abs(p[:, None] - p[None, :])
    scale = madn(p)
    if scale <= 0:
        scale = float(np.mean(np.abs(p - np.median(p))))
    if scale <= 0:
        scale = 1.0
    R = tukey_rho(D / scale, tukey_c)
    agg = R.sum(axis=1)
    medoids = [int(np.argmin(agg))]
    chosen = np.zeros(n, dtype=bool)
    chosen[medoids[0]] = True
    for _ in range(1, K):
        near = R[:, medoids].min(axis=1)
        near[chosen] = -np.inf
        # lexsort: last key is primary
        order = np.lexsort((np.arange(n), agg, -near))
        nxt = int(order[0])
        medoids.append(nxt)
        chosen[nxt] = True
    return medoids, D


def kmedoids_1d(points, K: int, tukey_c: float = 3.0) -> np.ndarray:
    """PAM K-medoids on a line with a Tukey-biweight initialization.

    The first medoid minimizes the summed biweight loss of the
    MADN-standardized distances to all points; further medoids are added
    farthest-first under the same loss. Swaps then minimize the total
    absolute deviation.

    Returns
    -------
    ndarray of int, shape (n,)
        Labels in ``1..K`` ordered by medoid position.
    """
    p0 = _check(points, K)
    order = np.argsort(p0, kind="stable")
    p = p0[order]
    medoids, D = _robust_init(p, K, tukey_c)
    med = np.array(medoids)
    cost = D[:, med].min(axis=1).sum()
    n = p.size
    while True:
        best = (cost, -1, -1)
        for k in range(K):
            others = np.delete(med, k)
            base = D[:, others].min(axis=1) if others.size else np.full(n, np.inf)
            cand = np.minimum(base[:, None], D).sum(axis=0)
            cand[med] = np.inf
            h = int(np.argmin(cand))
            if cand[h] < best[0] - 1e-12 * max(1.0, cost):
                best = (cand[h], k, h)
        if best[1] < 0:
            break
        med[best[1]] = best[2]
        cost = best[0]
    med = np.sort(med)
    lab_sorted = np.argmin(D[:, med], axis=1) + 1
    labels = np.empty(n, dtype=int)
    labels[order] = lab_sorted
    return labels


PARTITIONERS = {"kmeans": kmeans_1d, "kmedoids": kmedoids_1d}


def get_partitioner(name: str):
    try:
        return PARTITIONERS[name]
    except KeyError:
        raise KeyError(f"unknown partitioner {name!r}; choose from {sorted(PARTITIONERS)}") from None


def align_labels(c_hat, c):
    """Relabel ``c_hat`` to agree best with ``c``.

    Exhaustive over permutations for up to 8 labels, optimal assignment on
    the confusion matrix for 9 to 12.

    Returns
    -------
    mapped : ndarray
        ``c_hat`` expressed in the labels of ``c``. Estimated labels left
        without a partner receive fresh values above ``max(c)``.
    accuracy : float
        Fraction of matching entries after relabeling.
    """
    c_hat = np.asarray(c_hat).ravel()
    c = np.asarray(c).ravel()
    if c_hat.shape != c.shape:
        raise ValueError("label vectors differ in length")
    if c.size == 0:
        return c_hat.copy(), 1.0
    est_u, est_inv = np.unique(c_hat, return_inverse=True)
    true_u, true_inv = np.unique(c, return_inverse=True)
    K = max(est_u.size, true_u.size)
    if K > ALIGN_MAX_K:
        raise KTooLarge(f"{K} labels exceed the alignment limit of {ALIGN_MAX_K}")
    C = np.zeros((K, K), dtype=np.int64)
    np.add.at(C, (est_inv, true_inv), 1)
    if K <= EXHAUSTIVE_MAX_K:
        perms = np.array(list(itertools.permutations(range(K))), dtype=np.intp)
        scores = C[np.arange(K)[None, :], perms].sum(axis=1)
        assign = perms[int(np.argmax(scores))]
    else:
        _, assign = linear_sum_assignment(-C)
    extra = itertools.count(int(true_u.max()) + 1 if np.issubdtype(true_u.dtype, np.integer) else 0)
    target = np.empty(est_u.size, dtype=c.dtype if np.issubdtype(c.dtype, np.integer) else object)
    for a in range(est_u.size):
        b = assign[a]
        target[a] = true_u[b] if b < true_u.size else next(extra)
    mapped = target[est_inv]
    acc = float(C[np.arange(K), assign].sum()) / c.size
    return mapped, acc

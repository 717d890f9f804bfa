"""Synthetic uniform-cluster benchmark with two kinds of outliers."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionMismatch, RRLPIError
from .estimators import estimate, le_fiedler
from .graph import cosine_affinity
from .partition import align_labels, get_partitioner
from .penalty import GammaSearchConfig, estimate_fiedler_rrlpi

__all__ = [
    "DEFAULT_CENTROIDS",
    "DEFAULT_OUTLIER2_CENTER",
    "SyntheticSpec",
    "rng_for",
    "generate",
    "embed_all",
    "monte_carlo",
]

log = logging.getLogger(__name__)

DEFAULT_CENTROIDS = (
    (5.50, 4.50, 2.00, 0.75, 2.50, 4.50),
    (7.50, 1.00, 5.50, 2.50, 1.00, 1.50),
    (8.50, 0.75, 6.00, 4.50, 1.50, 1.25),
)
DEFAULT_OUTLIER2_CENTER = (7.00, 0.25, 5.00, 2.00, 0.50, 0.75)


@dataclass(frozen=True)
class SyntheticSpec:
    """Cluster centres, spreads and sizes plus the outlier settings.

    Every sample is ``mu + theta * u`` with ``u`` uniform on ``[-0.5, 0.5]``
    per coordinate. Type I outliers replace cluster samples by
    ``x + theta_o1 * u``; Type II outliers are appended around ``mu_o2``.
    """

    centroids: tuple = DEFAULT_CENTROIDS
    scales: tuple = (0.5, 0.5, 0.5)
    counts: tuple = (50, 50, 50)
    n_out1: int = 0
    theta_o1: float = 0.0
    n_out2: int = 0
    mu_o2: tuple = DEFAULT_OUTLIER2_CENTER
    theta_o2: float = 1.5
    seed: int = 0

    def __post_init__(self):
        m = {len(c) for c in self.centroids}
        if len(m) != 1 or len(self.mu_o2) not in m:
            raise DimensionMismatch("centroid dimensions differ")
        if not len(self.centroids) == len(self.scales) == len(self.counts):
            raise DimensionMismatch("centroids, scales and counts must have equal length")
        if min(self.scales) < 0 or self.theta_o1 < 0 or self.theta_o2 < 0:
            raise ValueError("scales must be nonnegative")
        if min(self.counts) < 0 or self.n_out1 < 0 or self.n_out2 < 0:
            raise ValueError("counts must be nonnegative")
        if self.n_out1 > sum(self.counts):
            raise ValueError("more Type I outliers than cluster samples")

    @property
    def K(self) -> int:
        return len(self.centroids)

    @classmethod
    def default(cls, n_per_cluster: int = 50, **kw) -> "SyntheticSpec":
        return cls(counts=(n_per_cluster,) * 3, **kw)


def rng_for(seed: int, cell: int = 0, run: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, cell, run)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(cell), int(run)))
    return np.random.Generator(np.random.Philox(ss))


def generate(spec: SyntheticSpec, cell: int = 0, run: int = 0):
    """Draw one data set.

    Returns
    -------
    X : ndarray, shape (m, n)
        Samples as columns.
    labels : ndarray of int, shape (n,)
        Cluster index ``1..K``; appended Type II outliers carry 0.
    outlier_mask : ndarray of bool, shape (n,)
        True for Type I and Type II outliers.
    """
    rng = rng_for(spec.seed, cell, run)
    mu = np.asarray(spec.centroids, dtype=float)
    m = mu.shape[1]
    blocks, labels = [], []
    for k in range(spec.K):
        u = rng.uniform(-0.5, 0.5, size=(spec.counts[k], m))
        blocks.append(mu[k] + spec.scales[k] * u)
        labels.append(np.full(spec.counts[k], k + 1))
    X = np.vstack(blocks) if blocks else np.empty((0, m))
    labels = np.concatenate(labels) if labels else np.empty(0, int)
    mask = np.zeros(X.shape[0], dtype=bool)

    offsets = np.concatenate([[0], np.cumsum(spec.counts)])
    order = [offsets[k] + rng.permutation(spec.counts[k]) for k in range(spec.K)]
    # round-robin over clusters, walking each cluster's shuffled order
    picked = []
    slot = [0] * spec.K
    k = 0
    while len(picked) < spec.n_out1:
        if slot[k] < spec.counts[k]:
            picked.append(order[k][slot[k]])
            slot[k] += 1
        k = (k + 1) % spec.K
    for i in picked:
        X[i] = X[i] + spec.theta_o1 * rng.uniform(-0.5, 0.5, size=m)
        mask[i] = True

    if spec.n_out2:
        u = rng.uniform(-0.5, 0.5, size=(spec.n_out2, m))
        X = np.vstack([X, np.asarray(spec.mu_o2) + spec.theta_o2 * u])
        labels = np.concatenate([labels, np.zeros(spec.n_out2, int)])
        mask = np.concatenate([mask, np.ones(spec.n_out2, bool)])
    return X.T.copy(), labels, mask


def embed_all(X, methods, cfg: GammaSearchConfig | None = None, G=None):
    """Embeddings of ``X`` for several methods, sharing graph and LE target.

    RLPI and RRLPI pick their penalty automatically.
    """
    cfg = cfg or GammaSearchConfig()
    G = G if G is not None else cosine_affinity(X)
    y_F = le_fiedler(G).y
    out = {}
    for meth in methods:
        if meth in ("le", "lpi"):
            out[meth] = estimate(meth, X, G, y_F=y_F, c=cfg.huber_c)
        else:
            out[meth] = estimate_fiedler_rrlpi(X, G, cfg, method=meth)[0]
    return out


def _cells(sweep: dict):
    keys = list(sweep)
    for vals in itertools.product(*(sweep[k] for k in keys)):
        yield dict(zip(keys, vals))


def _apply(spec: SyntheticSpec, params: dict) -> SyntheticSpec:
    params = dict(params)
    if "n_per_cluster" in params:
        params["counts"] = (int(params.pop("n_per_cluster")),) * spec.K
    return replace(spec, **params)


def monte_carlo(
    spec: SyntheticSpec,
    sweep: dict,
    methods=("le", "lpi", "rlpi", "rrlpi"),
    n_runs: int = 100,
    seed: int | None = None,
    cfg: GammaSearchConfig | None = None,
    partitioner: str = "kmeans",
):
    """Average partition accuracy over a parameter grid.

    Parameters
    ----------
    spec : SyntheticSpec
        Base settings; each grid cell overrides some of its fields.
    sweep : dict
        Field name to list of values, e.g. ``{"theta_o1": [0, 5, 10]}``.
        ``n_per_cluster`` is accepted as a shortcut for equal counts.
    methods : sequence of str
    n_runs : int
    seed : int, optional
        Overrides ``spec.seed``.

    Returns
    -------
    list of dict
        One row per cell and method with the swept parameters, ``method``,
        ``mean``, ``std``, ``n_runs`` and ``n_failed``.
    """
    if seed is not None:
        spec = replace(spec, seed=int(seed))
    part = get_partitioner(partitioner)
    rows = []
    for cell, params in enumerate(_cells(sweep)):
        sp = _apply(spec, params)
        acc = {m: [] for m in methods}
        failed = {m: 0 for m in methods}
        for run in range(n_runs):
            X, lab, _ = generate(sp, cell, run)
            try:
                embs = embed_all(X, methods, cfg)
            except RRLPIError as exc:
                log.warning("cell %d run %d failed: %s", cell, run, exc)
                for m in methods:
                    failed[m] += 1
                continue
            keep = lab > 0
            for m in methods:
                c_hat = part(embs[m].y, sp.K)
                acc[m].append(align_labels(c_hat[keep], lab[keep])[1])
        for m in methods:
            a = np.asarray(acc[m])
            rows.append(
                {
                    **{k: v for k, v in params.items()},
                    "method": m,
                    "mean": float(a.mean()) if a.size else float("nan"),
                    "std": float(a.std()) if a.size else float("nan"),
                    "n_runs": int(a.size),
                    "n_failed": failed[m],
                }
            )
    return rows

"""Penalty parameter selection from Delta-separated sets of the embedding."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConstantEmbedding
from .estimators import HUBER_C, estimate, le_fiedler
from .graph import AffinityGraph
from .spectral import EmbeddingVector

__all__ = [
    "GammaSearchConfig",
    "GammaCandidateResult",
    "SplitSets",
    "rescale",
    "split_sets",
    "delta_threshold",
    "prune_to_separation",
    "select_gamma",
    "gamma_grid",
    "evaluate_candidates",
    "estimate_fiedler_rrlpi",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GammaSearchConfig:
    """Settings of the penalty search.

    ``n_min`` defaults to ``n / k_max`` when left as ``None``.
    """

    gamma_min: float = 1e-8
    gamma_max: float = 1e3
    n_candidates: int = 20
    kappa_mode: str = "zero"
    n_min: float | None = None
    k_max: int = 10
    delta_scale: float = 1.0
    huber_c: float = HUBER_C

    def __post_init__(self):
        if not 0 < self.gamma_min < self.gamma_max:
            raise ValueError("need 0 < gamma_min < gamma_max")
        if self.n_candidates < 2:
            raise ValueError("need at least two candidates")
        if self.kappa_mode not in ("zero", "median"):
            raise ValueError("kappa_mode must be 'zero' or 'median'")
        if self.delta_scale < 0:
            raise ValueError("delta_scale must be nonnegative")

    def resolve_n_min(self, n: int) -> float:
        return float(self.n_min) if self.n_min is not None else n / self.k_max


@dataclass
class GammaCandidateResult:
    gamma: float
    n_discarded: int
    separated: bool
    gap: float
    sets_valid: bool
    valid: bool = True
    discarded: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("discarded")
        return d


class SplitSets(NamedTuple):
    s: np.ndarray
    t: np.ndarray
    s_idx: np.ndarray
    t_idx: np.ndarray


def rescale(y) -> np.ndarray:
    """Affine map of ``y`` onto ``[0, 1]``."""
    y = np.asarray(y, dtype=float)
    lo, hi = float(np.min(y)), float(np.max(y))
    if hi - lo <= 1e-14:
        raise ConstantEmbedding(f"embedding range {hi - lo:.3e} is too small to rescale")
    return (y - lo) / (hi - lo)


def split_sets(y_hat, y_bar, kappa: float = 0.0) -> SplitSets:
    """Split the rescaled embedding by thresholding the raw one at ``kappa``."""
    y_hat = np.asarray(y_hat, dtype=float)
    y_bar = np.asarray(y_bar, dtype=float)
    if y_hat.shape != y_bar.shape:
        raise ValueError("y_hat and y_bar must have equal length")
    above = y_hat > kappa
    s_idx = np.flatnonzero(above)
    t_idx = np.flatnonzero(~above)
    return SplitSets(y_bar[s_idx], y_bar[t_idx], s_idx, t_idx)


def delta_threshold(n: int, c_delta: float = 1.0) -> float:
    """``c_delta * (ln n) ** (-2/3)``."""
    if n < 3:
        raise ValueError("need n >= 3")
    return c_delta * np.log(n) ** (-2.0 / 3.0)


def _closest_cross_pair(s, t):
    # s, t sorted ascending; returns (i, j, dist2) of the closest pair,
    # ties resolved toward the smaller indices
    pos = np.searchsorted(t, s)
    best = (np.inf, 0, 0)
    for i, p in enumerate(pos):
        for j in (p - 1, p):
            if 0 <= j < t.size:
                dd = (s[i] - t[j]) ** 2
                if dd < best[0]:
                    best = (dd, i, j)
    return best[1], best[2], best[0]


def prune_to_separation(s, t, delta: float, n_min: float, gamma: float = float("nan")):
    """Discard closest cross pairs until the two sets are ``delta`` apart.

    Parameters
    ----------
    s, t : array_like
        The two sets of rescaled projections.
    delta : float
        Required squared distance between the sets.
    n_min : float
        Minimum admissible set size; a removal that would leave a set
        smaller than this ends the loop.

    Returns
    -------
    GammaCandidateResult
        ``n_discarded`` counts removed points (two per removed pair) and
        ``gap`` is the squared distance between ``min(s)`` and ``max(t)`` of
        the initial sets.
    """
    s = np.sort(np.asarray(s, dtype=float))
    t = np.sort(np.asarray(t, dtype=float))
    sets_valid = s.size >= n_min and t.size >= n_min
    gap = float((s[0] - t[-1]) ** 2) if s.size and t.size else 0.0
    removed: list[float] = []
    separated = False

    if s.size == 0 or t.size == 0:
        separated = True
    elif s[0] > t[-1]:
        # disjoint ranges: the closest pair is always (lowest s, highest t)
        lo, hi = 0, t.size
        while True:
            if (s[lo] - t[hi - 1]) ** 2 > delta:
                separated = True
                break
            if s.size - lo - 1 < n_min or hi - 1 < n_min:
                break
            removed += [s[lo], t[hi - 1]]
            lo += 1
            hi -= 1
    else:
        s_rem, t_rem = s.copy(), t.copy()
        while True:
            i, j, dd = _closest_cross_pair(s_rem, t_rem)
            if dd > delta:
                separated = True
                break
            if s_rem.size - 1 < n_min or t_rem.size - 1 < n_min:
                break
            removed += [s_rem[i], t_rem[j]]
            s_rem = np.delete(s_rem, i)
            t_rem = np.delete(t_rem, j)
            if s_rem.size == 0 or t_rem.size == 0:
                separated = True
                break

    return GammaCandidateResult(
        gamma=float(gamma),
        n_discarded=len(removed),
        separated=separated,
        gap=gap,
        sets_valid=bool(sets_valid),
        discarded=removed,
    )


def select_gamma(results) -> float:
    """Pick the penalty from the per-candidate diagnostics.

    Among candidates that are separated with valid sets, the fewest discarded
    points wins; remaining ties go to the largest gap and then to the
    smallest gamma. Without any such candidate the largest gap wins (ties to
    the smallest gamma).
    """
    results = [r for r in results if r.valid]
    if not results:
        raise ConstantEmbedding("every candidate penalty produced a constant embedding")
    ok = [r for r in results if r.separated and r.sets_valid]
    if ok:
        best = min(ok, key=lambda r: (r.n_discarded, -r.gap, r.gamma))
    else:
        best = min(results, key=lambda r: (-r.gap, r.gamma))
    return best.gamma


def gamma_grid(cfg: GammaSearchConfig) -> np.ndarray:
    return np.logspace(np.log10(cfg.gamma_min), np.log10(cfg.gamma_max), cfg.n_candidates)


def evaluate_candidates(X, G: AffinityGraph, y_F, grid, cfg: GammaSearchConfig, method="rrlpi"):
    """Run the separation test for every penalty on the grid."""
    n = G.n
    n_min = cfg.resolve_n_min(n)
    delta = delta_threshold(n, cfg.delta_scale)
    out = []
    for g in grid:
        emb = estimate(method, X, G, gamma=float(g), c=cfg.huber_c, y_F=y_F)
        try:
            y_bar = rescale(emb.y)
        except ConstantEmbedding:
            out.append(GammaCandidateResult(float(g), 0, False, 0.0, False, valid=False))
            continue
        kappa = 0.0 if cfg.kappa_mode == "zero" else float(np.median(emb.y))
        sp = split_sets(emb.y, y_bar, kappa)
        out.append(prune_to_separation(sp.s, sp.t, delta, n_min, gamma=float(g)))
    return out


def estimate_fiedler_rrlpi(
    X, G: AffinityGraph, cfg: GammaSearchConfig | None = None, grid=None, method: str = "rrlpi"
):
    """Robust Fiedler vector with automatic penalty selection.

    Parameters
    ----------
    X : ndarray, shape (m, n)
    G : AffinityGraph
    cfg : GammaSearchConfig, optional
    grid : array_like, optional
        Candidate penalties; defaults to the log-spaced grid of ``cfg``.
    method : {"rrlpi", "rlpi"}

    Returns
    -------
    embedding : EmbeddingVector
        Fit at the selected penalty.
    gamma_hat : float
    diagnostics : list of GammaCandidateResult
    """
    cfg = cfg or GammaSearchConfig()
    grid = gamma_grid(cfg) if grid is None else np.asarray(grid, dtype=float)
    y_F = le_fiedler(G).y
    diag = evaluate_candidates(X, G, y_F, grid, cfg, method=method)
    gamma_hat = select_gamma(diag)
    log.debug("selected gamma %.3e among %d candidates", gamma_hat, len(diag))
    emb: EmbeddingVector = estimate(method, X, G, gamma=gamma_hat, c=cfg.huber_c, y_F=y_F)
    return emb, gamma_hat, diag

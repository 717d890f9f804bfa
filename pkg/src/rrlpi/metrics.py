"""Partition accuracy, detection probability, boundary F-score and Jaccard index."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatch, NonEmptyRequired
from .partition import align_labels

__all__ = ["p_acc", "p_det", "boundary_map", "f_score", "jaccard", "metric_bundle"]


def p_acc(runs) -> float:
    """Mean aligned accuracy over ``(c_hat, c)`` pairs."""
    runs = list(runs)
    if not runs:
        raise NonEmptyRequired("p_acc needs at least one run")
    return float(np.mean([align_labels(ch, c)[1] for ch, c in runs]))


def p_det(estimates, K: int) -> float:
    """Fraction of runs whose estimated cluster count equals ``K``."""
    est = np.asarray(list(estimates))
    if est.size == 0:
        raise NonEmptyRequired("p_det needs at least one estimate")
    return float(np.mean(est == K))


def boundary_map(seg) -> np.ndarray:
    """Pixels with a 4-neighbour carrying a different label."""
    seg = np.asarray(seg)
    b = np.zeros(seg.shape, dtype=bool)
    dv = seg[1:, :] != seg[:-1, :]
    dh = seg[:, 1:] != seg[:, :-1]
    b[1:, :] |= dv
    b[:-1, :] |= dv
    b[:, 1:] |= dh
    b[:, :-1] |= dh
    return b


def f_score(boundary_est, boundary_gt, match_radius: int = 1) -> float:
    """Harmonic mean of boundary precision and recall.

    A boundary pixel counts as matched when a pixel of the other map lies
    within Chebyshev distance ``match_radius``.
    """
    be = np.asarray(boundary_est, dtype=bool)
    bg = np.asarray(boundary_gt, dtype=bool)
    if be.shape != bg.shape:
        raise DimensionMismatch(f"boundary maps differ in shape: {be.shape} vs {bg.shape}")
    if not be.any() and not bg.any():
        return 1.0
    st = np.ones((2 * match_radius + 1,) * 2, dtype=bool)
    near_gt = ndimage.binary_dilation(bg, structure=st) if match_radius > 0 else bg
    near_est = ndimage.binary_dilation(be, structure=st) if match_radius > 0 else be
    P = float((be & near_gt).sum()) / be.sum() if be.any() else 0.0
    R = float((bg & near_est).sum()) / bg.sum() if bg.any() else 0.0
    if P + R == 0:
        return 0.0
    return float(2 * P * R / (P + R))


def jaccard(seg_est, seg_gt) -> float:
    """Mean per-segment ``TP / (TP + FP + FN)``.

    Boolean inputs are compared directly as foreground masks. Label maps are
    first aligned to the ground truth, then scored per ground-truth segment.
    """
    se = np.asarray(seg_est)
    sg = np.asarray(seg_gt)
    if se.shape != sg.shape:
        raise DimensionMismatch(f"segmentations differ in shape: {se.shape} vs {sg.shape}")
    if se.dtype == bool and sg.dtype == bool:
        union = (se | sg).sum()
        return 1.0 if union == 0 else float((se & sg).sum()) / union
    mapped, _ = align_labels(se.ravel(), sg.ravel())
    mapped = np.asarray(mapped)
    g = sg.ravel()
    scores = []
    for lab in np.unique(g):
        e_m = mapped == lab
        g_m = g == lab
        scores.append(float((e_m & g_m).sum()) / float((e_m | g_m).sum()))
    return float(np.mean(scores))


def metric_bundle(**kw) -> dict:
    """Collect metric values into a JSON-ready dict, dropping ``None`` entries."""
    return {k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in kw.items() if v is not None}

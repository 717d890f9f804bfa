"""Image loading, block downsampling, multiplicative noise and segmentation."""

from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import CorruptFile, UnsupportedFormat
from .estimators import estimate, le_fiedler
from .graph import cosine_affinity
from .metrics import boundary_map, f_score, jaccard
from .partition import align_labels, get_partitioner
from .penalty import GammaSearchConfig, estimate_fiedler_rrlpi
from .synth import rng_for

__all__ = [
    "load_image",
    "load_label_image",
    "parse_ppm",
    "downsample",
    "corrupt",
    "segment",
    "SegmentResult",
    "label_palette",
    "save_label_png",
    "two_region_image",
]

DEFAULT_TARGET_N = 15000
_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
# black pixels have no direction; nudge them onto the gray axis
ZERO_PIXEL_FILL = 1e-6


def parse_ppm(data: bytes) -> np.ndarray:
    """Decode a P3 (ASCII) or P6 (binary) PPM into floats on ``[0, 1]``."""
    magic = data[:2]
    if magic not in (b"P3", b"P6"):
        raise UnsupportedFormat("not a P3/P6 PPM file")
    pos = 2
    header = []
    tok = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")
    for _ in range(3):
        mt = tok.match(data, pos)
        if mt is None:
            raise CorruptFile("truncated PPM header")
        header.append(mt.group(1))
        pos = mt.end()
    try:
        w, h, maxval = (int(v) for v in header)
    except ValueError:
        raise CorruptFile("malformed PPM header") from None
    if w <= 0 or h <= 0 or not 0 < maxval < 65536:
        raise CorruptFile("invalid PPM dimensions or maxval")
    count = w * h * 3
    if magic == b"P3":
        vals = data[pos:].split()
        if len(vals) < count:
            raise CorruptFile(f"expected {count} samples, found {len(vals)}")
        try:
            arr = np.array([int(v) for v in vals[:count]], dtype=float)
        except ValueError:
            raise CorruptFile("non-integer PPM sample") from None
    else:
        pos += 1  # single whitespace byte after maxval
        dt = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raw = data[pos : pos + count * dt.itemsize]
        if len(raw) < count * dt.itemsize:
            raise CorruptFile("truncated PPM raster")
        arr = np.frombuffer(raw, dtype=dt).astype(float)
    if np.any(arr > maxval):
        raise CorruptFile("sample exceeds maxval")
    return arr.reshape(h, w, 3) / maxval


def load_image(path) -> np.ndarray:
    """Read an 8-bit RGB PNG or a P3/P6 PPM as an ``H x W x 3`` float grid."""
    data = Path(path).read_bytes()
    if data[:2] in (b"P3", b"P6"):
        return parse_ppm(data)
    if not data.startswith(_PNG_MAGIC):
        raise UnsupportedFormat("only PNG and PPM images are supported")
    try:
        with Image.open(io.BytesIO(data)) as im:
            if im.mode != "RGB":
                raise UnsupportedFormat(f"PNG mode {im.mode!r} is not 8-bit RGB")
            im.load()
            arr = np.asarray(im, dtype=float)
    except UnsupportedFormat:
        raise
    except (OSError, SyntaxError, ValueError, UnidentifiedImageError) as exc:
        raise CorruptFile(f"cannot decode PNG: {exc}") from None
    return arr / 255.0


def load_label_image(path) -> np.ndarray:
    """Ground-truth annotation where each distinct colour is one segment."""
    data = Path(path).read_bytes()
    if data[:2] in (b"P3", b"P6"):
        arr = np.round(parse_ppm(data) * 255).astype(np.int64)
    else:
        try:
            with Image.open(io.BytesIO(data)) as im:
                im.load()
                arr = np.asarray(im.convert("RGB"), dtype=np.int64)
        except (OSError, SyntaxError, ValueError, UnidentifiedImageError) as exc:
            raise CorruptFile(f"cannot decode label image: {exc}") from None
    code = (arr[..., 0] << 16) | (arr[..., 1] << 8) | arr[..., 2]
    _, inv = np.unique(code, return_inverse=True)
    return inv.reshape(code.shape) + 1


def downsample(grid, target_n: int = DEFAULT_TARGET_N):
    """Average ``b x b`` pixel blocks so that about ``target_n`` remain.

    Returns
    -------
    X : ndarray, shape (3, n)
        Mean colour of every block, blocks in row-major order.
    index_map : ndarray of int, shape (H, W)
        Block index of every full-resolution pixel.
    """
    grid = np.asarray(grid, dtype=float)
    H, W, C = grid.shape
    if target_n < 1:
        raise ValueError("target_n must be positive")
    b = 1 if H * W <= target_n else math.ceil(math.sqrt(H * W / target_n))
    Hb, Wb = -(-H // b), -(-W // b)
    rows = np.arange(H) // b
    cols = np.arange(W) // b
    index_map = rows[:, None] * Wb + cols[None, :]
    if b == 1:
        return grid.reshape(-1, C).T.copy(), index_map
    flat = index_map.ravel()
    counts = np.bincount(flat, minlength=Hb * Wb).astype(float)
    X = np.empty((C, Hb * Wb))
    for ch in range(C):
        X[ch] = np.bincount(flat, weights=grid[..., ch].ravel(), minlength=Hb * Wb) / counts
    return X, index_map


def corrupt(grid, noise_var: float, seed: int = 0) -> np.ndarray:
    """Multiplicative uniform noise ``I + xi * I`` clamped to ``[0, 1]``.

    ``xi`` has zero mean and variance ``noise_var`` and is drawn
    independently for every pixel and channel.
    """
    if noise_var < 0:
        raise ValueError("noise variance must be nonnegative")
    grid = np.asarray(grid, dtype=float)
    if noise_var == 0:
        return grid.copy()
    a = math.sqrt(3.0 * noise_var)
    xi = rng_for(seed).uniform(-a, a, size=grid.shape)
    return np.clip(grid + xi * grid, 0.0, 1.0)


@dataclass
class SegmentResult:
    labels: np.ndarray
    metrics: dict = field(default_factory=dict)
    gamma: float | None = None
    embedding: np.ndarray | None = None
    features: np.ndarray | None = None
    block_labels: np.ndarray | None = None


def segment(
    grid,
    K: int,
    method: str = "rrlpi",
    ground_truth=None,
    target_n: int = DEFAULT_TARGET_N,
    cfg: GammaSearchConfig | None = None,
    gamma: float | None = None,
    partitioner: str = "kmeans",
    match_radius: int = 1,
) -> SegmentResult:
    """Segment an RGB grid into ``K`` regions from a one-dimensional embedding.

    Parameters
    ----------
    grid : ndarray, shape (H, W, 3)
    K : int
        Number of segments, at least 2.
    method : {"le", "lpi", "rlpi", "rrlpi"}
    ground_truth : ndarray of int, shape (H, W), optional
        When given, F-score, Jaccard index and pixel accuracy are reported.
    gamma : float, optional
        Fixed penalty; chosen automatically for RLPI/RRLPI when omitted.
    """
    if K < 2:
        raise ValueError("K must be at least 2")
    grid = np.asarray(grid, dtype=float)
    X, index_map = downsample(grid, target_n)
    X = np.where(np.all(X == 0, axis=0, keepdims=True), ZERO_PIXEL_FILL, X)
    G = cosine_affinity(X)
    cfg = cfg or GammaSearchConfig()
    g_hat = None
    if method in ("rlpi", "rrlpi") and gamma is None:
        emb, g_hat, _ = estimate_fiedler_rrlpi(X, G, cfg, method=method)
    else:
        y_F = le_fiedler(G).y
        emb = estimate(method, X, G, gamma=gamma, c=cfg.huber_c, y_F=y_F)
        g_hat = gamma
    block_labels = get_partitioner(partitioner)(emb.y, K)
    labels = block_labels[index_map]
    metrics = {}
    if ground_truth is not None:
        gt = np.asarray(ground_truth)
        if gt.shape != labels.shape:
            raise ValueError(f"ground truth shape {gt.shape} differs from image {labels.shape}")
        metrics["f_score"] = f_score(boundary_map(labels), boundary_map(gt), match_radius)
        metrics["jaccard"] = jaccard(labels, gt)
        metrics["p_acc"] = align_labels(labels.ravel(), gt.ravel())[1]
    return SegmentResult(
        labels=labels,
        metrics=metrics,
        gamma=g_hat,
        embedding=emb.y,
        features=X,
        block_labels=block_labels,
    )


def label_palette(K: int) -> np.ndarray:
    """Distinct 8-bit colours for labels ``1..K`` (index 0 is black)."""
    import matplotlib

    cmap = matplotlib.colormaps["tab20" if K > 10 else "tab10"]
    pal = np.zeros((K + 1, 3), dtype=np.uint8)
    for k in range(1, K + 1):
        pal[k] = np.round(np.asarray(cmap((k - 1) % cmap.N)[:3]) * 255)
    return pal


def save_label_png(labels, path_or_buffer) -> None:
    """Write a label map as an indexed (palette) PNG."""
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() > 255:
        raise ValueError("labels must lie in 0..255 for an indexed PNG")
    pal = label_palette(int(labels.max()))
    im = Image.fromarray(labels.astype(np.uint8))
    im.putpalette(pal.ravel().tolist())
    im.save(path_or_buffer, format="PNG")


def two_region_image(h: int = 32, w: int = 48, c1=(0.8, 0.3, 0.2), c2=(0.2, 0.4, 0.9)):
    """Image with a left and a right half of constant colour, plus its labels."""
    grid = np.empty((h, w, 3))
    half = w // 2
    grid[:, :half] = c1
    grid[:, half:] = c2
    gt = np.ones((h, w), dtype=int)
    gt[:, half:] = 2
    return grid, gt

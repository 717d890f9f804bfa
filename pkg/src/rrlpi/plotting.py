"""Static SVG figures of embeddings and benchmark curves."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["embedding_svg", "bench_svg", "modularity_svg"]

_RC = {"svg.hashsalt": "rrlpi", "svg.fonttype": "none"}


def _to_svg(fig) -> bytes:
    buf = io.BytesIO()
    with matplotlib.rc_context(_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def embedding_svg(y, labels=None, title: str = "") -> bytes:
    """Scatter of sample index against embedding value, coloured by label."""
    y = np.asarray(y)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    c = None if labels is None else np.asarray(labels)
    sc = ax.scatter(np.arange(y.size), y, c=c, s=8, cmap="tab10" if c is not None else None)
    if c is not None and np.unique(c).size <= 12:
        ax.legend(*sc.legend_elements(), title="label", fontsize=7, loc="best")
    ax.set_xlabel("sample index")
    ax.set_ylabel("embedding value")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _to_svg(fig)


def bench_svg(rows, x_key: str) -> bytes:
    """Mean accuracy (with one-std band) against a swept parameter, per method."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    methods = sorted({r["method"] for r in rows})
    for m in methods:
        rr = sorted((r for r in rows if r["method"] == m), key=lambda r: r[x_key])
        x = np.array([r[x_key] for r in rr], dtype=float)
        mu = np.array([r["mean"] for r in rr])
        sd = np.array([r["std"] for r in rr])
        ax.plot(x, mu, marker="o", ms=3, label=m.upper())
        ax.fill_between(x, mu - sd, np.minimum(mu + sd, 1.0), alpha=0.15)
    ax.set_xlabel(x_key)
    ax.set_ylabel("mean partition accuracy")
    ax.legend(fontsize=7)
    fig.tight_layout()
    return _to_svg(fig)


def modularity_svg(table) -> bytes:
    table = np.asarray(table)
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.plot(table[:, 0], table[:, 1], marker="o")
    ax.set_xlabel("K")
    ax.set_ylabel("modularity Q")
    fig.tight_layout()
    return _to_svg(fig)

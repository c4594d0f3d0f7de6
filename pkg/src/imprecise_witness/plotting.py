"""Deterministic SVG figures (matplotlib, Agg backend)."""
import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .fileio import atomic_write  # noqa: E402

_RC = {"svg.hashsalt": "imprecise-witness", "svg.fonttype": "none", "path.simplify": False}


def _save(fig, path):
    buf = io.StringIO()
    with matplotlib.rc_context(_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    atomic_write(path, buf.getvalue())


def plot_delta_vs_d(rows, path, title=None):
    """Relative gap against dimension, one line per eps."""
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 3.6))
        for eps in sorted({r["eps"] for r in rows}):
            pts = sorted((r["d"], r["delta"]) for r in rows if r["eps"] == eps)
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=f"eps = {eps:g}")
        ax.set_xlabel("d")
        ax.set_ylabel("Delta")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
    _save(fig, path)


def plot_bounds_vs_eps(rows, path, title=None):
    """Upper bounds (solid) with analytic separable values (dashed) per witness."""
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 3.6))
        for i, name in enumerate(sorted({r["witness"] for r in rows})):
            pts = sorted((r["eps"], r["upper_bound"], r["analytic"]) for r in rows if r["witness"] == name)
            color = f"C{i}"
            ax.plot([p[0] for p in pts], [p[1] for p in pts], color=color, label=f"{name} upper bound")
            ax.plot([p[0] for p in pts], [p[2] for p in pts], color=color, ls="--", label=f"{name} analytic")
        ax.set_xlabel("eps")
        ax.set_ylabel("separable bound")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
    _save(fig, path)

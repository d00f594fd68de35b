"""SVG figures: value functions on the 1-simplex, subdivisions of the 2-simplex."""

from __future__ import annotations

import io
import math
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .decision import MaxAffine, Subdivision  # noqa: E402
from .serialization import atomic_write  # noqa: E402

STYLE = {
    "svg.hashsalt": "infovalue",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.4,
}
PALETTE = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
           "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd"]


def _svg(fig) -> str:
    buf = io.StringIO()
    with plt.rc_context(STYLE):
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return buf.getvalue()


def _save(fig, path) -> str:
    text = _svg(fig)
    if path is not None:
        atomic_write(path, text)
    return text


def ternary(mu: Sequence) -> tuple:
    """Planar coordinates of a belief on the 2-simplex (equilateral triangle)."""
    return float(mu[1]) + float(mu[2]) / 2, float(mu[2]) * math.sqrt(3) / 2


def _order_polygon(pts: list) -> list:
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    return sorted(pts, key=lambda p: math.atan2(p[1] - cy, p[0] - cx))


def plot_value_function(v: MaxAffine, path=None, others: Sequence = (), curves: Sequence = (),
                        support: Optional[Sequence] = None, title: str = "",
                        samples: int = 401) -> str:
    """Two-state value function over ``mu = P(second state)``.

    ``others`` are extra ``(label, function)`` pairs drawn dashed, ``curves``
    are ``(label, callable)`` pairs, ``support`` marks posterior beliefs.
    """
    if v.n != 2:
        raise ValueError("value-function plots need two states")
    xs = np.linspace(0, 1, samples)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        for vec, lbl in v.pieces:
            a, b = float(vec[0]), float(vec[1])
            ax.plot(xs, a + (b - a) * xs, color="#bbbbbb", lw=0.7, zorder=1)
        ax.plot(xs, [float(v.evaluate((1 - x, x))) for x in xs], color=PALETTE[0], label="V", zorder=3)
        for k, (lbl, f) in enumerate(others):
            ax.plot(xs, [float(f.evaluate((1 - x, x))) for x in xs], ls="--",
                    color=PALETTE[(k + 1) % len(PALETTE)], label=lbl, zorder=2)
        for k, (lbl, f) in enumerate(curves):
            ax.plot(xs, [float(f((1 - x, x))) for x in xs], ls=":",
                    color=PALETTE[(k + 3) % len(PALETTE)], label=lbl, zorder=2)
        if support:
            for mu in support:
                ax.axvline(float(mu[1]), color="#444444", lw=0.6, ls="-.")
        ax.set_xlim(0, 1)
        ax.set_xlabel(r"$\mu$ (probability of the second state)")
        ax.set_ylabel("value")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False, loc="best")
        fig.tight_layout()
    return _save(fig, path)


def plot_subdivision(sub: Subdivision, path=None, title: str = "", marks: Sequence = ()) -> str:
    """Cells of a subdivision: coloured intervals (n = 2) or a ternary map (n = 3)."""
    if sub.n not in (2, 3):
        raise ValueError("subdivision plots need two or three states")
    with plt.rc_context(STYLE):
        if sub.n == 2:
            fig, ax = plt.subplots(figsize=(4.5, 1.3))
            for k, cell in enumerate(sub.cells):
                xs = [float(v[1]) for v in cell.vertices]
                lo, hi = min(xs), max(xs)
                ax.axvspan(lo, hi, color=PALETTE[k % len(PALETTE)], alpha=0.55, lw=0)
                ax.text((lo + hi) / 2, 0.5, cell.label, ha="center", va="center")
            for mu in marks:
                ax.plot(float(mu[1]), 0.5, "k|", ms=14)
            ax.set_xlim(0, 1)
            ax.set_yticks([])
            ax.set_xlabel(r"$\mu$")
        else:
            fig, ax = plt.subplots(figsize=(4.2, 3.8))
            for k, cell in enumerate(sub.cells):
                pts = _order_polygon([ternary(v) for v in cell.vertices])
                if len(pts) < 3:
                    continue
                ax.fill([p[0] for p in pts], [p[1] for p in pts], color=PALETTE[k % len(PALETTE)],
                        alpha=0.55, ec="black", lw=0.8)
                cx = sum(p[0] for p in pts) / len(pts)
                cy = sum(p[1] for p in pts) / len(pts)
                ax.text(cx, cy, cell.label, ha="center", va="center")
            tri = [ternary(e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 0))]
            ax.plot([p[0] for p in tri], [p[1] for p in tri], color="black", lw=1.0)
            for mu in marks:
                x, y = ternary(mu)
                ax.plot(x, y, "ko", ms=3)
            ax.set_aspect("equal")
            ax.axis("off")
        if title:
            ax.set_title(title)
        fig.tight_layout()
    return _save(fig, path)

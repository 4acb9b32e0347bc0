"""Figure rendering for the report path: the root diagram, numeric
convergence, and bridge-rate plots, written next to the delimited output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def render_root_diagram(points: dict[str, tuple[float, float]], path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(4.2, 4.2))
    seen_origin = False
    for name, (x, y) in sorted(points.items()):
        if (x, y) == (0.0, 0.0):
            if not seen_origin:
                ax.plot(0, 0, "o", mfc="none", mec="k", ms=14)
                ax.plot(0, 0, "o", mfc="none", mec="k", ms=8)
                seen_origin = True
            continue
        ax.annotate("", xy=(x, y), xytext=(0, 0),
                    arrowprops=dict(arrowstyle="->", color="tab:blue", lw=1.2))
        ax.plot([x], [y], "o", color="tab:blue", ms=5)
        ax.annotate(name, xy=(x, y), xytext=(x * 1.12, y * 1.12),
                    ha="center", va="center", fontsize=9)
    cartan = [n for n, p in points.items() if p == (0.0, 0.0)]
    if cartan:
        ax.annotate(", ".join(sorted(cartan)), xy=(0, 0), xytext=(0.1, -0.22), fontsize=8)
    lim = 1.6
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_aspect("equal")
    ax.axhline(0, color="0.85", lw=0.6, zorder=0)
    ax.axvline(0, color="0.85", lw=0.6, zorder=0)
    ax.set_title("root diagram (adjoint weights, standard basis)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_convergence(figdata: dict, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    q = figdata.get("quintic")
    if q:
        ax.loglog(q["dt"], q["residual"], "o-", label="quintic NLS + boost")
        ref = [q["residual"][0] * (d / q["dt"][0]) ** 2 for d in q["dt"]]
        ax.loglog(q["dt"], ref, "--", color="0.6", label="order 2")
    neg = figdata.get("negative")
    if neg:
        ax.axhline(min(neg["residuals"]), color="tab:red", ls=":",
                   label="negative control floor")
    ax.set_xlabel("dt")
    ax.set_ylabel("normalized residual")
    ax.legend(fontsize=8)
    ax.set_title("covariance residuals under refinement")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_bridge(figdata: dict, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    sizes = np.array(figdata["sizes"], dtype=float)
    defects = np.array(figdata["defects"], dtype=float)
    ax.loglog(sizes, defects, "s-", label="fixed-mass defect")
    ref = defects[1] * (sizes / sizes[1]) ** (-4.0)
    ax.loglog(sizes, ref, "--", color="0.6", label="order 4")
    ax.set_xlabel("zeta nodes")
    ax.set_ylabel("normalized defect")
    ax.legend(fontsize=8)
    ax.set_title("quadrature bridge refinement")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_snapshot(r: np.ndarray, values: np.ndarray, path: Path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.plot(r, values.real, label="Re")
    if np.iscomplexobj(values) and np.max(np.abs(values.imag)) > 1e-12:
        ax.plot(r, values.imag, label="Im", alpha=0.7)
    ax.set_xlabel("r")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path

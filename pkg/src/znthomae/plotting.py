"""Figures written next to a run report (matplotlib, file output only)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .curve import CurveSpec  # noqa: E402
from .periods import alpha_contour, beta_contour  # noqa: E402


def plot_residuals(suites, path: Path) -> Path:
    """log10(residual / tolerance) for every gating check, grouped by suite."""
    fig, ax = plt.subplots(figsize=(8, 4))
    xs, ys, colors, ticks = [], [], [], []
    x = 0
    for s in suites:
        checks = [c for c in s.checks if c.gating]
        if not checks:
            continue
        start = x
        for c in checks:
            ratio = max(c.residual, 1e-18) / max(c.tol, 1e-300) if c.tol > 0 else max(c.residual, 1e-18)
            xs.append(x)
            ys.append(np.log10(ratio))
            colors.append("tab:green" if c.passed else "tab:red")
            x += 1
        ticks.append(((start + x - 1) / 2, s.name))
        x += 1
    ax.bar(xs, ys, color=colors, width=0.8)
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_xticks([t for t, _ in ticks], [n for _, n in ticks], rotation=30, ha="right")
    ax.set_ylabel("log10(residual / tolerance)")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def plot_cycles(spec: CurveSpec, path: Path) -> Path:
    """Branch points and the alpha/beta integration contours in the lambda plane."""
    fig, ax = plt.subplots(figsize=(7, 3))
    for k in range(1, spec.m + 1):
        for contour, style in ((alpha_contour(spec, k), "tab:blue"), (beta_contour(spec, k), "tab:orange")):
            v = np.array(contour.vertices)
            ax.plot(v.real, v.imag, color=style, lw=1)
    pts = spec.points
    ax.scatter(pts[0::2], np.zeros_like(pts[0::2]), color="k", zorder=3, label="odd")
    ax.scatter(pts[1::2], np.zeros_like(pts[1::2]), facecolors="none", edgecolors="k", zorder=3, label="even")
    ax.set_title(f"N={spec.N}, m={spec.m}: alpha (blue) and beta (orange) cycles")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def write_plots(spec: CurveSpec, suites, directory) -> list:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    return [str(plot_residuals(suites, out / "residuals.png")), str(plot_cycles(spec, out / "cycles.png"))]

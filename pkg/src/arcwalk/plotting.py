"""Matplotlib figures for the CLI report path.

matplotlib is imported lazily so the numerical core does not depend on it;
install the ``plot`` extra to use these.
"""

from __future__ import annotations

import math

import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def new_figure(width=6.0, height=None):
    plt = _pyplot()
    if height is None:
        height = width * GOLDEN
    fig, ax = plt.subplots(figsize=(width, height))
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    return fig, ax


def save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    _pyplot().close(fig)


def samples_vs_density(samples, pdf, path, title="", bins=64, label="model"):
    """Histogram of samples on (0, 1) against a density curve."""
    fig, ax = new_figure()
    ax.hist(samples, bins=bins, range=(0.0, 1.0), density=True,
            color="0.75", edgecolor="0.5", linewidth=0.4, label="samples")
    if pdf is not None:
        s = np.linspace(1e-3, 1 - 1e-3, 999)
        ax.plot(s, [pdf(v) for v in s], color="C3", lw=1.5, label=label)
    ax.set_xlim(0, 1)
    ax.set_xlabel("state")
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    save(fig, path)


def residual_profile(grid, residuals, tol, path, title=""):
    fig, ax = new_figure()
    res = np.maximum(np.asarray(residuals, dtype=float), 1e-18)
    ax.semilogy(grid, res, "o-", ms=2.5, lw=0.8, color="C0")
    ax.axhline(tol, color="C3", ls="--", lw=1, label=f"tol = {tol:g}")
    ax.set_xlabel("a")
    ax.set_ylabel("relative residual")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    save(fig, path)


def zp_curve(ps, zs, path):
    fig, ax = new_figure()
    ax.plot(ps, zs, "o-", ms=3, color="C0", label="$Z_p$")
    ax.axhline(math.pi, color="0.4", ls=":", lw=1, label=r"$\pi$")
    ax.axhline(2 * math.log(2), color="0.4", ls="--", lw=1, label=r"$2\log 2$")
    ax.set_xlabel("p")
    ax.set_ylabel("normalizing constant")
    ax.legend(frameon=False)
    save(fig, path)


def variance_profile(s, var, se, path):
    fig, ax = new_figure()
    ax.errorbar(s, var, yerr=3 * np.asarray(se), fmt="o", ms=3, color="C0",
                capsize=2, label="spliced paths (3 SE)")
    ax.plot([0, 1], [0, 1], color="C3", lw=1, label="Var W(s) = s")
    ax.set_xlabel("s")
    ax.set_ylabel("variance")
    ax.legend(frameon=False)
    save(fig, path)


def lq_objective_curve(query, path, half_width=0.1):
    from .lq import lq_objective

    x = query.x
    z = np.linspace(max(0.0, x - half_width), min(1.0, x + half_width), 401)
    f = np.array([lq_objective(query, v) for v in z])
    fig, ax = new_figure()
    ax.plot(z, f, color="C0")
    ax.axvline(x, color="C3", ls="--", lw=1, label=f"x = {x:g}")
    ax.set_xlabel("z")
    ax.set_ylabel(r"$E|z - X|^q$")
    ax.set_title(f"p = {query.p:g}, q = {query.q:g}")
    ax.legend(frameon=False)
    save(fig, path)

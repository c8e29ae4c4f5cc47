"""Optional figures for the CLI's ``--figure`` flag.

Every function takes the data a command already computed, draws onto a
fresh :class:`matplotlib.figure.Figure` (no pyplot state, no display) and
returns it. :func:`save` strips volatile metadata so reruns give the same
file.
"""

from __future__ import annotations

import functools
import math
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib import colormaps
from matplotlib.figure import Figure

from .exponents import RegimeTag

__all__ = [
    "STYLE",
    "new_figure",
    "save",
    "plot_multiplier",
    "plot_phase_diagram",
    "plot_profile",
    "plot_energy_curve",
    "plot_angular",
    "plot_kernel",
]

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "lane-emden-lab",
}

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

_REGIME_ORDER = (
    RegimeTag.SUBCRITICAL_TRIVIAL.value,
    RegimeTag.CRITICAL_FINITE_ENERGY.value,
    RegimeTag.SUPERCRITICAL_TRIVIAL.value,
    RegimeTag.UNCLASSIFIED.value,
)


def _styled(fn):
    # artists read rcParams when created, so the whole body runs in the context
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with matplotlib.rc_context(STYLE):
            return fn(*args, **kwargs)

    return wrapper


def new_figure(width=4.5, height=None):
    """A single-axes figure of the given width in inches (golden aspect)."""
    height = width * _GOLDEN if height is None else height
    fig = Figure(figsize=(width, height), layout="constrained")
    return fig, fig.add_subplot(1, 1, 1)


def save(fig, path):
    """Write ``fig`` to ``path``; the suffix picks the format (png, pdf, svg)."""
    path = Path(path)
    fmt = path.suffix.lstrip(".").lower() or "png"
    meta = {"png": {"Software": None}, "pdf": {"CreationDate": None, "Producer": None}, "svg": {"Date": None}}
    with matplotlib.rc_context(STYLE):
        fig.savefig(path, format=fmt, metadata=meta.get(fmt))
    return path


@_styled
def plot_multiplier(n, s, betas, values, hardy, beta_p=None):
    """beta -> lambda(n, s, beta) with the Hardy level and beta_p marked."""
    fig, ax = new_figure()
    ax.plot(betas, values, color="k")
    ax.axhline(hardy, color="0.5", ls="--", label=r"$\Lambda_{n,s}$")
    if beta_p is not None:
        ax.axvline(beta_p, color="C3", ls=":", label=r"$\beta_p$")
    ax.set_xlabel(r"$\beta$")
    ax.set_ylabel(r"$\lambda(n,s,\beta)$")
    ax.set_title(f"n = {n:g}, s = {s:g}")
    ax.legend(frameon=False)
    return fig


@_styled
def plot_phase_diagram(diagram):
    """Regime map on the (p, n) grid of a :class:`PhaseDiagram`."""
    fig, ax = new_figure()
    codes = np.vectorize(_REGIME_ORDER.index)(diagram.tags)
    ax.pcolormesh(
        diagram.p_values, diagram.n_values, codes, shading="nearest", cmap="viridis", vmin=0, vmax=3
    )
    for k, name in enumerate(_REGIME_ORDER):
        ax.plot([], [], "s", color=_cmap_color(k), label=name)
    ax.set_xlabel("p")
    ax.set_ylabel("n")
    ax.set_title(f"s = {diagram.s:g}")
    ax.legend(frameon=False, loc="upper right")
    return fig


def _cmap_color(k):
    return colormaps["viridis"](k / 3.0)


@_styled
def plot_profile(r, u, labels=None, log=False, title=""):
    """Components of a radial profile against r."""
    fig, ax = new_figure()
    u = np.atleast_2d(np.asarray(u).T).T
    for i in range(u.shape[1]):
        label = labels[i] if labels else f"u_{i + 1}"
        ax.plot(r, u[:, i], label=label)
    if log:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("r")
    ax.set_ylabel("u")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    return fig


@_styled
def plot_energy_curve(curve):
    """E(lambda) from an :class:`EnergyCurve`."""
    fig, ax = new_figure()
    ax.plot(curve.lambdas, curve.values, "o-", color="k", ms=3)
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel(r"$E_1$" if curve.s == 1 else r"$E_2$")
    return fig


@_styled
def plot_angular(ps, c2, c3):
    """The two nontrivial stability coefficients against p."""
    fig, ax = new_figure()
    ax.plot(ps, c2, label=r"$c_2$")
    ax.plot(ps, c3, label=r"$c_3$")
    ax.axhline(0.0, color="0.5", lw=0.8)
    ax.set_xlabel("p")
    ax.legend(frameon=False)
    return fig


@_styled
def plot_kernel(alphas, cs, table):
    """K_alpha(c) against c, one line per alpha."""
    fig, ax = new_figure()
    for a, row in zip(alphas, table):
        ax.plot(cs, row, label=rf"$\alpha$ = {a:.3g}")
    ax.set_xlabel(r"$c = \langle\theta,\sigma\rangle$")
    ax.set_ylabel(r"$K_\alpha(c)$")
    ax.set_yscale("log")
    ax.legend(frameon=False, ncol=2)
    return fig

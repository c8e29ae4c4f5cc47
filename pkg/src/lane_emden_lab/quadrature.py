"""Vectorised adaptive Gauss-Legendre quadrature over prescribed breakpoints.

The radial solutions are piecewise polynomials between integrator nodes, so
integrals are split at those nodes first; each panel is then compared at two
Gauss orders and bisected until the two agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError

__all__ = ["QuadratureSpec", "integrate_panels", "panel_integrals"]

_LO_X, _LO_W = np.polynomial.legendre.leggauss(10)
_HI_X, _HI_W = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for adaptive quadrature.

    ``folding`` applies to the principal-value integrals of the fractional
    module and is ignored elsewhere.
    """

    rel_tol: float = 1e-8
    max_subdivisions: int = 2000
    folding: bool = True

    def __post_init__(self):
        if not 0 < self.rel_tol < 1:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol!r}")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")


def _rule(f, a, b, x, w):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    pts = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
    return half * (vals @ w)


def integrate_panels(f, a, b, breaks=(), rel_tol=1e-12, abs_tol=0.0, max_levels=40):
    """Integrate a vectorised ``f`` over [a, b].

    Parameters
    ----------
    f : callable
        Maps a 1-D array of abscissae to values of the same shape.
    breaks : array_like
        Interior points where ``f`` may lose smoothness.
    """
    if b < a:
        return -integrate_panels(f, b, a, breaks, rel_tol, abs_tol, max_levels)
    if b == a:
        return 0.0
    br = np.asarray(breaks, dtype=float)
    br = br[(br > a) & (br < b)]
    edges = np.unique(np.concatenate(([a], br, [b])))
    lo, hi = edges[:-1], edges[1:]
    total = 0.0
    for _ in range(max_levels):
        coarse = _rule(f, lo, hi, _LO_X, _LO_W)
        fine = _rule(f, lo, hi, _HI_X, _HI_W)
        err = np.abs(fine - coarse)
        scale = abs(total + fine.sum())
        # per-panel share of the budget, proportional to panel length
        budget = max(rel_tol * scale, abs_tol) * (hi - lo) / (b - a)
        ok = err <= np.maximum(budget, 1e-15 * np.abs(fine))
        total += fine[ok].sum()
        if ok.all():
            return float(total)
        lo, hi = lo[~ok], hi[~ok]
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate((lo, mid)), np.concatenate((mid, hi))
        order = np.argsort(lo)
        lo, hi = lo[order], hi[order]
    raise ConvergenceError(
        f"panel quadrature did not converge on [{a}, {b}]",
        estimate=float(total + _rule(f, lo, hi, _HI_X, _HI_W).sum()),
    )


def panel_integrals(f, edges, rel_tol=1e-13, max_levels=40):
    """Integral of ``f`` over each panel [edges[k], edges[k+1]].

    Panels are refined independently until the two Gauss orders agree to
    ``rel_tol`` times the total magnitude, shared in proportion to length.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("edges must be a strictly increasing 1-D array of length >= 2")
    owner = np.arange(edges.size - 1)
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    out = np.zeros(edges.size - 1)
    span = edges[-1] - edges[0]
    scale = None
    for _ in range(max_levels):
        coarse = _rule(f, lo, hi, _LO_X, _LO_W)
        fine = _rule(f, lo, hi, _HI_X, _HI_W)
        if scale is None:
            scale = float(np.abs(fine).sum())
        err = np.abs(fine - coarse)
        budget = rel_tol * scale * (hi - lo) / span
        ok = err <= np.maximum(budget, 1e-15 * np.abs(fine))
        np.add.at(out, owner[ok], fine[ok])
        if ok.all():
            return out
        lo, hi, owner = lo[~ok], hi[~ok], owner[~ok]
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate((lo, mid)), np.concatenate((mid, hi))
        owner = np.concatenate((owner, owner))
    raise ConvergenceError("per-panel quadrature did not converge", estimate=out)

"""Critical exponents and the classification of (n, s, p) into regimes.

Two thresholds organise the theory. The Sobolev exponent
``p_S = (n+2s)/(n-2s)`` separates sub- from supercritical growth. Above it
the singular solution ``A |x|^(-2s/(p-1))`` exists, and it is unstable
exactly when ``p * lambda(n, s, 2s/(p-1)) > Lambda_{n,s}``; the root of
that inequality in p is the Joseph-Lundgren type exponent. Below it,
solutions that are stable outside a compact set are trivial.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, UnsupportedError
from .gamma_core import hardy_constant, power_law_multiplier
from .params import ProblemParams

__all__ = [
    "ProblemParams",
    "RegimeTag",
    "Regime",
    "PhaseDiagram",
    "sobolev_exponent",
    "jl_exponent_closed_form",
    "jl_exponent_root",
    "jl_exponent",
    "stability_margin",
    "fractional_condition",
    "classify",
    "phase_diagram",
]

_TIE_RTOL = 1e-12
_ROOT_CEILING = 1e6


class RegimeTag(str, enum.Enum):
    SUBCRITICAL_TRIVIAL = "SubcriticalTrivial"
    CRITICAL_FINITE_ENERGY = "CriticalFiniteEnergy"
    SUPERCRITICAL_TRIVIAL = "SupercriticalTrivial"
    UNCLASSIFIED = "Unclassified"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Regime:
    """Classification verdict.

    ``margin`` is ``p * lambda(beta_p) - Lambda_{n,s}`` for supercritical p
    and 0 otherwise. ``note`` carries caveats worth surfacing in reports.
    """

    tag: RegimeTag
    margin: float = 0.0
    note: str = ""


def sobolev_exponent(n, s):
    """(n+2s)/(n-2s) if n > 2s, else +inf."""
    n, s = float(n), float(s)
    if n > 2.0 * s:
        return (n + 2.0 * s) / (n - 2.0 * s)
    return math.inf


def _pc_laplacian(n):
    if n <= 10:
        return math.inf
    return ((n - 2.0) ** 2 - 4.0 * n + 8.0 * math.sqrt(n - 1.0)) / ((n - 2.0) * (n - 10.0))


def _pc_bilaplacian(n):
    if n <= 12:
        return math.inf
    inner = math.sqrt(n * n + 4.0 - n * math.sqrt(n * n - 8.0 * n + 32.0))
    return (n + 2.0 - inner) / (n - 6.0 - inner)


def jl_exponent_closed_form(n, s):
    """Closed-form Joseph-Lundgren exponent for s = 1 or s = 2.

    Infinite for n <= 10 (s = 1) and n <= 12 (s = 2).
    """
    if s == 1:
        return _pc_laplacian(float(n))
    if s == 2:
        return _pc_bilaplacian(float(n))
    raise UnsupportedError(
        f"closed form exists only for s in {{1, 2}}, got s={s!r}; use jl_exponent_root"
    )


def stability_margin(n, s, p):
    """p * lambda(n, s, 2s/(p-1)) - Lambda_{n,s}.

    Positive means the singular solution is unstable (and the Liouville
    condition holds); the 4^s factors cancel against the Gamma-ratio form.
    """
    beta = 2.0 * s / (p - 1.0)
    return p * power_law_multiplier(n, s, beta) - hardy_constant(n, s)


def jl_exponent_root(n, s, ceiling=_ROOT_CEILING):
    """Threshold p* > p_S where the singular solution becomes stable.

    Scans a log grid in p - 1 on (p_S (1 + 1e-9), ceiling] for the sign
    change of :func:`stability_margin` and refines with Brent's method.
    Returns +inf when the margin stays positive up to ``ceiling``.
    """
    n, s = float(n), float(s)
    if not n > 2.0 * s:
        raise DomainError(f"jl_exponent_root requires n > 2s, got n={n!r}, s={s!r}")
    lo = sobolev_exponent(n, s) * (1.0 + 1e-9)
    grid = 1.0 + np.geomspace(lo - 1.0, ceiling - 1.0, 400)
    prev_p, prev_g = grid[0], stability_margin(n, s, grid[0])
    for p in grid[1:]:
        g = stability_margin(n, s, p)
        if g <= 0.0 < prev_g:
            if g == 0.0:
                return float(p)
            return brentq(
                lambda q: stability_margin(n, s, q),
                prev_p,
                p,
                xtol=1e-300,
                rtol=1e-15,
                maxiter=500,
            )
        prev_p, prev_g = p, g
    return math.inf


def jl_exponent(n, s):
    """Closed form for s in {1, 2}, root search otherwise."""
    if s in (1, 2):
        return jl_exponent_closed_form(n, s)
    return jl_exponent_root(n, s)


def _coerce(params_or_n, s=None, p=None):
    if isinstance(params_or_n, ProblemParams):
        return params_or_n
    return ProblemParams(n=params_or_n, s=s, p=p)


def fractional_condition(params, s=None, p=None):
    """Whether p * lambda(beta_p) > Lambda_{n,s}, with the signed margin.

    Accepts a :class:`ProblemParams` or ``(n, s, p)``. Requires
    ``beta_p = 2s/(p-1)`` inside (0, n-2s).
    """
    prm = _coerce(params, s, p)
    if not prm.n > 2 * prm.s:
        raise DomainError(f"fractional_condition requires n > 2s, got n={prm.n}, s={prm.s}")
    margin = stability_margin(prm.n, prm.s, prm.p)
    return margin > 0.0, margin


def _cubic_note(prm):
    # the cubic two-component case is often quoted as trivial for n < 12 only
    # the formulas include n = 12
    if prm.s == 1 and prm.p == 3 and prm.n == 12:
        return (
            "p_c(12) = 3.927 > 3 so the formulas classify n=12 as trivial; "
            "a stated range of n < 12, n != 4 would leave it out"
        )
    return ""


def classify(params, s=None, p=None):
    """Regime of a parameter triple.

    SubcriticalTrivial for 1 < p < p_S, CriticalFiniteEnergy at p = p_S
    (relative tolerance 1e-12), SupercriticalTrivial for p > p_S when the
    Gamma condition holds, Unclassified otherwise (including the JL tie).
    """
    prm = _coerce(params, s, p)
    n, s, p = prm.n, prm.s, prm.p
    if not n > 2 * s:
        raise DomainError(f"classify requires n > 2s, got n={n!r}, s={s!r}")
    note = _cubic_note(prm)
    p_s = sobolev_exponent(n, s)
    if abs(p - p_s) <= _TIE_RTOL * p_s:
        return Regime(RegimeTag.CRITICAL_FINITE_ENERGY, 0.0, note)
    if p < p_s:
        return Regime(RegimeTag.SUBCRITICAL_TRIVIAL, 0.0, note)
    margin = stability_margin(n, s, p)
    if margin > _TIE_RTOL * hardy_constant(n, s):
        return Regime(RegimeTag.SUPERCRITICAL_TRIVIAL, margin, note)
    return Regime(RegimeTag.UNCLASSIFIED, min(margin, 0.0), note)


@dataclass
class PhaseDiagram:
    """Regime tags on an (n, p) grid; rows follow n, columns follow p."""

    n_values: np.ndarray
    p_values: np.ndarray
    s: float
    tags: np.ndarray
    margins: np.ndarray

    def supercritical_boundary(self):
        """For each n, the midpoint between the last SupercriticalTrivial
        cell and the next Unclassified cell in p (inf if none)."""
        out = np.full(len(self.n_values), np.inf)
        for i, row in enumerate(self.tags):
            for j in range(len(row) - 1):
                if (
                    row[j] == RegimeTag.SUPERCRITICAL_TRIVIAL.value
                    and row[j + 1] == RegimeTag.UNCLASSIFIED.value
                ):
                    out[i] = 0.5 * (self.p_values[j] + self.p_values[j + 1])
                    break
        return out

    def sobolev_boundary(self):
        """For each n, the first p whose cell is no longer SubcriticalTrivial."""
        out = np.full(len(self.n_values), np.inf)
        for i, row in enumerate(self.tags):
            idx = np.flatnonzero(row != RegimeTag.SUBCRITICAL_TRIVIAL.value)
            if idx.size:
                out[i] = self.p_values[idx[0]]
        return out


def phase_diagram(n_values, p_values, s):
    """Classify every (n, p) node of a tensor grid.

    Each node is the centre of its cell; the grid is row-major in n.
    """
    ns = np.asarray(n_values, dtype=float)
    ps = np.asarray(p_values, dtype=float)
    if ns.ndim != 1 or ps.ndim != 1 or ns.size < 1 or ps.size < 1:
        raise DomainError("phase_diagram needs non-empty 1-D n and p grids")
    tags = np.empty((ns.size, ps.size), dtype=object)
    margins = np.zeros((ns.size, ps.size))
    for i, n in enumerate(ns):
        for j, p in enumerate(ps):
            r = classify(ProblemParams(n=float(n), s=s, p=float(p)))
            tags[i, j] = r.tag.value
            margins[i, j] = r.margin
    return PhaseDiagram(ns, ps, float(s), tags, margins)

"""Explicit homogeneous solutions u(x) = A |x|^(-2s/(p-1)).

The amplitude satisfies |A|^(p-1) = lambda(n, s, 2s/(p-1)); the direction
of A in R^m is free because the components interact only through |u|.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedError
from .exponents import sobolev_exponent, stability_margin
from .gamma_core import (
    bilaplacian_power_factor,
    laplacian_power_factor,
    power_law_multiplier,
    sphere_area,
)
from .params import ProblemParams

__all__ = [
    "SingularSolution",
    "GrowthKind",
    "make_singular",
    "residual_local",
    "is_singular_stable",
    "growth_integral",
    "growth_exponent",
]


@dataclass(frozen=True)
class SingularSolution:
    params: ProblemParams
    amplitude: float
    direction: np.ndarray
    beta: float

    @property
    def vector(self):
        """The amplitude vector A in R^m."""
        return self.amplitude * self.direction

    def value(self, r):
        """u(r) as an array of shape (..., m)."""
        r = np.asarray(r, dtype=float)
        return np.multiply.outer(r ** -self.beta, self.vector)


class GrowthKind(str, enum.Enum):
    LP1 = "Lp1"
    L2 = "L2"
    GRADSQ = "GradSq"


def _unit(direction, m):
    if direction is None:
        e = np.zeros(m)
        e[0] = 1.0
        return e
    d = np.asarray(direction, dtype=float).reshape(-1)
    if d.size != m:
        raise DomainError(f"direction must have {m} components, got {d.size}")
    norm = np.linalg.norm(d)
    if not abs(norm - 1.0) <= 1e-12:
        raise DomainError(f"direction must be a unit vector, |d| = {norm!r}")
    return d / norm


def make_singular(params, direction=None):
    """Singular solution for supercritical p; ``direction`` defaults to e_1."""
    p_s = sobolev_exponent(params.n, params.s)
    if not params.p > p_s:
        raise DomainError(
            f"singular solution needs p > p_S = {p_s!r}, got p={params.p!r}"
        )
    beta = params.beta
    amp = power_law_multiplier(params.n, params.s, beta) ** (1.0 / (params.p - 1.0))
    return SingularSolution(params, amp, _unit(direction, params.m), beta)


def residual_local(sol, r):
    """(-Delta)^s u_i - |u|^(p-1) u_i at radius r, for s in {1, 2}.

    Uses the exact action of the Laplacian and bi-Laplacian on r^-beta, so
    the result is rounding error when the amplitude is right.
    """
    prm = sol.params
    if prm.s == 1:
        factor = laplacian_power_factor(prm.n, sol.beta)
    elif prm.s == 2:
        factor = bilaplacian_power_factor(prm.n, sol.beta)
    else:
        raise UnsupportedError(
            f"residual_local covers s in {{1, 2}} only, got s={prm.s!r}"
        )
    if not r > 0:
        raise DomainError(f"radius must be > 0, got {r!r}")
    a = sol.vector
    lhs = factor * a * r ** (-sol.beta - 2 * prm.s)
    rhs = np.linalg.norm(a) ** (prm.p - 1) * a * r ** (-sol.beta * prm.p)
    return lhs - rhs


def is_singular_stable(params):
    """Stability of the singular solution: p |A|^(p-1) <= Lambda_{n,s}.

    Returns ``(stable, margin)`` with margin = Lambda - p lambda(beta_p).
    """
    p_s = sobolev_exponent(params.n, params.s)
    if not params.p > p_s:
        raise DomainError(f"stability of u_s needs p > p_S = {p_s!r}, got p={params.p!r}")
    margin = -stability_margin(params.n, params.s, params.p)
    return margin >= 0.0, margin


def growth_exponent(n, beta, which):
    """Exponent sigma with integral over B_R equal to const * R^sigma."""
    which = GrowthKind(which)
    if which is GrowthKind.L2:
        return n - 2.0 * beta
    if which is GrowthKind.GRADSQ:
        return n - 2.0 * beta - 2.0
    raise ValueError("Lp1 exponent depends on p; use growth_integral")


def growth_integral(sol, R, which):
    """Closed-form ball integral of |u|^(p+1), |u|^2 or sum |grad u_i|^2 over B_R."""
    which = GrowthKind(which)
    prm = sol.params
    n, b, a = prm.n, sol.beta, sol.amplitude
    if which is GrowthKind.LP1:
        sigma, coef = n - (prm.p + 1.0) * b, a ** (prm.p + 1.0)
    elif which is GrowthKind.L2:
        sigma, coef = n - 2.0 * b, a * a
    else:
        sigma, coef = n - 2.0 * b - 2.0, (a * b) ** 2
    if not sigma > 0:
        raise DomainError(
            f"{which.value} integral diverges at the origin (exponent {sigma!r} <= 0)"
        )
    if not R > 0:
        raise DomainError(f"radius must be > 0, got {R!r}")
    return sphere_area(n) * coef * R**sigma / sigma

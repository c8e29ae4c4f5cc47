"""Quadratures behind the fractional Laplacian of power laws.

For 0 < s < 1 the fractional Laplacian of r^-a at |x| = 1 reduces, after
the substitution |y| = t, to

    C_{n,s} PV int_0^inf int_{S^(n-1)} (1 - t^-a) t^(n-1)
                          / (t^2 + 1 - 2 t <theta, sigma>)^((n+2s)/2) dsigma dt,

which equals lambda(n, s, a). Folding t -> 1/t onto (0, 1] turns the
numerator into (1 - t^-a) t^(n-1) + (1 - t^a) t^(2s-1). That combination
vanishes to second order at t = 1 and makes the principal value an
ordinary integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import ConvergenceError, DomainError, UnsupportedError
from .exponents import sobolev_exponent
from .gamma_core import log_gamma, sphere_area
from .quadrature import QuadratureSpec

__all__ = [
    "KernelQuery",
    "kernel_K",
    "kernel_monotonicity_gap",
    "fractional_normalization",
    "folded_numerator",
    "sphere_inner_integral",
    "A_constant_quadrature",
    "hardy_integral_quadrature",
]


@dataclass(frozen=True)
class KernelQuery:
    """Arguments of K_alpha(c); ``c`` is the inner product <theta, sigma>."""

    n: float
    s: float
    alpha: float
    c: float
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if not self.n > 0:
            raise DomainError(f"n must be > 0, got {self.n!r}")
        if not (0 < self.s < 2 and self.s != 1):
            raise DomainError(f"s must lie in (0, 1) or (1, 2), got {self.s!r}")
        if not self.n > 2 * self.s:
            raise DomainError(f"kernel needs n > 2s, got n={self.n!r}, s={self.s!r}")
        if not 0 <= self.alpha <= self.n - 2 * self.s:
            raise DomainError(
                f"alpha must lie in [0, n - 2s] = [0, {self.n - 2 * self.s!r}], got {self.alpha!r}"
            )
        if not -1 <= self.c < 1:
            raise DomainError(
                f"c must lie in [-1, 1); c = 1 is the non-integrable diagonal, got {self.c!r}"
            )


def _quad(f, a, b, spec, points=None, what="integral"):
    if points and spec.max_subdivisions < len(points) + 2:
        raise ConvergenceError(
            f"{what} needs max_subdivisions >= {len(points) + 2} for its breakpoints"
        )
    val, err, *rest = quad(
        f,
        a,
        b,
        epsabs=0.0,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        points=points,
        full_output=1,
    )
    if len(rest) >= 2 and rest[0].get("last", 0) >= spec.max_subdivisions:
        raise ConvergenceError(f"{what} hit max_subdivisions", estimate=val)
    if not err <= max(10 * spec.rel_tol * abs(val), 1e-300):
        raise ConvergenceError(
            f"{what} error estimate {err!r} above tolerance for value {val!r}", estimate=val
        )
    return val


def kernel_K(q):
    """K_alpha(c) = int_0^1 (t^(n-1-alpha) + t^(2s-1+alpha)) / (t^2 + 1 - 2tc)^((n+2s)/2) dt."""
    n, s, a, c = float(q.n), float(q.s), float(q.alpha), float(q.c)
    e1, e2, ex = n - 1.0 - a, 2.0 * s - 1.0 + a, 0.5 * (n + 2.0 * s)

    def f(t):
        return (t**e1 + t**e2) / (t * t + 1.0 - 2.0 * t * c) ** ex

    # the denominator is smallest at t = c; give the rule that point
    points = [c] if 0 < c < 1 else None
    return _quad(f, 0.0, 1.0, q.quad, points=points, what="kernel_K")


def kernel_monotonicity_gap(n, s, p, c, quad_spec=None):
    """K_{(n-2s)/2}(c) - K_{2s/(p-1)}(c); negative for supercritical p."""
    spec = quad_spec or QuadratureSpec()
    p_s = sobolev_exponent(n, s)
    if p < p_s:
        raise DomainError(f"gap needs p >= p_S = {p_s!r}, got p={p!r}")
    a_half = 0.5 * (n - 2.0 * s)
    a_p = 2.0 * s / (p - 1.0)
    if a_p == a_half or p == p_s:
        return 0.0
    k_half = kernel_K(KernelQuery(n, s, a_half, c, spec))
    k_p = kernel_K(KernelQuery(n, s, a_p, c, spec))
    return k_half - k_p


def fractional_normalization(n, s):
    """C_{n,s} = s 4^s Gamma(n/2 + s) / (pi^(n/2) Gamma(1 - s)), 0 < s < 1.

    The constant in front of the singular-integral form of (-Delta)^s.
    """
    if not 0 < s < 1:
        raise UnsupportedError(f"singular-integral normalisation needs 0 < s < 1, got s={s!r}")
    return math.exp(
        math.log(s)
        + s * math.log(4.0)
        + log_gamma(0.5 * n + s)
        - 0.5 * n * math.log(math.pi)
        - log_gamma(1.0 - s)
    )


_SERIES_CUTOFF = 0.1
_SERIES_TERMS = 40


def folded_numerator(n, s, a, ell, shift=0.0):
    """t^shift [(1 - t^-a) t^(n-1) + (1 - t^a) t^(2s-1)] at t = exp(ell), ell <= 0.

    Near ell = 0 the four exponentials cancel to O(ell^2), so a Taylor
    series in ell is used there. ``shift`` absorbs a Jacobian factor before
    the powers are formed, so t^(2s-1) cannot overflow as t -> 0.
    """
    ell = np.asarray(ell, dtype=float)
    A, B = n - 1.0, n - 1.0 - a
    C, D = 2.0 * s - 1.0, 2.0 * s - 1.0 + a
    out = np.empty_like(ell)
    small = np.abs(ell) < _SERIES_CUTOFF
    if small.any():
        x = ell[small]
        acc = np.zeros_like(x)
        term = np.ones_like(x)
        for k in range(1, _SERIES_TERMS + 1):
            term = term * x / k
            acc += term * (A**k - B**k + C**k - D**k)
        out[small] = acc * np.exp(shift * x)
    big = ~small
    if big.any():
        x = ell[big]
        # t^A - t^B + t^C - t^D = (t^a - 1)(t^B - t^C) since A - B = D - C = a
        out[big] = np.expm1(a * x) * (np.exp((B + shift) * x) - np.exp((C + shift) * x))
    return out


def sphere_inner_integral(n, s, t, spec=None):
    """int_{S^(n-1)} (t^2 + 1 - 2 t <theta, sigma>)^(-(n+2s)/2) dsigma for 0 <= t < 1.

    Reduced to omega_{n-2} int_0^pi (...) sin^(n-2) phi dphi, with
    omega_0 = 2 for the circle.
    """
    spec = spec or QuadratureSpec(rel_tol=1e-11)
    n = int(n)
    if n < 2:
        raise DomainError(f"sphere reduction needs integer n >= 2, got {n!r}")
    if not 0 <= t < 1:
        raise DomainError(f"t must lie in [0, 1), got {t!r}")
    ex = 0.5 * (n + 2.0 * s)
    gap = (1.0 - t) ** 2
    if t == 0:
        return sphere_area(n)

    def f(v):
        # phi = e^v; t^2 + 1 - 2t cos(phi) = (1-t)^2 + 4t sin^2(phi/2)
        phi = math.exp(v)
        d = gap + 4.0 * t * math.sin(0.5 * phi) ** 2
        return math.sin(phi) ** (n - 2) * phi / d**ex

    # in v = ln phi the mass is a bump of unit width around ln(1 - t)
    top = math.log(math.pi)
    centre = math.log(1.0 - t)
    pts = [x for x in (centre - 2.0, centre, centre + 2.0) if x < top]
    omega = 2.0 if n == 2 else sphere_area(n - 1)
    lo = min(centre, top) - 40.0 / max(n - 1.0, 1.0)
    return omega * _quad(f, lo, top, spec, points=pts or None, what="sphere integral")


def _pv_integral(n, s, a, spec):
    # outer integral over ell = ln t in (-inf, 0]; dt = t dell
    inner_spec = QuadratureSpec(rel_tol=min(1e-11, spec.rel_tol), max_subdivisions=spec.max_subdivisions)

    def g(ell):
        num = float(folded_numerator(n, s, a, np.array([ell]), shift=1.0)[0])
        if num == 0.0:
            return 0.0
        return num * sphere_inner_integral(n, s, math.exp(ell), inner_spec)

    if not spec.folding:
        raise UnsupportedError("the principal value is only evaluated in folded form")
    near = _quad(g, -1.0, 0.0, spec, points=[-1e-3, -1e-2, -1e-1], what="outer integral near t=1")
    far = _quad(g, -np.inf, -1.0, spec, what="outer integral near t=0")
    return near + far


def _check_pv(n, s):
    if not 0 < s < 1:
        raise UnsupportedError(
            f"the singular-integral form needs 0 < s < 1, got s={s!r}; use the Gamma closed form"
        )
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n!r}")


def A_constant_quadrature(n, s, p, quad_spec=None):
    """lambda(n, s, 2s/(p-1)) from the folded principal-value integral."""
    _check_pv(n, s)
    p_s = sobolev_exponent(n, s)
    if not p > p_s:
        raise DomainError(f"A constant needs p > p_S = {p_s!r}, got p={p!r}")
    spec = quad_spec or QuadratureSpec()
    a = 2.0 * s / (p - 1.0)
    return fractional_normalization(n, s) * _pv_integral(int(n), float(s), a, spec)


def hardy_integral_quadrature(n, s, quad_spec=None):
    """Lambda_{n,s} from the same integral with exponent a = (n - 2s)/2.

    The numerator is taken as 1 - t^(-(n-2s)/2), the convention the closed
    form requires.
    """
    _check_pv(n, s)
    if not n > 2 * s:
        raise DomainError(f"Hardy constant needs n > 2s, got n={n!r}, s={s!r}")
    spec = quad_spec or QuadratureSpec()
    a = 0.5 * (n - 2.0 * s)
    return fractional_normalization(n, s) * _pv_integral(int(n), float(s), a, spec)

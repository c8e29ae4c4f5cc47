"""Log-Gamma substrate and the closed-form constants built on it.

Every constant in the package that involves Gamma functions is evaluated as
the exponential of a sum of log-Gamma terms, so ratios such as
``Gamma(n/2) / Gamma(n/2 - s)`` stay finite for large ``n``.

The central object is the power-law multiplier ``lambda(n, s, beta)``, the
constant in ``(-Delta)^s |x|^-beta = lambda |x|^(-beta-2s)``::

    lambda = 4^s Gamma((beta+2s)/2) Gamma((n-beta)/2)
             / (Gamma(beta/2) Gamma((n-beta-2s)/2))

It gives the amplitude of the singular solution at ``beta = 2s/(p-1)`` and
the sharp Hardy constant at ``beta = (n-2s)/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import zetac

from .errors import DomainError

__all__ = [
    "log_gamma",
    "gamma",
    "sphere_area",
    "PowerLawMultiplierQuery",
    "power_law_multiplier",
    "log_power_law_multiplier",
    "hardy_constant",
    "kappa_s",
    "laplacian_power_factor",
    "bilaplacian_power_factor",
]

_EULER_GAMMA = 0.57721566490153286061
_LOG_PI = math.log(math.pi)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Lanczos approximation, g = 7, nine terms.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# (-1)^k (zeta(k) - 1) / k for the series of lnGamma(1+z); |z| <= 1/2
# makes the terms decay like 4^-k.
_SERIES = tuple((-1) ** k * float(zetac(k)) / k for k in range(2, 40))


def _lngamma_1p(z):
    """ln Gamma(1 + z) for |z| <= 1/2, accurate relative to the result."""
    acc = 0.0
    zk = z * z
    for c in _SERIES:
        term = c * zk
        acc += term
        if abs(term) <= 1e-18 * abs(acc):
            break
        zk *= z
    return (z - math.log1p(z)) - _EULER_GAMMA * z + acc


def _lngamma_lanczos(x):
    z = x - 1.0
    series = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        series += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(series)


def log_gamma(x):
    """Natural logarithm of Gamma(x) for real x > 0.

    Near the zeros of lnGamma at 1 and 2 a Taylor series in zeta values is
    used so the *relative* error stays small; arguments below 1/2 go through
    the reflection formula; everything else uses a Lanczos approximation.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"log_gamma requires a finite x > 0, got {x!r}")
    if x < 0.5:
        return _LOG_PI - math.log(math.sin(math.pi * x)) - log_gamma(1.0 - x)
    if x < 1.5:
        return _lngamma_1p(x - 1.0)
    if x < 2.5:
        z = x - 2.0
        return math.log1p(z) + _lngamma_1p(z)
    return _lngamma_lanczos(x)


def gamma(x):
    """Gamma(x) for real x, raising DomainError at the poles 0, -1, -2, ..."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma requires a finite argument, got {x!r}")
    if x <= 0.0 and x == math.floor(x):
        raise DomainError(f"gamma has a pole at x = {x:g}")
    if x > 0.0:
        return math.exp(log_gamma(x))
    # reflection for negative non-integers
    return math.pi / (math.sin(math.pi * x) * math.exp(log_gamma(1.0 - x)))


def sphere_area(n):
    """Surface measure of the unit sphere S^(n-1) in R^n: 2 pi^(n/2) / Gamma(n/2)."""
    n = float(n)
    if not n > 0.0:
        raise DomainError(f"sphere_area requires n > 0, got {n!r}")
    return math.exp(math.log(2.0) + 0.5 * n * _LOG_PI - log_gamma(0.5 * n))


@dataclass(frozen=True)
class PowerLawMultiplierQuery:
    """Arguments of the power-law multiplier, validated on construction."""

    n: float
    s: float
    beta: float

    def __post_init__(self):
        if not self.n > 0:
            raise DomainError(f"dimension n must be > 0, got {self.n!r}")
        if not 0 < self.s <= 2:
            raise DomainError(f"order s must lie in (0, 2], got {self.s!r}")
        if not self.beta > 0:
            raise DomainError(f"beta must be > 0, got beta={self.beta!r}")
        upper = self.n - 2 * self.s
        if not self.beta < upper:
            raise DomainError(
                f"beta must be < n - 2s = {upper!r}, got beta={self.beta!r}"
            )


def log_power_law_multiplier(n, s, beta):
    """Logarithm of :func:`power_law_multiplier`."""
    q = PowerLawMultiplierQuery(float(n), float(s), float(beta))
    n, s, b = q.n, q.s, q.beta
    return (
        2.0 * s * math.log(2.0)
        + log_gamma(0.5 * (b + 2.0 * s))
        + log_gamma(0.5 * (n - b))
        - log_gamma(0.5 * b)
        - log_gamma(0.5 * (n - b - 2.0 * s))
    )


def power_law_multiplier(n, s, beta):
    """Constant lambda with (-Delta)^s |x|^-beta = lambda |x|^(-beta-2s).

    Requires 0 < beta < n - 2s; the endpoints are rejected rather than
    clamped. For s = 1 this reduces to beta (n - 2 - beta) and for s = 2 to
    beta (beta + 2)(n - beta - 2)(n - beta - 4).
    """
    return math.exp(log_power_law_multiplier(n, s, beta))


def laplacian_power_factor(n, beta):
    """beta (n - 2 - beta): -Delta r^-beta = factor * r^(-beta-2)."""
    return beta * (n - 2.0 - beta)


def bilaplacian_power_factor(n, beta):
    """beta (beta+2)(n-beta-2)(n-beta-4): Delta^2 r^-beta = factor * r^(-beta-4)."""
    return beta * (beta + 2.0) * (n - beta - 2.0) * (n - beta - 4.0)


def hardy_constant(n, s):
    """Sharp constant of the fractional Hardy inequality,
    4^s Gamma((n+2s)/4)^2 / Gamma((n-2s)/4)^2, defined for n > 2s."""
    n, s = float(n), float(s)
    if not 0 < s <= 2:
        raise DomainError(f"order s must lie in (0, 2], got {s!r}")
    if not n > 2 * s:
        raise DomainError(f"hardy_constant requires n > 2s, got n={n!r}, s={s!r}")
    return math.exp(
        2.0 * s * math.log(2.0)
        + 2.0 * log_gamma(0.25 * (n + 2.0 * s))
        - 2.0 * log_gamma(0.25 * (n - 2.0 * s))
    )


def kappa_s(s):
    """Boundary constant Gamma(1-s) / (2^(2s-1) Gamma(s)) of the s-harmonic extension."""
    s = float(s)
    if not 0 < s < 1:
        raise DomainError(f"kappa_s requires 0 < s < 1, got {s!r}")
    return math.exp(
        log_gamma(1.0 - s) - (2.0 * s - 1.0) * math.log(2.0) - log_gamma(s)
    )

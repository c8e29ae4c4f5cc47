"""Homogeneous solutions on the sphere and the instability of singular ones.

A homogeneous solution r^(-q) psi(theta) of the fourth-order system turns
into an equation on S^(n-1) with coefficients alpha and beta (q = 4/(p-1)).
Testing stability with phi = r^(-(n-4)/2) psi eta(r) leaves three
coefficients whose signs decide triviality; the last one is the singular
stability margin.

The probe below evaluates the stability quadratic form of the singular
solution on phi_eps = r^(-(n-2s)/2) eta_eps(r). In t = ln r the form
becomes a one-dimensional integral:

    s = 1:  Q / omega = int (eta' - g eta)^2 - p lam eta^2 dt,  g = (n-2)/2
    s = 2:  Q / omega = int (eta'' + 2 eta' - k eta)^2 - p lam eta^2 dt,
            k = n (n-4) / 4
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainError
from .exponents import jl_exponent, sobolev_exponent
from .gamma_core import hardy_constant, power_law_multiplier
from .singular import make_singular
from .params import ProblemParams

__all__ = [
    "AngularCoefficients",
    "angular_coefficients",
    "constant_solution_check",
    "stability_triple",
    "stability_pair",
    "C2Finding",
    "c2_survey",
    "RampProfile",
    "CutoffSpec",
    "ProbeResult",
    "singular_instability_probe",
    "probe_closed_form",
]


@dataclass(frozen=True)
class AngularCoefficients:
    q: float
    alpha: float
    beta: float


def angular_coefficients(n, p):
    """q = 4/(p-1), alpha = (q+2)(n-4-q) + q(n-2-q), beta = q(q+2)(n-4-q)(n-2-q)."""
    if not p > 1:
        raise DomainError(f"p must be > 1, got {p!r}")
    n = float(n)
    q = 4.0 / (p - 1.0)
    alpha = (q + 2.0) * (n - 4.0 - q) + q * (n - 2.0 - q)
    beta = q * (q + 2.0) * (n - 4.0 - q) * (n - 2.0 - q)
    return AngularCoefficients(q, alpha, beta)


def constant_solution_check(n, p):
    """Amplitude of the constant angular solution, beta^(1/(p-1)).

    Equals the singular amplitude for s = 2; raises if the two disagree
    beyond rounding.
    """
    p_s = sobolev_exponent(n, 2)
    if not p > p_s:
        raise DomainError(f"constant solution needs p > p_S = {p_s!r}, got p={p!r}")
    beta = angular_coefficients(n, p).beta
    amp = beta ** (1.0 / (p - 1.0))
    ref = make_singular(ProblemParams(n=n, s=2, p=p)).amplitude
    if not abs(amp - ref) <= 1e-12 * max(abs(ref), 1.0):
        raise AssertionError(f"angular amplitude {amp!r} disagrees with singular amplitude {ref!r}")
    return amp


def stability_triple(n, p):
    """(p - 1, p alpha - n(n-4)/2, p beta - n^2 (n-4)^2 / 16).

    All three positive means the only stable homogeneous solution is 0.
    """
    if not n >= 5:
        raise DomainError(f"stability_triple needs n >= 5, got n={n!r}")
    co = angular_coefficients(n, p)
    n = float(n)
    return (p - 1.0, p * co.alpha - n * (n - 4.0) / 2.0, p * co.beta - n * n * (n - 4.0) ** 2 / 16.0)


def stability_pair(n, p):
    """Second-order analogue: (p - 1, p beta_1 - (n-2)^2/4), beta_1 = lambda(n, 1, 2/(p-1))."""
    if not n > 2:
        raise DomainError(f"stability_pair needs n > 2, got n={n!r}")
    b1 = power_law_multiplier(n, 1, 2.0 / (p - 1.0))
    return (p - 1.0, p * b1 - (float(n) - 2.0) ** 2 / 4.0)


@dataclass(frozen=True)
class C2Finding:
    """Sign record of c2 = p alpha - n(n-4)/2 on (p_S(n,2), p_c(n))."""

    n: int
    p_low: float
    p_high: float
    min_c2: float
    argmin_p: float
    positive: bool


def c2_survey(n_values, samples=400):
    """Probe the sign of c2 between the Sobolev and Joseph-Lundgren exponents.

    For n <= 12 the upper end is infinite and the scan stops at p = 1e6.
    """
    out = []
    for n in n_values:
        lo = sobolev_exponent(n, 2)
        hi = jl_exponent(n, 2)
        top = hi if math.isfinite(hi) else 1e6
        ps = 1.0 + np.geomspace(lo - 1.0, top - 1.0, samples)
        c2 = np.array([stability_triple(n, p)[1] for p in ps])
        k = int(np.argmin(c2))
        out.append(C2Finding(int(n), lo, hi, float(c2[k]), float(ps[k]), bool(np.all(c2 > 0))))
    return out


# ------------------------------------------------------------------ probe


class RampProfile(str, enum.Enum):
    """Shape of eta on the ramps, as a function of ln r.

    ``loglinear`` has kinks, so it only has the H^1 regularity the s = 1
    form needs. ``logsmoothstep`` (3x^2 - 2x^3) is C^1 with bounded second
    derivative and is required for s = 2.
    """

    LOGLINEAR = "loglinear"
    LOGSMOOTHSTEP = "logsmoothstep"


@dataclass(frozen=True)
class CutoffSpec:
    """eta_eps = 1 on [eps, 1/eps], 0 outside [eps/2, 2/eps], ramps in ln r."""

    epsilon: float
    profile: RampProfile | None = None

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if self.profile is not None:
            object.__setattr__(self, "profile", RampProfile(self.profile))

    def resolved(self, s):
        if self.profile is not None:
            if s == 2 and self.profile is RampProfile.LOGLINEAR:
                raise DomainError("a log-linear ramp is not in H^2; use logsmoothstep for s = 2")
            return self.profile
        return RampProfile.LOGLINEAR if s == 1 else RampProfile.LOGSMOOTHSTEP

    def knots(self):
        """The four breakpoints in t = ln r."""
        L, e = math.log(2.0), math.log(self.epsilon)
        return (e - L, e, -e, -e + L)


def _ramp(profile, x):
    """(S, S', S'') of the unit ramp on [0, 1]."""
    if profile is RampProfile.LOGLINEAR:
        return x, np.ones_like(x), np.zeros_like(x)
    return 3 * x * x - 2 * x**3, 6 * x - 6 * x * x, 6 - 12 * x


def _eta(cut, profile, t):
    """(eta, eta', eta'') in t = ln r on the support."""
    t0, t1, t2, t3 = cut.knots()
    L = t1 - t0
    t = np.asarray(t, dtype=float)
    eta, d1, d2 = np.zeros_like(t), np.zeros_like(t), np.zeros_like(t)
    up = (t >= t0) & (t < t1)
    S, S1, S2 = _ramp(profile, (t[up] - t0) / L)
    eta[up], d1[up], d2[up] = S, S1 / L, S2 / L**2
    flat = (t >= t1) & (t <= t2)
    eta[flat] = 1.0
    down = (t > t2) & (t <= t3)
    S, S1, S2 = _ramp(profile, (t3 - t[down]) / L)
    eta[down], d1[down], d2[down] = S, -S1 / L, S2 / L**2
    return eta, d1, d2


@dataclass(frozen=True)
class ProbeResult:
    """Pieces of Q(phi_eps) / omega_{n-1}.

    ``quadratic_form`` = ``kinetic`` - ``potential`` where ``potential`` is
    p lam int eta^2 dt. ``hardy_gap`` is Lambda - p lam, so
    ``quadratic_form / potential`` tends to ``hardy_gap / (p lam)`` as
    eps -> 0 (the ramp contributions stay bounded).
    """

    quadratic_form: float
    kinetic: float
    potential: float
    mass: float
    hardy_gap: float
    profile: RampProfile

    @property
    def ratio(self):
        return self.quadratic_form / self.potential


def _probe_setup(n, s, p):
    if s not in (1, 2):
        raise DomainError(f"probe covers s in {{1, 2}}, got s={s!r}")
    p_s = sobolev_exponent(n, s)
    if not p > p_s:
        raise DomainError(f"probe needs p > p_S = {p_s!r}, got p={p!r}")
    lam = power_law_multiplier(n, s, 2.0 * s / (p - 1.0))
    return lam, hardy_constant(n, s)


def singular_instability_probe(n, s, p, cutoff):
    """Q(phi_eps) for the singular solution, by quadrature in t = ln r.

    Negative values certify instability of the singular solution.
    """
    lam, Lam = _probe_setup(n, s, p)
    profile = cutoff.resolved(s)
    n = float(n)
    knots = cutoff.knots()

    if s == 1:
        g = (n - 2.0) / 2.0

        def kin(t):
            e, d1, _ = _eta(cutoff, profile, np.array([t]))
            return float((d1[0] - g * e[0]) ** 2)

    else:
        k = n * (n - 4.0) / 4.0

        def kin(t):
            e, d1, d2 = _eta(cutoff, profile, np.array([t]))
            return float((d2[0] + 2.0 * d1[0] - k * e[0]) ** 2)

    def mass_density(t):
        return float(_eta(cutoff, profile, np.array([t]))[0][0] ** 2)

    kinetic = mass = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        kinetic += quad(kin, a, b, epsabs=0.0, epsrel=1e-12, limit=200)[0]
        mass += quad(mass_density, a, b, epsabs=0.0, epsrel=1e-12, limit=200)[0]
    potential = p * lam * mass
    return ProbeResult(kinetic - potential, kinetic, potential, mass, Lam - p * lam, profile)


def probe_closed_form(n, s, p, cutoff):
    """Exact Q(phi_eps)/omega from the ramp moments.

    Integrating by parts, Q/omega = int eta'^2 + (Lambda - p lam) int eta^2
    for s = 1 and int eta''^2 + (4 + n(n-4)/2) int eta'^2
    + (Lambda - p lam) int eta^2 for s = 2.
    """
    lam, Lam = _probe_setup(n, s, p)
    profile = cutoff.resolved(s)
    L = math.log(2.0)
    plateau = -2.0 * math.log(cutoff.epsilon)
    if profile is RampProfile.LOGLINEAR:
        m0, m1, m2 = L / 3.0, 1.0 / L, 0.0
    else:
        m0, m1, m2 = 13.0 * L / 35.0, 6.0 / (5.0 * L), 12.0 / L**3
    mass = plateau + 2 * m0
    d1sq, d2sq = 2 * m1, 2 * m2
    n = float(n)
    if s == 1:
        q = d1sq + (Lam - p * lam) * mass
    else:
        q = d2sq + (4.0 + n * (n - 4.0) / 2.0) * d1sq + (Lam - p * lam) * mass
    return q

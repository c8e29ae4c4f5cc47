"""Monotonicity functionals E_1 (s = 1) and E_2 (s = 2) along radial solutions.

Everything is centred at the origin. Ball integrals reduce to
``omega_{n-1} int_0^lam g(r) r^(n-1) dr`` and sphere integrals to
``omega_{n-1} lam^(n-1) g(lam)``. Integrals up to each integrator node are
cached per solution so that E(lam) varies smoothly in lam and finite
differences in lam are not swamped by quadrature noise.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedError
from .gamma_core import sphere_area
from .quadrature import integrate_panels, panel_integrals
from .radial import blow_down
from .tables import dump_json, write_csv

__all__ = [
    "EnergyCurve",
    "E2Breakdown",
    "GrowthFit",
    "energy_E1",
    "energy_E1_derivative_identity",
    "energy_E2",
    "energy_E2_breakdown",
    "energy_E2_derivative_bound",
    "energy_scan",
    "scale_invariance_check",
    "growth_slope",
    "tangential_gradient_sq",
]

_QUAD_TOL = 1e-13
_MONO_SLACK = 1e-8
_FD_REL_STEP = 1e-4


# ---------------------------------------------------------------- sampling


def _values(sol, r):
    """(u, du, w, dw) at radii r; homogeneous samples extend to all r > 0."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if sol.homogeneity is not None:
        if np.any(r <= 0):
            raise DomainError("radius must be > 0 for a homogeneous sample")
        return sol._state(r)
    return sol.evaluate(r)


def _check_lam(sol, lam, h=0.0):
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam!r}")
    top = lam + h
    if sol.homogeneity is None and top > sol.r_max:
        raise DomainError(f"lambda + h = {top!r} exceeds the solution range r_max = {sol.r_max!r}")
    if lam - h <= 0:
        raise DomainError(f"lambda - h must stay > 0, got {lam - h!r}")


def _norm_sq(x):
    return np.sum(x * x, axis=-1)


# the integrand densities (without the r^(n-1) weight) and their
# homogeneity degree on r^-beta data, as functions of (n, p, beta)
_DENSITIES = {
    "half_grad_sq": (
        lambda p, u, du, w: 0.5 * _norm_sq(du),
        lambda n, p, b: n - 1 - 2 * b - 2,
    ),
    "grad_sq": (
        lambda p, u, du, w: _norm_sq(du),
        lambda n, p, b: n - 1 - 2 * b - 2,
    ),
    "half_lap_sq": (
        lambda p, u, du, w: 0.5 * _norm_sq(w),
        lambda n, p, b: n - 1 - 2 * b - 4,
    ),
    "pot": (
        lambda p, u, du, w: np.sqrt(_norm_sq(u)) ** (p + 1) / (p + 1),
        lambda n, p, b: n - 1 - (p + 1) * b,
    ),
    "lp1": (
        lambda p, u, du, w: np.sqrt(_norm_sq(u)) ** (p + 1),
        lambda n, p, b: n - 1 - (p + 1) * b,
    ),
    "l2": (
        lambda p, u, du, w: _norm_sq(u),
        lambda n, p, b: n - 1 - 2 * b,
    ),
}


class _BallIntegral:
    """omega_{n-1} int_0^lam density(r) r^(n-1) dr with per-node caching."""

    def __init__(self, sol, name):
        dens, degree = _DENSITIES[name]
        prm = sol.params
        self.sol = sol
        self.n = float(prm.n)
        self.omega = sphere_area(prm.n)
        p = prm.p

        def g(r):
            u, du, w, dw = _values(sol, r)
            return dens(p, u, du, w) * r ** (self.n - 1)

        self.g = g
        self.homog = sol.homogeneity
        if self.homog is not None:
            self.k = degree(self.n, p, self.homog)
            if not self.k > -1:
                raise DomainError(
                    f"{name} ball integral diverges at the origin for this "
                    f"homogeneous solution (r^{self.k} weight)"
                )
        self.edges = sol.grid
        self._cum = None

    def _closed(self, x):
        # int_0^x c r^k dr = x g(x) / (k + 1)
        return x * float(self.g(np.array([x]))[0]) / (self.k + 1.0)

    def _cumulative(self):
        if self._cum is None:
            parts = panel_integrals(self.g, self.edges, rel_tol=_QUAD_TOL)
            self._cum = np.concatenate(([0.0], np.cumsum(parts)))
        return self._cum

    def __call__(self, lam):
        if self.homog is not None and lam <= self.edges[0]:
            return self.omega * self._closed(lam)
        if lam > self.edges[-1]:
            raise DomainError(f"radius {lam!r} beyond the solution range {self.edges[-1]!r}")
        base = self._closed(self.edges[0]) if self.homog is not None else 0.0
        cum = self._cumulative()
        k = int(np.searchsorted(self.edges, lam, side="right")) - 1
        tail = 0.0
        if lam > self.edges[k]:
            tail = integrate_panels(self.g, float(self.edges[k]), float(lam), rel_tol=_QUAD_TOL)
        return self.omega * (base + cum[k] + tail)


_CACHE: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _ball(sol, name):
    per = _CACHE.setdefault(sol, {})
    if name not in per:
        per[name] = _BallIntegral(sol, name)
    return per[name]


def _is_zero(sol):
    return not (np.any(sol.u) or np.any(sol.du))


def _central(fn, lam, h, richardson=True):
    d1 = (fn(lam + h) - fn(lam - h)) / (2.0 * h)
    if not richardson:
        return d1
    h2 = 0.5 * h
    d2 = (fn(lam + h2) - fn(lam - h2)) / (2.0 * h2)
    return (4.0 * d2 - d1) / 3.0


# -------------------------------------------------------------------- E_1


def _require_s(sol, s):
    if sol.params.s != s:
        raise UnsupportedError(f"this functional needs s = {s}, got s = {sol.params.s!r}")


def energy_E1(sol, lam):
    """E_1(u, lam, 0) for an s = 1 radial solution.

    lam^a int_{B_lam} (1/2 |grad u|^2 - |u|^(p+1)/(p+1))
    + lam^(a-1)/(p-1) int_{dB_lam} |u|^2 with a = 2(p+1)/(p-1) - n.
    """
    _require_s(sol, 1)
    _check_lam(sol, lam)
    if _is_zero(sol):
        return 0.0
    prm = sol.params
    n, p = float(prm.n), prm.p
    a = 2.0 * (p + 1.0) / (p - 1.0) - n
    interior = _ball(sol, "half_grad_sq")(lam) - _ball(sol, "pot")(lam)
    u = _values(sol, lam)[0][0]
    sphere = sphere_area(prm.n) * lam ** (n - 1) * float(u @ u)
    return lam**a * interior + lam ** (a - 1.0) * sphere / (p - 1.0)


def _e1_rhs(sol, lam):
    prm = sol.params
    n, p = float(prm.n), prm.p
    u, du = (v[0] for v in _values(sol, lam)[:2])
    q = du + 2.0 * u / ((p - 1.0) * lam)
    a = 2.0 * (p + 1.0) / (p - 1.0) - n
    return sphere_area(prm.n) * lam ** (n - 1) * lam**a * float(q @ q)


def energy_E1_derivative_identity(sol, lam, h=None, richardson=True):
    """Finite-difference dE_1/dlam against the boundary identity.

    The identity is omega lam^(n-1) lam^(2(p+1)/(p-1) - n)
    sum_i (u_i' + 2 u_i / ((p-1) lam))^2. Returns ``(fd, rhs, |fd - rhs|)``.
    ``h`` defaults to 1e-4 lam; one Richardson level unless disabled.
    """
    _require_s(sol, 1)
    h = _FD_REL_STEP * lam if h is None else float(h)
    _check_lam(sol, lam, h)
    if _is_zero(sol):
        return 0.0, 0.0, 0.0
    fd = _central(lambda x: energy_E1(sol, x), lam, h, richardson)
    rhs = _e1_rhs(sol, lam)
    return fd, rhs, abs(fd - rhs)


# -------------------------------------------------------------------- E_2


def _check_e2(sol):
    _require_s(sol, 2)
    prm = sol.params
    if prm.n < 5:
        raise DomainError(f"E_2 needs n >= 5, got n = {prm.n!r}")
    crit = (prm.n + 4.0) / (prm.n - 4.0)
    if not prm.p > crit:
        raise DomainError(f"E_2 needs p > (n+4)/(n-4) = {crit!r}, got p = {prm.p!r}")


@dataclass(frozen=True)
class E2Breakdown:
    """The groups of E_2 at one radius.

    ``bracket_*`` hold the two d/dlam[...] groups (with their prefactors)
    from the analytic expansion and ``bracket_*_fd`` the same groups by
    central differences. ``tangential`` is the pair of groups built from
    |grad u|^2 - |u_r|^2, which vanish on radial data.
    """

    lam: float
    interior: float
    boundary: float
    bracket_u2: float
    bracket_radial: float
    bracket_u2_fd: float
    bracket_radial_fd: float
    tangential: float = 0.0

    @property
    def value(self):
        return self.interior + self.boundary + self.bracket_u2 + self.bracket_radial + self.tangential

    @property
    def value_fd(self):
        return (
            self.interior + self.boundary + self.bracket_u2_fd + self.bracket_radial_fd + self.tangential
        )

    @property
    def path_gap(self):
        """Relative disagreement of the analytic and finite-difference paths."""
        return abs(self.value - self.value_fd) / max(abs(self.value), 1.0)


def _e2_pieces(sol, lam):
    prm = sol.params
    n, p = float(prm.n), prm.p
    b = 4.0 / (p - 1.0)
    c = -b * ((p + 3.0) / (p - 1.0) - n)
    om = sphere_area(prm.n)
    return n, p, b, c, om


def _bracket_u2(sol, lam):
    # lam^(2b+2-n) int_{dB_lam} |u|^2
    n, p, b, c, om = _e2_pieces(sol, lam)
    u = _values(sol, lam)[0][0]
    return lam ** (2 * b + 2 - n) * om * lam ** (n - 1) * float(u @ u)


def _bracket_radial(sol, lam):
    # lam^(2b+1-n) int_{dB_lam} sum (b u_i / lam + u_i')^2
    n, p, b, c, om = _e2_pieces(sol, lam)
    u, du = (v[0] for v in _values(sol, lam)[:2])
    q = b * u / lam + du
    return lam ** (2 * b + 1 - n) * om * lam ** (n - 1) * float(q @ q)


def _e2_analytic(sol, lam):
    """(interior, boundary, bracket_u2, bracket_radial) with prefactors."""
    n, p, b, c, om = _e2_pieces(sol, lam)
    u, du, w, dw = (v[0] for v in _values(sol, lam))
    interior = lam ** (2 * b + 4 - n) * (_ball(sol, "half_lap_sq")(lam) - _ball(sol, "pot")(lam))
    boundary = c * lam ** (1 + 2 * b - n) * om * lam ** (n - 1) * float(u @ u)
    # d/dlam [lam^a om lam^(n-1) g] = om lam^(a+n-2) ((a+n-1) g + lam g'),
    # with u'' = w - (n-1) u'/r from the definition of w
    a1 = 2 * b + 2 - n
    g1, dg1 = float(u @ u), 2.0 * float(u @ du)
    d1 = om * lam ** (a1 + n - 2) * ((a1 + n - 1) * g1 + lam * dg1)
    a2 = 2 * b + 1 - n
    q = b * u / lam + du
    dq = b * du / lam - b * u / lam**2 + w - (n - 1) * du / lam
    g2, dg2 = float(q @ q), 2.0 * float(q @ dq)
    d2 = om * lam ** (a2 + n - 2) * ((a2 + n - 1) * g2 + lam * dg2)
    return interior, boundary, c * d1, 0.5 * lam**3 * d2


def energy_E2_breakdown(sol, lam, h=None):
    """All groups of E_2 at ``lam``, with both d/dlam paths."""
    _check_e2(sol)
    h = _FD_REL_STEP * lam if h is None else float(h)
    _check_lam(sol, lam, h)
    if _is_zero(sol):
        return E2Breakdown(lam, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    n, p, b, c, om = _e2_pieces(sol, lam)
    interior, boundary, br1, br2 = _e2_analytic(sol, lam)
    d1_fd = _central(lambda x: _bracket_u2(sol, x), lam, h)
    d2_fd = _central(lambda x: _bracket_radial(sol, x), lam, h)
    return E2Breakdown(lam, interior, boundary, br1, br2, c * d1_fd, 0.5 * lam**3 * d2_fd)


def energy_E2(sol, lam, h=None):
    """E_2(u, lam, 0) for an s = 2 radial solution (analytic brackets).

    Requires n >= 5 and p > (n+4)/(n-4). ``h`` is only used by the
    finite-difference cross-check in :func:`energy_E2_breakdown`.
    """
    _check_e2(sol)
    _check_lam(sol, lam)
    if _is_zero(sol):
        return 0.0
    return float(sum(_e2_analytic(sol, lam)))


def _e2_integrand(sol, lam):
    n, p, b, c, om = _e2_pieces(sol, lam)
    u, du = (v[0] for v in _values(sol, lam)[:2])
    q = b * u / lam + du
    return om * lam ** (n - 1) * lam ** (2 * b + 2 - n) * float(q @ q)


def energy_E2_derivative_bound(sol, lam, h=None):
    """``(fd, integrand)``: dE_2/dlam by central differences and the boundary
    integrand omega lam^(n-1) lam^(8/(p-1)+2-n) sum (4 u_i/((p-1) lam) + u_i')^2.

    The constant in front of the integrand is not explicit, so the
    contract checked downstream is fd >= 0 up to tolerance.
    """
    _check_e2(sol)
    h = _FD_REL_STEP * lam if h is None else float(h)
    _check_lam(sol, lam, h)
    if _is_zero(sol):
        return 0.0, 0.0
    fd = _central(lambda x: energy_E2(sol, x), lam, h)
    return fd, _e2_integrand(sol, lam)


# -------------------------------------------------------------- scanning


@dataclass
class EnergyCurve:
    """E(lam) on a grid with the derivative check at every node.

    For s = 1 ``residuals`` is |fd - identity_rhs|. For s = 2 the constant
    of the lower bound is unknown, so the bound is taken as 0 and
    ``residuals`` is fd itself (nonnegative when monotone). ``violations``
    lists k with E[k+1] < E[k] - slack (1 + |E[k]|).
    """

    s: int
    lambdas: np.ndarray
    values: np.ndarray
    fd_derivative: np.ndarray
    identity_rhs: np.ndarray
    residuals: np.ndarray
    violations: tuple = ()
    slack: float = _MONO_SLACK
    meta: dict = field(default_factory=dict)

    @property
    def nondecreasing(self):
        return not self.violations

    def relative_variation(self):
        v = self.values
        return float((v.max() - v.min()) / max(np.abs(v).max(), 1e-300)) if v.size else 0.0

    def rows(self):
        return zip(self.lambdas, self.values, self.fd_derivative, self.identity_rhs, self.residuals)

    HEADER = ("lambda", "E", "dE_fd", "identity_rhs", "residual")

    def to_csv(self, dest):
        write_csv(self.HEADER, self.rows(), dest)

    def to_dict(self):
        return {
            "s": self.s,
            "lambda": self.lambdas,
            "E": self.values,
            "dE_fd": self.fd_derivative,
            "identity_rhs": self.identity_rhs,
            "residual": self.residuals,
            "violations": list(self.violations),
            "meta": self.meta,
        }

    def to_json(self, dest):
        dump_json(self.to_dict(), dest)


def energy_scan(sol, lambda_grid, s=None, h_rel=_FD_REL_STEP):
    """Evaluate E and its derivative check on an increasing lambda grid."""
    s = sol.params.s if s is None else s
    if s != sol.params.s:
        raise DomainError(f"s = {s!r} does not match the solution's s = {sol.params.s!r}")
    lams = np.asarray(lambda_grid, dtype=float)
    if lams.ndim != 1 or lams.size < 1:
        raise DomainError("lambda grid must be a non-empty 1-D array")
    if np.any(np.diff(lams) <= 0) or lams[0] <= 0:
        raise DomainError("lambda grid must be positive and strictly increasing")
    vals, fds, rhs = [], [], []
    for lam in lams:
        h = h_rel * lam
        if s == 1:
            fd, r, _ = energy_E1_derivative_identity(sol, lam, h)
            vals.append(energy_E1(sol, lam))
        elif s == 2:
            fd, r = energy_E2_derivative_bound(sol, lam, h)
            vals.append(energy_E2(sol, lam))
        else:
            raise UnsupportedError(f"energy_scan covers s in {{1, 2}}, got {s!r}")
        fds.append(fd)
        rhs.append(r)
    vals, fds, rhs = np.array(vals), np.array(fds), np.array(rhs)
    resid = np.abs(fds - rhs) if s == 1 else fds.copy()
    drop = vals[1:] < vals[:-1] - _MONO_SLACK * (1.0 + np.abs(vals[:-1]))
    return EnergyCurve(
        int(s),
        lams,
        vals,
        fds,
        rhs,
        resid,
        tuple(int(k) for k in np.flatnonzero(drop)),
        _MONO_SLACK,
        {"n": sol.params.n, "p": sol.params.p, "m": sol.params.m, "h_rel": h_rel},
    )


def _energy(sol, lam):
    return energy_E1(sol, lam) if sol.params.s == 1 else energy_E2(sol, lam)


def scale_invariance_check(sol, lam, r, s=None):
    """|E(u, r lam) - E(u^lam, r)| / max(|E(u, r lam)|, 1)."""
    s = sol.params.s if s is None else s
    if s != sol.params.s:
        raise DomainError(f"s = {s!r} does not match the solution's s = {sol.params.s!r}")
    if not (lam > 0 and r > 0):
        raise DomainError("lambda and r must be > 0")
    if lam == 1:
        return 0.0
    lhs = _energy(sol, r * lam)
    rhs = _energy(blow_down(sol, lam), r)
    return abs(lhs - rhs) / max(abs(lhs), 1.0)


# ------------------------------------------------------------ growth laws


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares fit log I(R) = slope log R + intercept."""

    which: str
    slope: float
    intercept: float
    radii: np.ndarray
    integrals: np.ndarray
    degenerate: bool = False


_GROWTH = {"Lp1": "lp1", "L2": "l2", "GradSq": "grad_sq"}


def growth_slope(sol, R_grid, which):
    """Fitted exponent of R -> int_{B_R} |u|^(p+1) (``Lp1``) or |u|^2 (``L2``).

    The zero solution gives identically vanishing integrals; the result is
    then flagged ``degenerate`` with a nan slope.
    """
    if which not in _GROWTH:
        raise DomainError(f"which must be one of {sorted(_GROWTH)}, got {which!r}")
    R = np.asarray(R_grid, dtype=float)
    if R.ndim != 1 or R.size < 4:
        raise DomainError("growth_slope needs at least 4 radii")
    if np.any(R <= 0) or np.any(np.diff(R) <= 0):
        raise DomainError("radii must be positive and strictly increasing")
    if _is_zero(sol):
        return GrowthFit(which, math.nan, math.nan, R, np.zeros_like(R), True)
    ball = _ball(sol, _GROWTH[which])
    vals = np.array([ball(x) for x in R])
    if np.any(vals <= 0):
        return GrowthFit(which, math.nan, math.nan, R, vals, True)
    slope, intercept = np.polyfit(np.log(R), np.log(vals), 1)
    return GrowthFit(which, float(slope), float(intercept), R, vals, False)


# ----------------------------------------------------- tangential spot check


def tangential_gradient_sq(sol, points, h=1e-3):
    """|grad u|^2 - |u_r|^2 at points of a 2-D plane through the origin.

    The radial profile is extended to x -> u(|x|) and the gradient taken by
    fourth-order central differences in Cartesian coordinates, so the result
    is an independent check that the tangential groups of E_2 vanish.
    Returns one value per point (summed over components).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != 2:
        raise DomainError("points must have shape (k, 2)")

    def field(xy):
        return _values(sol, np.hypot(xy[:, 0], xy[:, 1]))[0]

    grads = []
    for axis in range(2):
        e = np.zeros(2)
        e[axis] = h
        d = (field(pts - 2 * e) - 8 * field(pts - e) + 8 * field(pts + e) - field(pts + 2 * e)) / (12 * h)
        grads.append(d)
    gx, gy = grads
    rr = np.hypot(pts[:, 0], pts[:, 1])[:, None]
    radial = (pts[:, :1] * gx + pts[:, 1:] * gy) / rr
    return np.sum(gx**2 + gy**2 - radial**2, axis=1)

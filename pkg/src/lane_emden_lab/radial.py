"""Radial shooting for s = 1 and s = 2.

For s = 1 the solver integrates ``u'' + (n-1)/r u' = -f(u)``; for s = 2 it
integrates the pair ``u'' + (n-1)/r u' = w``, ``w'' + (n-1)/r w' = f(u)``
(so ``Delta^2 u = f``), with ``f_i(u) = |u|^(p-1) (alpha_i u_i^+ + beta_i u_i^-)``.
The regular singular point at r = 0 is bridged by a two-term Taylor
expansion up to ``start_radius``; DOP853 with dense output takes over from
there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, RadialSolveError, UnsupportedError
from .params import ProblemParams
from .singular import SingularSolution
from .tables import write_csv

__all__ = [
    "ShootingConfig",
    "RadialSolution",
    "nonlinearity",
    "solve_radial",
    "blow_down",
    "sample",
    "sample_singular",
    "ode_residual",
    "resolved_midpoints",
    "write_trajectory_csv",
]

_LOG_SWITCH = 1e100


@dataclass(frozen=True)
class ShootingConfig:
    """Initial data and tolerances for :func:`solve_radial`.

    ``init_w`` (the value of Delta u at the origin) is required for s = 2.
    ``start_radius`` defaults to ``1e-6 * r_max`` and ``max_step`` to
    ``r_max / 100``; long steps keep the step error small but not the error
    of the dense interpolant's derivative, which the residual checks see.
    """

    init_u: tuple
    init_w: tuple | None = None
    r_max: float = 10.0
    rel_tol: float = 1e-11
    abs_tol: float = 1e-18
    start_radius: float | None = None
    blowup_guard: float = 1e12
    max_step: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "init_u", tuple(float(v) for v in np.atleast_1d(self.init_u)))
        if self.init_w is not None:
            object.__setattr__(
                self, "init_w", tuple(float(v) for v in np.atleast_1d(self.init_w))
            )
        if not self.r_max > 0:
            raise DomainError(f"r_max must be > 0, got {self.r_max!r}")
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise DomainError(f"{name} must lie in (0, 1), got {v!r}")
        if self.start_radius is None:
            object.__setattr__(self, "start_radius", 1e-6 * self.r_max)
        if self.max_step is None:
            object.__setattr__(self, "max_step", self.r_max / 100.0)
        if not self.max_step > 0:
            raise DomainError(f"max_step must be > 0, got {self.max_step!r}")
        if not 0 < self.start_radius < self.r_max:
            raise DomainError(
                f"start_radius must lie in (0, r_max), got {self.start_radius!r}"
            )


def _norm_power(norm, e):
    norm = np.asarray(norm, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        big = norm > _LOG_SWITCH
        out = np.where(big, np.exp(e * np.log(np.where(big, norm, 1.0))), norm**e)
    return out


def nonlinearity(params, u):
    """f_i(u) = |u|^(p-1) (alpha_i u_i^+ + beta_i u_i^-), u of shape (..., m).

    ``u_i^-`` is the signed negative part min(u_i, 0), so unit coefficients
    reproduce |u|^(p-1) u_i.
    """
    u = np.asarray(u, dtype=float)
    weight = _norm_power(np.linalg.norm(u, axis=-1), params.p - 1.0)[..., None]
    if params.coupling is None:
        return weight * u
    return weight * (params.alphas * np.maximum(u, 0.0) + params.betas * np.minimum(u, 0.0))


@dataclass(frozen=True, eq=False)
class RadialSolution:
    """Dense radial trajectory.

    ``grid`` holds the integrator nodes (starting at 0 for shooting
    solutions). ``homogeneity`` is set for sampled singular solutions, whose
    profile on [0, grid[0]] is the exact power law r^-homogeneity.
    ``blowup_radius`` is set when the guard stopped the integration.
    """

    params: ProblemParams
    grid: np.ndarray
    u: np.ndarray
    du: np.ndarray
    w: np.ndarray | None
    dw: np.ndarray | None
    interpolation_order: int
    blowup_radius: float | None = None
    homogeneity: float | None = None
    start_radius: float = 0.0
    _state: object = field(default=None, repr=False)

    @property
    def r_max(self):
        return float(self.grid[-1])

    @property
    def r_min(self):
        return float(self.grid[0])

    def evaluate(self, r):
        """Values at radii r; returns (u, du, w, dw) with shape (len(r), m)
        (w and dw are None for s = 1). Grid nodes return stored values."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if r.size and (r.min() < self.r_min or r.max() > self.r_max):
            raise DomainError(
                f"radius outside [{self.r_min}, {self.r_max}]: "
                f"[{r.min()}, {r.max()}]"
            )
        u, du, w, dw = self._state(r)
        idx = np.clip(np.searchsorted(self.grid, r), 0, len(self.grid) - 1)
        hit = self.grid[idx] == r
        if hit.any():
            u[hit], du[hit] = self.u[idx[hit]], self.du[idx[hit]]
            if w is not None:
                w[hit], dw[hit] = self.w[idx[hit]], self.dw[idx[hit]]
        return u, du, w, dw


def _split(y, m, s):
    y = np.atleast_2d(y)
    if s == 1:
        return y[:, :m], y[:, m : 2 * m], None, None
    return y[:, :m], y[:, m : 2 * m], y[:, 2 * m : 3 * m], y[:, 3 * m :]


_MAX_SEGMENTS = 100_000


def _check_radial(params):
    if params.s not in (1, 2):
        raise UnsupportedError(f"radial solver covers s in {{1, 2}}, got s={params.s!r}")
    if params.n != int(params.n) or params.n < 2:
        raise DomainError(f"radial solver needs an integer n >= 2, got n={params.n!r}")


def solve_radial(params, cfg):
    """Integrate the radial system from the origin to ``cfg.r_max``.

    Hitting ``cfg.blowup_guard`` is not an error: the partial trajectory is
    returned with ``blowup_radius`` set.
    """
    _check_radial(params)
    n, m, s = float(params.n), params.m, int(params.s)
    a = np.asarray(cfg.init_u, dtype=float)
    if a.size != m:
        raise DomainError(f"init_u needs {m} components, got {a.size}")
    if s == 2:
        if cfg.init_w is None:
            raise DomainError("s = 2 needs init_w (the value of Delta u at r = 0)")
        b = np.asarray(cfg.init_w, dtype=float)
        if b.size != m:
            raise DomainError(f"init_w needs {m} components, got {b.size}")
    fa = nonlinearity(params, a)

    def series(r):
        r = r[:, None]
        if s == 1:
            return a - fa * r**2 / (2 * n), -fa * r / n, None, None
        return (
            a + b * r**2 / (2 * n),
            b * r / n,
            b + fa * r**2 / (2 * n),
            fa * r / n,
        )

    def rhs(r, y):
        u, du = y[:m], y[m : 2 * m]
        f = nonlinearity(params, u)
        if s == 1:
            return np.concatenate((du, -f - (n - 1) / r * du))
        w, dw = y[2 * m : 3 * m], y[3 * m :]
        return np.concatenate((du, w - (n - 1) / r * du, dw, f - (n - 1) / r * dw))

    guard = cfg.blowup_guard

    def blowup(r, y):
        return guard - np.max(np.abs(y[:m]))

    blowup.terminal = True
    blowup.direction = -1

    r0 = cfg.start_radius
    y0 = np.concatenate([c[0] for c in series(np.array([r0])) if c is not None])
    if not np.any(y0):
        grid = np.array([0.0, r0, cfg.r_max])
        zeros = np.zeros((3, m))

        def zero_state(r):
            z = np.zeros((r.size, m))
            return z, z.copy(), (z.copy() if s == 2 else None), (z.copy() if s == 2 else None)

        return RadialSolution(
            params, grid, zeros, zeros.copy(),
            zeros.copy() if s == 2 else None, zeros.copy() if s == 2 else None,
            7, None, None, r0, zero_state,
        )

    # rel_tol bounds the ODE residual of the dense output, which runs about
    # an order above the integrator's local error control
    rtol = max(0.1 * cfg.rel_tol, 1e-13)

    # |u|^(p-1) u is not smooth where a component vanishes, so the
    # integrator is restarted at every sign change to keep its order.
    seg_starts, seg_dense, nodes_t, nodes_y = [], [], [r0], [y0]
    t0, y_start, blowup_radius = r0, y0, None
    step = r0
    for _ in range(_MAX_SEGMENTS):
        events = [blowup]
        for i in range(m):
            ui, dui = y_start[i], y_start[m + i]
            if not np.any(y_start[i::m]):
                continue  # identically zero component stays zero
            if abs(ui) <= 1e-8 * abs(dui) * step:
                # sitting on a zero (components may cross together): the
                # next crossing runs against the current slope
                direction = -np.sign(dui)
            else:
                direction = -np.sign(ui)

            def crossing(r, y, i=i):
                return y[i]

            crossing.terminal = True
            crossing.direction = direction
            events.append(crossing)
        res = solve_ivp(
            rhs,
            (t0, cfg.r_max),
            y_start,
            method="DOP853",
            rtol=rtol,
            atol=cfg.abs_tol,
            dense_output=True,
            events=events,
            first_step=min(step, cfg.max_step, cfg.r_max - t0),
            max_step=cfg.max_step,
        )
        if res.status == -1:
            peak = float(np.max(np.abs(res.y[:m]))) if res.y.size else None
            raise RadialSolveError(
                f"radial integration failed at r={res.t[-1]!r} (max |u| = {peak!r}): {res.message}",
                radius=float(res.t[-1]),
                max_abs_u=peak,
            )
        seg_starts.append(t0)
        seg_dense.append(res.sol)
        if res.status == 0:
            nodes_t.extend(res.t[1:])
            nodes_y.extend(res.y.T[1:])
            break
        # the step holding the event was fitted past it; redo it up to the
        # event so the last panel only sees data on its own side
        t_prev, t_ev = float(res.t[-2]), float(res.t[-1])
        nodes_t.extend(res.t[1:-1])
        nodes_y.extend(res.y.T[1:-1])
        tail = solve_ivp(
            rhs,
            (t_prev, t_ev),
            res.y[:, -2],
            method="DOP853",
            rtol=rtol,
            atol=cfg.abs_tol,
            dense_output=True,
            max_step=cfg.max_step,
        )
        if tail.status == -1:
            raise RadialSolveError(f"radial integration failed: {tail.message}")
        seg_starts.append(t_prev)
        seg_dense.append(tail.sol)
        nodes_t.extend(tail.t[1:])
        nodes_y.extend(tail.y.T[1:])
        if res.t_events[0].size:
            blowup_radius = t_ev
            break
        t0, y_start = t_ev, tail.y[:, -1].copy()
        # resume cautiously: past a zero f is only finitely smooth
        if res.t.size >= 3:
            step = 0.01 * float(res.t[-2] - res.t[-3])
        if t0 >= cfg.r_max:
            break
    else:
        raise RadialSolveError(f"more than {_MAX_SEGMENTS} sign changes before r_max")
    seg_starts = np.asarray(seg_starts)

    def dense(r):
        k = np.clip(np.searchsorted(seg_starts, r, side="right") - 1, 0, len(seg_dense) - 1)
        out = np.empty((y0.size, r.size))
        for j in np.unique(k):
            sel = k == j
            out[:, sel] = seg_dense[j](r[sel])
        return out

    def state(r):
        out_u = np.empty((r.size, m))
        out_du = np.empty((r.size, m))
        out_w = np.empty((r.size, m)) if s == 2 else None
        out_dw = np.empty((r.size, m)) if s == 2 else None
        inner = r < r0
        if inner.any():
            parts = series(r[inner])
            out_u[inner], out_du[inner] = parts[0], parts[1]
            if s == 2:
                out_w[inner], out_dw[inner] = parts[2], parts[3]
        outer = ~inner
        if outer.any():
            parts = _split(dense(r[outer]).T, m, s)
            out_u[outer], out_du[outer] = parts[0], parts[1]
            if s == 2:
                out_w[outer], out_dw[outer] = parts[2], parts[3]
        return out_u, out_du, out_w, out_dw

    grid = np.concatenate(([0.0], nodes_t))
    head = series(np.array([0.0]))
    nodes = _split(np.asarray(nodes_y), m, s)
    u = np.vstack((head[0], nodes[0]))
    du = np.vstack((head[1], nodes[1]))
    w = np.vstack((head[2], nodes[2])) if s == 2 else None
    dw = np.vstack((head[3], nodes[3])) if s == 2 else None
    return RadialSolution(
        params, grid, u, du, w, dw, 7, blowup_radius, None, r0, state
    )


def sample_singular(sol: SingularSolution, r_min=1e-3, r_max=100.0, nodes=200):
    """Wrap a singular solution as a RadialSolution on [r_min, r_max].

    Values come from the exact power law; the nodes only set quadrature
    breakpoints. Ball integrals are completed on [0, r_min] in closed form
    via ``homogeneity``.
    """
    prm = sol.params
    if prm.s not in (1, 2):
        raise UnsupportedError("sampled singular solutions cover s in {1, 2}")
    if not 0 < r_min < r_max:
        raise DomainError("need 0 < r_min < r_max")
    n, b, vec = float(prm.n), sol.beta, sol.vector
    c_w = -b * (n - 2.0 - b)

    def state(r):
        rb = r[:, None] ** -b
        u = rb * vec
        du = -b * u / r[:, None]
        if prm.s == 1:
            return u, du, None, None
        w = c_w * u / r[:, None] ** 2
        dw = -(b + 2.0) * w / r[:, None]
        return u, du, w, dw

    grid = np.geomspace(r_min, r_max, nodes)
    u, du, w, dw = state(grid)
    return RadialSolution(prm, grid, u, du, w, dw, -1, None, b, r_min, state)


def blow_down(sol, lam):
    """Rescaled trajectory u^lam(r) = lam^beta u(lam r), beta = 2s/(p-1)."""
    if not lam > 0:
        raise DomainError(f"scaling factor must be > 0, got {lam!r}")
    if lam == 1:
        return sol
    beta = sol.params.beta
    base = sol._state
    fu, fdu = lam**beta, lam ** (beta + 1)
    fw, fdw = lam ** (beta + 2), lam ** (beta + 3)

    def state(r):
        u, du, w, dw = base(lam * r)
        if w is None:
            return fu * u, fdu * du, None, None
        return fu * u, fdu * du, fw * w, fdw * dw

    grid = sol.grid / lam
    return RadialSolution(
        sol.params,
        grid,
        fu * sol.u,
        fdu * sol.du,
        None if sol.w is None else fw * sol.w,
        None if sol.dw is None else fdw * sol.dw,
        sol.interpolation_order,
        None if sol.blowup_radius is None else sol.blowup_radius / lam,
        sol.homogeneity,
        sol.start_radius / lam,
        state,
    )


def sample(sol, r):
    """(u, du[, w, dw]) at a single radius, each an array of length m."""
    r = float(r)
    u, du, w, dw = sol.evaluate(np.array([r]))
    if w is None:
        return u[0], du[0]
    return u[0], du[0], w[0], dw[0]


_CHEB_DEG = 9
_CHEB_X = np.cos(np.pi * np.arange(_CHEB_DEG + 1) / _CHEB_DEG)
_CHEB_INV = np.linalg.inv(np.polynomial.chebyshev.chebvander(_CHEB_X, _CHEB_DEG))


def _panel_derivative(sol, r, which):
    """d/dr of stored column ``which`` at each r, per component.

    Between consecutive nodes the dense output is a single polynomial of
    degree below 9, so interpolating it at Chebyshev-Lobatto points of the
    containing panel and differentiating is exact up to rounding.
    """
    g = sol.grid
    k = np.clip(np.searchsorted(g, r, side="right"), 1, len(g) - 1)
    lo = np.maximum(g[k - 1], sol.r_min)
    hi = g[k]
    half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
    pts = np.clip(mid[:, None] + half[:, None] * _CHEB_X[None, :], lo[:, None], hi[:, None])
    vals = sol.evaluate(pts.ravel())[which].reshape(len(r), _CHEB_DEG + 1, -1)
    coef = np.einsum("jk,rkc->rjc", _CHEB_INV, vals)
    dcoef = np.polynomial.chebyshev.chebder(coef, axis=1)
    x = (r - mid) / half
    basis = np.polynomial.chebyshev.chebvander(x, _CHEB_DEG - 1)
    return np.einsum("rj,rjc->rc", basis, dcoef) / half[:, None]


def resolved_midpoints(sol, min_rel_width=1e-5):
    """Midpoints of the integrated panels at least ``min_rel_width * r`` wide.

    The series panel [0, start_radius] is left out: its truncation error is
    O(start_radius^2) by construction. Narrower panels only occur in the last
    approach to a blow-up, where the abscissae carry relative rounding
    comparable to the panel width and no derivative can be trusted.
    """
    g = sol.grid[sol.grid > 0]
    lo, hi = g[:-1], g[1:]
    mid = 0.5 * (lo + hi)
    return mid[(hi - lo) >= min_rel_width * mid]


def ode_residual(sol, r):
    """Scaled ODE residual at radii r > 0 from the dense output alone.

    Second derivatives come from differentiating the dense first
    derivatives, so the check is independent of the right-hand side used
    to integrate. Returns max over components of |residual| / (1 + |terms|)
    per radius.
    """
    prm = sol.params
    n = float(prm.n)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0) or np.any(r < sol.r_min) or np.any(r > sol.r_max):
        raise DomainError(f"residual radii must lie in ({max(sol.r_min, 0.0)}, {sol.r_max}]")
    u, du, w, dw = sol.evaluate(r)
    f = nonlinearity(prm, u)
    rr = r[:, None]
    ddu = _panel_derivative(sol, r, 1)
    if prm.s == 1:
        res = ddu + (n - 1) / rr * du + f
        scale = 1 + np.abs(ddu) + np.abs((n - 1) / rr * du) + np.abs(f)
        return np.max(np.abs(res) / scale, axis=1)
    ddw = _panel_derivative(sol, r, 3)
    res1 = ddu + (n - 1) / rr * du - w
    sc1 = 1 + np.abs(ddu) + np.abs((n - 1) / rr * du) + np.abs(w)
    res2 = ddw + (n - 1) / rr * dw - f
    sc2 = 1 + np.abs(ddw) + np.abs((n - 1) / rr * dw) + np.abs(f)
    return np.maximum(np.max(np.abs(res1) / sc1, axis=1), np.max(np.abs(res2) / sc2, axis=1))


def write_trajectory_csv(sol, path_or_file):
    """One row per grid node: r, u_*, du_*[, w_*, dw_*] with 17 significant digits."""
    m = sol.params.m
    header = ["r"] + [f"u_{i+1}" for i in range(m)] + [f"du_{i+1}" for i in range(m)]
    cols = [sol.grid[:, None], sol.u, sol.du]
    if sol.w is not None:
        header += [f"w_{i+1}" for i in range(m)] + [f"dw_{i+1}" for i in range(m)]
        cols += [sol.w, sol.dw]
    write_csv(header, np.hstack(cols), path_or_file)

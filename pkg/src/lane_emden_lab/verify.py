"""The invariant suite behind the ``verify`` command.

Each check returns a :class:`CheckResult` with a pass flag and the worst
observed metric next to its threshold. Reports carry no timings, so two
runs of the suite render to identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .angular import (
    CutoffSpec,
    angular_coefficients,
    constant_solution_check,
    singular_instability_probe,
    stability_triple,
)
from .energy import (
    energy_E1,
    energy_E1_derivative_identity,
    energy_E2_breakdown,
    energy_E2_derivative_bound,
    energy_scan,
    growth_slope,
    scale_invariance_check,
)
from .exponents import (
    RegimeTag,
    classify,
    fractional_condition,
    jl_exponent,
    jl_exponent_closed_form,
    jl_exponent_root,
    sobolev_exponent,
)
from .fractional import (
    A_constant_quadrature,
    KernelQuery,
    hardy_integral_quadrature,
    kernel_K,
    kernel_monotonicity_gap,
)
from .gamma_core import hardy_constant, power_law_multiplier
from .params import ProblemParams
from .quadrature import QuadratureSpec
from .radial import ShootingConfig, sample_singular, solve_radial
from .singular import is_singular_stable, make_singular
from .tables import dump_json

__all__ = [
    "CheckResult",
    "CHECKS",
    "run_check",
    "run_suite",
    "render_report",
    "report_dict",
    "write_report",
]

_SEED = 20240611


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one check; ``metrics`` is an ordered tuple of (name, value)."""

    number: int
    key: str
    passed: bool
    metrics: tuple = ()
    note: str = ""

    def metric(self, name):
        return dict(self.metrics)[name]


def _rel(a, b):
    return abs(a - b) / abs(b)


# ------------------------------------------------------------- exponents


def check_jl_laplacian():
    worst = max(_rel(jl_exponent_root(n, 1), jl_exponent_closed_form(n, 1)) for n in range(11, 41))
    low_inf = all(math.isinf(jl_exponent(n, 1)) and math.isinf(jl_exponent_root(n, 1)) for n in range(3, 11))
    return CheckResult(
        1,
        "jl-exponent-s1",
        worst < 1e-9 and low_inf,
        (("max_rel_err", worst), ("tol", 1e-9), ("infinite_for_n_le_10", low_inf)),
    )


def check_jl_bilaplacian():
    worst = max(_rel(jl_exponent_root(n, 2), jl_exponent_closed_form(n, 2)) for n in range(13, 41))
    low_inf = all(math.isinf(jl_exponent(n, 2)) and math.isinf(jl_exponent_root(n, 2)) for n in range(5, 13))
    spot = jl_exponent(13, 2)
    ok = worst < 1e-9 and low_inf and abs(spot - 28.172) < 5e-4
    return CheckResult(
        2,
        "jl-exponent-s2",
        ok,
        (("max_rel_err", worst), ("tol", 1e-9), ("infinite_for_n_le_12", low_inf), ("jl_13_2", spot)),
    )


def check_multiplier_identities():
    rng = np.random.default_rng(_SEED)
    worst = 0.0
    for _ in range(100):
        n = rng.uniform(2.5, 40.0)
        beta = rng.uniform(0.0, n - 2.0)
        exact = beta * (n - 2.0 - beta)
        worst = max(worst, _rel(power_law_multiplier(n, 1, beta), exact))
    for _ in range(100):
        n = rng.uniform(4.5, 40.0)
        beta = rng.uniform(0.0, n - 4.0)
        exact = beta * (beta + 2.0) * (n - beta - 2.0) * (n - beta - 4.0)
        worst = max(worst, _rel(power_law_multiplier(n, 2, beta), exact))
    hardy = max(_rel(hardy_constant(n, 2), n * n * (n - 4.0) ** 2 / 16.0) for n in range(5, 31))
    return CheckResult(
        3,
        "multiplier-identities",
        worst < 1e-12 and hardy < 1e-12,
        (("max_rel_err_random", worst), ("max_rel_err_hardy4", hardy), ("tol", 1e-12)),
    )


def check_fractional_condition():
    flips = 0
    ok = True
    for s in (0.5, 1.5):
        for n in (4, 6, 10):
            root = jl_exponent_root(n, s)
            if math.isfinite(root):
                below = fractional_condition(n, s, root * (1 - 1e-8))[0]
                above = fractional_condition(n, s, root * (1 + 1e-8))[0]
                ok &= below and not above
                flips += 1
            else:
                # no root: the condition must hold everywhere above p_S
                p_s = sobolev_exponent(n, s)
                grid = 1.0 + np.geomspace((p_s - 1.0) * (1 + 1e-6), 1e6, 60)
                ok &= all(fractional_condition(n, s, float(p))[0] for p in grid)
    return CheckResult(
        4,
        "fractional-condition-flip",
        bool(ok),
        (("finite_roots_bracketed", flips), ("bracket_rel", 1e-8)),
    )


# ---------------------------------------------------------------- radial


def bubble_solution():
    return solve_radial(ProblemParams(3, 1, 5), ShootingConfig(init_u=3**0.25, r_max=10.0))


def check_bubble():
    sol = bubble_solution()
    r = np.linspace(0.0, 10.0, 2001)
    u = sol.evaluate(r)[0][:, 0]
    err = float(np.max(np.abs(u - 3**0.25 / np.sqrt(1 + r * r))))
    return CheckResult(5, "bubble", err < 1e-6, (("max_abs_err", err), ("tol", 1e-6)))


# ---------------------------------------------------------------- energy


E1_GENERIC = (
    (ProblemParams(3, 1, 3), (1.0,)),
    (ProblemParams(4, 1, 2.5), (1.0,)),
    (ProblemParams(6, 1, 3), (1.0,)),
    (ProblemParams(3, 1, 7), (1.0,)),
    (ProblemParams(4, 1, 4, m=2), (0.6, 0.8)),
)


def _order(sol, lam):
    errs = [
        energy_E1_derivative_identity(sol, lam, f * lam, richardson=False)[2]
        for f in (0.1, 0.05, 0.025)
    ]
    return min(math.log2(errs[0] / errs[1]), math.log2(errs[1] / errs[2]))


def check_e1():
    sols = [bubble_solution()] + [
        solve_radial(prm, ShootingConfig(init_u=u0, r_max=10.0)) for prm, u0 in E1_GENERIC
    ]
    grid = np.linspace(0.5, 8.0, 16)
    violations, worst_res, worst_rel, worst_order = 0, 0.0, 0.0, math.inf
    for sol in sols:
        curve = energy_scan(sol, grid)
        violations += len(curve.violations)
        for lam in grid:
            _, rhs, res = energy_E1_derivative_identity(sol, lam, 1e-3 * lam, richardson=False)
            worst_res = max(worst_res, res)
            worst_rel = max(worst_rel, res / max(abs(rhs), 1.0))
        worst_order = min(worst_order, _order(sol, 2.0))
    ok = violations == 0 and worst_res < 1e-4 and worst_order >= 1.8
    return CheckResult(
        6,
        "e1-monotonicity",
        ok,
        (
            ("solutions", len(sols)),
            ("violations", violations),
            ("max_identity_residual", worst_res),
            ("max_rel_identity_residual", worst_rel),
            ("tol", 1e-4),
            ("min_fd_order", worst_order),
        ),
    )


def check_e1_homogeneous():
    sol = sample_singular(make_singular(ProblemParams(5, 1, 3)), r_min=1e-3, r_max=100.0)
    grid = np.geomspace(0.5, 20.0, 12)
    vals = np.array([energy_E1(sol, lam) for lam in grid])
    variation = float((vals.max() - vals.min()) / np.abs(vals).max())
    target = 8 * math.pi**2 / 3
    dev = float(np.max(np.abs(vals - target)) / target)
    rhs = max(abs(energy_E1_derivative_identity(sol, lam)[1]) for lam in grid)
    ok = variation < 1e-6 and dev < 1e-6 and rhs <= 1e-9 * target
    return CheckResult(
        7,
        "e1-homogeneous",
        ok,
        (("rel_variation", variation), ("rel_dev_8pi2_3", dev), ("max_abs_identity_rhs", rhs), ("tol", 1e-6)),
    )


E2_GENERIC = (
    (ProblemParams(13, 2, 2), (0.3,), (-0.2,)),
    (ProblemParams(13, 2, 2), (1.0,), (-1.0,)),
    (ProblemParams(13, 2, 2, m=2), (0.5, 0.2), (-0.4, -0.1)),
)


def check_e2():
    sing = sample_singular(make_singular(ProblemParams(13, 2, 2)), r_min=1e-3, r_max=100.0)
    grid = np.linspace(1.0, 10.0, 19)
    curve = energy_scan(sing, grid)
    variation = curve.relative_variation()
    bound_int = max(abs(energy_E2_derivative_bound(sing, lam)[1]) for lam in grid)
    # the exact derivative is 0; finite differences see rounding of E
    sing_fd = max(abs(f) * lam / max(abs(e), 1.0) for f, lam, e in zip(curve.fd_derivative, grid, curve.values))
    fd_floor, violations, gap = math.inf, 0, 0.0
    for prm, u0, w0 in E2_GENERIC:
        sol = solve_radial(prm, ShootingConfig(init_u=u0, init_w=w0, r_max=12.0))
        c = energy_scan(sol, grid)
        violations += len(c.violations)
        fd_floor = min(fd_floor, float(np.min(c.fd_derivative / np.maximum(np.abs(c.values), 1.0))))
        gap = max(gap, max(energy_E2_breakdown(sol, lam).path_gap for lam in grid[::3]))
    ok = (
        variation < 1e-6
        and bound_int < 1e-12
        and sing_fd < 1e-6
        and violations == 0
        and fd_floor > -1e-6
        and gap < 1e-6
    )
    return CheckResult(
        8,
        "e2-monotonicity",
        ok,
        (
            ("singular_rel_variation", variation),
            ("singular_boundary_integrand", bound_int),
            ("singular_rel_fd", sing_fd),
            ("generic_violations", violations),
            ("generic_min_rel_fd", fd_floor),
            ("bracket_path_gap", gap),
            ("tol", 1e-6),
        ),
    )


def check_scale_invariance():
    rng = np.random.default_rng(_SEED + 9)
    s1 = bubble_solution()
    prm, u0, w0 = E2_GENERIC[0]
    s2 = solve_radial(prm, ShootingConfig(init_u=u0, init_w=w0, r_max=12.0))
    worst = {}
    for key, sol in (("s1", s1), ("s2", s2)):
        top = 0.9 * sol.r_max
        w = 0.0
        for _ in range(50):
            lam = float(np.exp(rng.uniform(math.log(0.5), math.log(3.0))))
            r = float(rng.uniform(0.2, top / max(lam, 1.0)))
            w = max(w, scale_invariance_check(sol, lam, r))
        worst[key] = w
    ok = worst["s1"] < 1e-8 and worst["s2"] < 1e-6
    return CheckResult(
        9,
        "scale-invariance",
        ok,
        (("max_residual_s1", worst["s1"]), ("tol_s1", 1e-8), ("max_residual_s2", worst["s2"]), ("tol_s2", 1e-6)),
    )


def check_growth():
    worst = 0.0
    radii = np.geomspace(1.0, 50.0, 8)
    for prm in (ProblemParams(5, 1, 3), ProblemParams(13, 2, 2), ProblemParams(6, 1, 4)):
        sol = sample_singular(make_singular(prm), r_min=1e-3, r_max=100.0)
        n, s, p = prm.n, prm.s, prm.p
        lp1 = growth_slope(sol, radii, "Lp1").slope
        l2 = growth_slope(sol, radii, "L2").slope
        worst = max(worst, abs(lp1 - (n - 2 * s * (p + 1) / (p - 1))), abs(l2 - (n - 4 * s / (p - 1))))
    return CheckResult(10, "growth-exponents", worst < 1e-6, (("max_abs_slope_err", worst), ("tol", 1e-6)))


# --------------------------------------------------------------- angular


def check_angular():
    worst_beta = 0.0
    for n in (13, 16, 20, 30):
        for p in (2.0, 3.0, 5.0, 9.0):
            if p <= sobolev_exponent(n, 2):
                continue
            co = angular_coefficients(n, p)
            worst_beta = max(worst_beta, _rel(co.beta, power_law_multiplier(n, 2, co.q)))
    c3_ok = True
    for n, p in ((13, 2.0), (20, 3.0), (9, 5.0)):
        constant_solution_check(n, p)
    worst_root = 0.0
    for n in range(13, 31):
        pc = jl_exponent(n, 2)
        lo, hi = stability_triple(n, pc * (1 - 1e-9))[2], stability_triple(n, pc * (1 + 1e-9))[2]
        c3_ok &= lo > 0 > hi
        root = brentq(lambda p: stability_triple(n, p)[2], sobolev_exponent(n, 2) * 1.001, 10 * pc, xtol=1e-14)
        worst_root = max(worst_root, _rel(root, pc))
    triple = stability_triple(13, 2)
    exact = triple == (1.0, 57.5, 824.4375)
    ok = worst_beta < 1e-12 and c3_ok and worst_root < 1e-9 and exact
    return CheckResult(
        11,
        "angular",
        bool(ok),
        (
            ("max_rel_err_beta", worst_beta),
            ("c3_sign_change_bracketed", bool(c3_ok)),
            ("max_rel_err_c3_root", worst_root),
            ("triple_13_2_exact", exact),
        ),
    )


# Points straddle the JL curve with |Lambda - p lam| large enough that the
# bounded ramp terms of the probe cannot flip its sign at eps = 1e-3.
PROBE_GRID = {
    1: ((11, 4.0), (11, 6.0), (11, 8.0), (11, 12.0), (15, 2.0), (15, 3.0)),
    2: ((13, 10.0), (13, 20.0), (13, 40.0), (13, 100.0), (16, 5.0), (20, 3.0)),
}


def check_probe():
    agree, stable_count, total = 0, 0, 0
    for s, pts in PROBE_GRID.items():
        for n, p in pts:
            stable, _ = is_singular_stable(ProblemParams(n, s, p))
            q = singular_instability_probe(n, s, p, CutoffSpec(1e-3)).quadratic_form
            agree += (q >= 0) == stable
            stable_count += stable
            total += 1
    return CheckResult(
        12,
        "instability-probe",
        agree == total and 0 < stable_count < total,
        (("agreeing", agree), ("points", total), ("stable_points", stable_count)),
    )


# ------------------------------------------------------------ fractional


def check_kernel():
    spec = QuadratureSpec(rel_tol=1e-12)
    k0 = kernel_K(KernelQuery(3, 0.5, 0.0, 0.0, spec))
    k0_err = abs(k0 - math.pi / 4)
    sym, mono_ok, c_ok = 0.0, True, True
    for n, s in ((3, 0.5), (4, 0.25), (5, 1.5), (6, 0.75)):
        top = 0.5 * (n - 2 * s)
        alphas = np.linspace(0.0, top, 11)[:-1]
        cs = np.linspace(-1.0, 0.95, 10)
        table = np.array([[kernel_K(KernelQuery(n, s, a, c, spec)) for c in cs] for a in alphas])
        mirror = np.array([[kernel_K(KernelQuery(n, s, n - 2 * s - a, c, spec)) for c in cs] for a in alphas])
        sym = max(sym, float(np.max(np.abs(table - mirror) / table)))
        mono_ok &= bool(np.all(np.diff(table, axis=0) < 0))
        c_ok &= bool(np.all(np.diff(table, axis=1) > 0))
    gaps = []
    for n, s, p, c in (
        (4, 0.5, 3.0, 0.0),
        (5, 1.5, 5.0, -0.9),
        (3, 0.5, 3.0, 0.5),
        (3, 0.25, 2.0, -0.3),
        (6, 0.75, 2.0, 0.8),
        (8, 1.5, 4.0, 0.2),
        (10, 0.5, 1.5, -1.0),
        (5, 0.5, 9.0, 0.9),
        (7, 1.25, 3.0, -0.5),
        (12, 1.75, 2.0, 0.0),
    ):
        gaps.append(kernel_monotonicity_gap(n, s, p, c, spec))
    ok = k0_err < 1e-10 and sym < 1e-9 and mono_ok and c_ok and max(gaps) < 0
    return CheckResult(
        13,
        "kernel",
        bool(ok),
        (
            ("k0_abs_err", k0_err),
            ("max_rel_symmetry_err", sym),
            ("decreasing_in_alpha", bool(mono_ok)),
            ("increasing_in_c", bool(c_ok)),
            ("max_gap", max(gaps)),
        ),
    )


def check_pv_quadrature():
    worst_a, worst_h = 0.0, 0.0
    cond_ok = True
    for n in (2, 3, 4):
        for s in (0.25, 0.5, 0.75):
            p = sobolev_exponent(n, s) + 1.5
            a = A_constant_quadrature(n, s, p)
            h = hardy_integral_quadrature(n, s)
            worst_a = max(worst_a, _rel(a, power_law_multiplier(n, s, 2 * s / (p - 1))))
            worst_h = max(worst_h, _rel(h, hardy_constant(n, s)))
            flag, margin = fractional_condition(n, s, p)
            if abs(margin) > 2e-3 * hardy_constant(n, s):
                cond_ok &= (p * a > h) == flag
    ok = worst_a < 1e-3 and worst_h < 1e-3 and cond_ok
    return CheckResult(
        14,
        "pv-quadrature",
        bool(ok),
        (("max_rel_err_A", worst_a), ("max_rel_err_hardy", worst_h), ("tol", 1e-3), ("condition_agrees", bool(cond_ok))),
    )


# ------------------------------------------------------- cubic system


def check_cubic_two_component():
    def tag(n):
        return classify(ProblemParams(n, 1, 3, m=2)).tag

    low = all(tag(n) is RegimeTag.SUPERCRITICAL_TRIVIAL for n in range(5, 12))
    four = tag(4) is RegimeTag.CRITICAL_FINITE_ENERGY
    high = all(tag(n) is RegimeTag.UNCLASSIFIED for n in range(13, 41))
    r12 = classify(ProblemParams(12, 1, 3, m=2))
    twelve = r12.tag is RegimeTag.SUPERCRITICAL_TRIVIAL and bool(r12.note)
    pc12 = jl_exponent(12, 1)
    ok = low and four and high and twelve and abs(pc12 - 3.927) < 5e-4
    return CheckResult(
        15,
        "cubic-two-component",
        ok,
        (("n5_11_trivial", low), ("n4_critical", four), ("n13_40_unclassified", high), ("n12_trivial_noted", twelve), ("p_c_12", pc12)),
        r12.note,
    )


CHECKS = (
    check_jl_laplacian,
    check_jl_bilaplacian,
    check_multiplier_identities,
    check_fractional_condition,
    check_bubble,
    check_e1,
    check_e1_homogeneous,
    check_e2,
    check_scale_invariance,
    check_growth,
    check_angular,
    check_probe,
    check_kernel,
    check_pv_quadrature,
    check_cubic_two_component,
)


def run_check(fn):
    """Run one check; an exception becomes a failed result carrying its message."""
    try:
        return fn()
    except Exception as exc:  # noqa: BLE001 - the suite reports, never aborts
        number = CHECKS.index(fn) + 1 if fn in CHECKS else 0
        key = fn.__name__.removeprefix("check_").replace("_", "-")
        return CheckResult(number, key, False, (), f"{type(exc).__name__}: {exc}")


def run_suite(only=None):
    """Run all checks in order, or those whose numbers are listed in ``only``."""
    chosen = [fn for k, fn in enumerate(CHECKS, 1) if only is None or k in set(only)]
    return [run_check(fn) for fn in chosen]


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.6g}"


def render_report(results):
    """Fixed-width pass/fail table, one line per check."""
    lines = []
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        detail = " ".join(f"{k}={_fmt(v)}" for k, v in r.metrics)
        line = f"{r.number:02d} {r.key:<28} {mark}  {detail}".rstrip()
        lines.append(line)
        if r.note:
            lines.append(f"   note: {r.note}")
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"


def report_dict(results):
    return {
        "passed": all(r.passed for r in results),
        "checks": [
            {
                "number": r.number,
                "key": r.key,
                "passed": r.passed,
                "metrics": {k: v for k, v in r.metrics},
                "note": r.note,
            }
            for r in results
        ],
    }


def write_report(results, dest, fmt="text"):
    """Write the report as ``text`` or ``json`` to a path or stream."""
    if fmt == "json":
        dump_json(report_dict(results), dest)
        return
    text = render_report(results)
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)

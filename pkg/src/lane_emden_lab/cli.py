"""Command-line front end.

Every command computes a table (written as CSV) and a summary (written as
JSON). Exit codes: 0 success, 1 failed ``verify`` checks, 2 domain or
numerical errors (one JSON line on stderr), 64 bad flags, 74 I/O errors.
Output goes to stdout unless ``--output`` or an output directory (flag or
the LANE_EMDEN_LAB_OUTPUT_DIR environment variable) is given.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .angular import (
    CutoffSpec,
    angular_coefficients,
    constant_solution_check,
    singular_instability_probe,
    stability_triple,
)
from .energy import energy_scan, growth_slope, scale_invariance_check
from .errors import LabError
from .exponents import (
    classify,
    fractional_condition,
    jl_exponent,
    jl_exponent_closed_form,
    jl_exponent_root,
    phase_diagram,
    sobolev_exponent,
)
from .fractional import (
    A_constant_quadrature,
    KernelQuery,
    hardy_integral_quadrature,
    kernel_K,
    kernel_monotonicity_gap,
)
from .gamma_core import hardy_constant, kappa_s, power_law_multiplier, sphere_area
from .params import ProblemParams
from .quadrature import QuadratureSpec
from .radial import (
    ShootingConfig,
    blow_down,
    ode_residual,
    resolved_midpoints,
    sample,
    sample_singular,
    solve_radial,
)
from .singular import growth_integral, is_singular_stable, make_singular, residual_local
from .tables import dump_json, write_csv
from .verify import run_suite, write_report

__all__ = ["main", "build_parser", "parse_range", "EXIT_OK", "EXIT_FAILED", "EXIT_DOMAIN", "EXIT_USAGE", "EXIT_IO"]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_DOMAIN = 2
EXIT_USAGE = 64
EXIT_IO = 74

ENV_OUTPUT_DIR = "LANE_EMDEN_LAB_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let values such as -0.5:0.5:3 or -0.4,-0.1 through as arguments
        self._negative_number_matcher = re.compile(r"^-\.?\d")

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------ arguments


def parse_range(text):
    """``start:stop:count`` with inclusive ends and count >= 2."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"range must be start:stop:count, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must be start:stop:count, got {text!r}") from None
    if count < 2:
        raise argparse.ArgumentTypeError(f"range count must be >= 2, got {count}")
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise argparse.ArgumentTypeError(f"range ends must be finite, got {text!r}")
    return np.linspace(start, stop, count)


def _vector(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _check_list(text):
    try:
        return sorted({int(v) for v in text.split(",")})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _output_args(p, default_format, formats=("csv", "json"), figure=True):
    g = p.add_argument_group("output")
    g.add_argument("-o", "--output", help="output file (default: stdout or the output directory)")
    g.add_argument(
        "--output-dir",
        default=None,
        help=f"directory for default-named outputs (default: ${ENV_OUTPUT_DIR})",
    )
    g.add_argument("--format", choices=formats, default=default_format)
    if figure:
        g.add_argument("--figure", metavar="PATH", help="also write a figure (png, pdf or svg)")


def _problem_args(p, need_p=True):
    p.add_argument("--n", type=float, required=True, help="dimension")
    p.add_argument("--s", type=float, required=True, help="order of the operator")
    p.add_argument("--p", type=float, required=need_p, help="exponent")
    p.add_argument("--m", type=int, default=1, help="number of components")


def build_parser():
    parser = _Parser(
        prog="lane-emden-lab",
        description="Numerics for coupled Lane-Emden systems (-Delta)^s u_i = |u|^(p-1) u_i.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("exponents", help="critical exponents, Hardy constant and regime")
    _problem_args(p, need_p=False)
    _output_args(p, "json")

    p = sub.add_parser("phase-diagram", help="regime tags on an (n, p) grid")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--n", type=parse_range, required=True, help="start:stop:count")
    p.add_argument("--p", type=parse_range, required=True, help="start:stop:count")
    _output_args(p, "csv")

    p = sub.add_parser("singular", help="the singular solution and its growth integrals")
    _problem_args(p)
    p.add_argument("--direction", type=_vector, help="unit vector in R^m (default e_1)")
    p.add_argument("--r", type=parse_range, default=parse_range("0.1:10:25"), help="sample radii")
    _output_args(p, "csv")

    p = sub.add_parser("shoot", help="integrate a radial solution from the origin")
    _problem_args(p)
    p.add_argument("--u0", "--a", dest="u0", type=_vector, required=True, help="u(0), comma-separated")
    p.add_argument("--w0", type=_vector, help="Delta u(0) for s = 2")
    p.add_argument("--r-max", type=_positive, default=10.0)
    p.add_argument("--rel-tol", type=_positive, default=1e-11)
    p.add_argument("--blowup-guard", type=_positive, default=1e12)
    p.add_argument("--blow-down", type=_positive, metavar="LAM", help="rescale by u^lam before output")
    p.add_argument("--at", type=parse_range, help="sample at these radii instead of the integrator nodes")
    _output_args(p, "csv")

    p = sub.add_parser("energy-scan", help="monotonicity functional on a lambda grid")
    _problem_args(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--u0", "--a", dest="u0", type=_vector, help="shooting data u(0)")
    src.add_argument("--singular", action="store_true", help="use the singular solution")
    p.add_argument("--w0", type=_vector, help="Delta u(0) for s = 2")
    p.add_argument("--lambda", dest="lam", type=parse_range, required=True, help="start:stop:count")
    p.add_argument("--r-max", type=_positive, default=None, help="radius to integrate to")
    p.add_argument("--rel-tol", type=_positive, default=1e-11)
    p.add_argument("--h-rel", type=_positive, default=1e-4, help="relative finite-difference step")
    p.add_argument("--scale-check", type=_positive, metavar="LAM", help="also report E(u, r lam) - E(u^lam, r)")
    p.add_argument("--growth", type=parse_range, metavar="RANGE", help="also fit growth slopes on these radii")
    _output_args(p, "csv")

    p = sub.add_parser("angular", help="angular coefficients, stability triple and probe")
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--p", type=parse_range, required=True, help="start:stop:count")
    p.add_argument("--probe-s", type=int, choices=(1, 2), default=2)
    p.add_argument("--epsilon", type=_positive, default=1e-3, help="probe cutoff scale")
    _output_args(p, "csv")

    p = sub.add_parser("kernel", help="sphere kernel K_alpha(c) and principal-value constants")
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--alpha", type=parse_range, required=True, help="start:stop:count")
    p.add_argument("--c", type=parse_range, required=True, help="start:stop:count")
    p.add_argument("--p", type=float, help="also report the monotonicity gap and A_{n,s}")
    p.add_argument("--quad-rel-tol", type=_positive, default=1e-8)
    _output_args(p, "csv")

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--only", type=_check_list, help="comma-separated check numbers")
    _output_args(p, "text", formats=("text", "json"), figure=False)
    return parser


# ------------------------------------------------------------- results


@dataclass
class Result:
    header: tuple = ()
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    figure: object = None  # zero-argument callable returning a Figure
    exit_code: int = EXIT_OK
    text: str | None = None


def _params(a):
    return ProblemParams(n=a.n, s=a.s, p=a.p, m=a.m)


def cmd_exponents(a):
    n, s = a.n, a.s
    p_s = sobolev_exponent(n, s)
    summary = {
        "n": n,
        "s": s,
        "p_S": p_s,
        "p_c": jl_exponent(n, s),
        "p_c_root": jl_exponent_root(n, s),
        "hardy": hardy_constant(n, s),
        "sphere_area": sphere_area(n),
    }
    if s in (1, 2):
        summary["p_c_closed_form"] = jl_exponent_closed_form(n, s)
    if 0 < s < 1:
        summary["kappa_s"] = kappa_s(s)
    if a.p is not None:
        prm = _params(a)
        reg = classify(prm)
        summary.update(p=a.p, regime=reg.tag.value, margin=reg.margin)
        if reg.note:
            summary["note"] = reg.note
        if a.p > p_s:
            flag, margin = fractional_condition(prm)
            summary.update(
                fractional_condition=flag,
                multiplier_beta_p=power_law_multiplier(n, s, prm.beta),
                singular_stable=is_singular_stable(prm)[0],
            )
    header = tuple(summary)
    res = Result(header, [tuple(summary.values())], summary)

    def fig():
        from .plotting import plot_multiplier

        betas = np.linspace(0.0, n - 2 * s, 201)[1:-1]
        vals = [power_law_multiplier(n, s, b) for b in betas]
        bp = 2 * s / (a.p - 1) if a.p is not None and 0 < 2 * s / (a.p - 1) < n - 2 * s else None
        return plot_multiplier(n, s, betas, vals, summary["hardy"], bp)

    res.figure = fig
    return res


def cmd_phase_diagram(a):
    pd = phase_diagram(a.n, a.p, a.s)
    rows = [
        (float(n), float(p), pd.tags[i, j], float(pd.margins[i, j]))
        for i, n in enumerate(pd.n_values)
        for j, p in enumerate(pd.p_values)
    ]
    summary = {
        "s": pd.s,
        "n": pd.n_values,
        "p": pd.p_values,
        "regime": pd.tags.tolist(),
        "margin": pd.margins,
        "sobolev_boundary": pd.sobolev_boundary(),
        "supercritical_boundary": pd.supercritical_boundary(),
    }

    def fig():
        from .plotting import plot_phase_diagram

        return plot_phase_diagram(pd)

    return Result(("n", "p", "regime", "margin"), rows, summary, fig)


def cmd_singular(a):
    prm = _params(a)
    sol = make_singular(prm, a.direction)
    stable, margin = is_singular_stable(prm)
    r = a.r
    if np.any(r <= 0):
        raise UsageError("--r radii must be positive")
    u = sol.value(r)
    local = prm.s in (1, 2)
    res_col = [float(np.max(np.abs(residual_local(sol, x)))) for x in r] if local else [math.nan] * len(r)
    growth = {}
    for which in ("Lp1", "L2", "GradSq"):
        try:
            growth[which] = [growth_integral(sol, float(x), which) for x in r]
        except LabError as exc:
            growth[which] = str(exc)
    m = prm.m
    header = ("r",) + tuple(f"u_{i + 1}" for i in range(m)) + ("residual",)
    rows = [(float(x),) + tuple(u[k]) + (res_col[k],) for k, x in enumerate(r)]
    summary = {
        "n": prm.n,
        "s": prm.s,
        "p": prm.p,
        "m": m,
        "amplitude": sol.amplitude,
        "direction": sol.direction,
        "beta": sol.beta,
        "stable": stable,
        "stability_margin": margin,
        "r": r,
        "max_residual": max(res_col) if local else math.nan,
        "growth_integral": growth,
    }

    def fig():
        from .plotting import plot_profile

        return plot_profile(r, np.abs(u), log=True, title="|u_i| of the singular solution")

    return Result(header, rows, summary, fig)


def _shooting(a, r_max):
    prm = _params(a)
    w0 = a.w0
    if prm.s == 2 and w0 is None:
        raise UsageError("--w0 is required for s = 2")
    cfg = ShootingConfig(
        init_u=a.u0, init_w=w0, r_max=r_max, rel_tol=a.rel_tol, blowup_guard=getattr(a, "blowup_guard", 1e12)
    )
    return solve_radial(prm, cfg)


def _trajectory_rows(sol, radii):
    m = sol.params.m
    u, du, w, dw = sol.evaluate(radii)
    cols = [u, du] if w is None else [u, du, w, dw]
    names = ["u", "du"] if w is None else ["u", "du", "w", "dw"]
    header = ("r",) + tuple(f"{nm}_{i + 1}" for nm in names for i in range(m))
    rows = [(float(x),) + tuple(float(c[k, i]) for c in cols for i in range(m)) for k, x in enumerate(radii)]
    return header, rows


def cmd_shoot(a):
    sol = _shooting(a, a.r_max)
    out = blow_down(sol, a.blow_down) if a.blow_down else sol
    if a.at is not None:
        radii = a.at
        if np.any(radii < out.r_min) or np.any(radii > out.r_max):
            raise UsageError(f"--at radii must lie in [{out.r_min}, {out.r_max}]")
        header = _trajectory_rows(out, radii[:1])[0]
        rows = [(float(x),) + tuple(float(v) for part in sample(out, x) for v in part) for x in radii]
    else:
        header, rows = _trajectory_rows(out, out.grid)
    mids = resolved_midpoints(out)
    resid = ode_residual(out, mids) if mids.size else np.zeros(0)
    summary = {
        "n": out.params.n,
        "s": out.params.s,
        "p": out.params.p,
        "m": out.params.m,
        "u0": a.u0,
        "w0": a.w0,
        "r_max": out.r_max,
        "blowup_radius": out.blowup_radius,
        "nodes": int(out.grid.size),
        "blow_down": a.blow_down,
        "max_ode_residual": float(resid.max()) if resid.size else 0.0,
    }

    def fig():
        from .plotting import plot_profile

        rr = np.asarray([row[0] for row in rows])
        uu = np.asarray([row[1 : 1 + out.params.m] for row in rows])
        return plot_profile(rr, uu, title="radial profile")

    return Result(header, rows, summary, fig)


def cmd_energy_scan(a):
    lam = a.lam
    if a.singular:
        prm = _params(a)
        top = max(100.0, 2.0 * float(lam[-1]))
        sol = sample_singular(make_singular(prm), r_min=1e-3, r_max=top)
    else:
        r_max = a.r_max if a.r_max is not None else 1.25 * float(lam[-1])
        sol = _shooting(a, r_max)
    curve = energy_scan(sol, lam, h_rel=a.h_rel)
    summary = curve.to_dict()
    summary["nondecreasing"] = curve.nondecreasing
    summary["relative_variation"] = curve.relative_variation()
    if a.scale_check is not None:
        radii = [float(x) / a.scale_check for x in lam]
        summary["scale_invariance"] = {
            "lambda": a.scale_check,
            "r": radii,
            "residual": [scale_invariance_check(sol, a.scale_check, x) for x in radii],
        }
    if a.growth is not None:
        summary["growth"] = {}
        for which in ("Lp1", "L2"):
            fit = growth_slope(sol, a.growth, which)
            summary["growth"][which] = {"slope": fit.slope, "intercept": fit.intercept, "degenerate": fit.degenerate}

    def fig():
        from .plotting import plot_energy_curve

        return plot_energy_curve(curve)

    return Result(curve.HEADER, list(curve.rows()), summary, fig)


def cmd_angular(a):
    n = a.n
    rows = []
    for p in a.p:
        p = float(p)
        co = angular_coefficients(n, p)
        c1, c2, c3 = stability_triple(n, p)
        amp = constant_solution_check(n, p) if p > sobolev_exponent(n, 2) else math.nan
        if p > sobolev_exponent(n, a.probe_s):
            probe = singular_instability_probe(n, a.probe_s, p, CutoffSpec(a.epsilon)).quadratic_form
            stable = is_singular_stable(ProblemParams(n, a.probe_s, p))[0]
        else:
            probe, stable = math.nan, ""
        rows.append((p, co.q, co.alpha, co.beta, c1, c2, c3, amp, probe, stable))
    header = ("p", "q", "alpha", "beta", "c1", "c2", "c3", "amplitude", "probe", "singular_stable")
    summary = {
        "n": n,
        "probe_s": a.probe_s,
        "epsilon": a.epsilon,
        "p_S": sobolev_exponent(n, 2),
        "p_c": jl_exponent(n, 2),
        "rows": [dict(zip(header, r)) for r in rows],
    }

    def fig():
        from .plotting import plot_angular

        return plot_angular([r[0] for r in rows], [r[5] for r in rows], [r[6] for r in rows])

    return Result(header, rows, summary, fig)


def cmd_kernel(a):
    spec = QuadratureSpec(rel_tol=a.quad_rel_tol)
    table = np.array([[kernel_K(KernelQuery(a.n, a.s, float(al), float(c), spec)) for c in a.c] for al in a.alpha])
    rows = [(float(al), float(c), float(table[i, j])) for i, al in enumerate(a.alpha) for j, c in enumerate(a.c)]
    summary = {"n": a.n, "s": a.s, "alpha": a.alpha, "c": a.c, "K": table}
    if a.p is not None:
        summary["p"] = a.p
        summary["monotonicity_gap"] = [kernel_monotonicity_gap(a.n, a.s, a.p, float(c), spec) for c in a.c]
        if 0 < a.s < 1:
            summary["A_quadrature"] = A_constant_quadrature(a.n, a.s, a.p, spec)
            summary["A_closed_form"] = power_law_multiplier(a.n, a.s, 2 * a.s / (a.p - 1))
            summary["hardy_quadrature"] = hardy_integral_quadrature(a.n, a.s, spec)
            summary["hardy_closed_form"] = hardy_constant(a.n, a.s)

    def fig():
        from .plotting import plot_kernel

        return plot_kernel(a.alpha, a.c, table)

    return Result(("alpha", "c", "K"), rows, summary, fig)


def cmd_verify(a):
    results = run_suite(a.only)
    res = Result(summary={"passed": all(r.passed for r in results)})
    res.text = results
    res.exit_code = EXIT_OK if all(r.passed for r in results) else EXIT_FAILED
    return res


COMMANDS = {
    "exponents": cmd_exponents,
    "phase-diagram": cmd_phase_diagram,
    "singular": cmd_singular,
    "shoot": cmd_shoot,
    "energy-scan": cmd_energy_scan,
    "angular": cmd_angular,
    "kernel": cmd_kernel,
    "verify": cmd_verify,
}


# -------------------------------------------------------------- output


def _destination(a):
    out_dir = a.output_dir if a.output_dir is not None else os.environ.get(ENV_OUTPUT_DIR) or None
    if a.output:
        path = Path(a.output)
        if out_dir and not path.is_absolute():
            path = Path(out_dir) / path
        return path
    if out_dir:
        ext = {"csv": "csv", "json": "json", "text": "txt"}[a.format]
        return Path(out_dir) / f"{a.command}.{ext}"
    return None


def _emit(a, res, stream):
    if a.command == "verify":
        write_report(res.text, stream, a.format)
    elif a.format == "json":
        dump_json(res.summary, stream)
    else:
        write_csv(res.header, res.rows, stream)


def _write(a, res, stdout):
    dest = _destination(a)
    if dest is None:
        _emit(a, res, stdout)
        return
    dest.parent.mkdir(parents=True, exist_ok=True)
    with open(dest, "w", newline="", encoding="utf-8") as fh:
        _emit(a, res, fh)


def _fail(stderr, code, kind, message):
    line = json.dumps({"error": kind, "exit": code, "message": " ".join(str(message).split())}, sort_keys=True)
    stderr.write(line + "\n")
    return code


def main(argv=None, stdout=None, stderr=None):
    """Entry point; returns the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        res = COMMANDS[a.command](a)
    except UsageError as exc:
        parser.print_usage(stderr)
        stderr.write(f"lane-emden-lab: error: {exc}\n")
        return EXIT_USAGE
    except (LabError, ValueError, ArithmeticError) as exc:
        return _fail(stderr, EXIT_DOMAIN, type(exc).__name__, exc)
    try:
        _write(a, res, stdout)
        if getattr(a, "figure", None):
            from .plotting import save

            save(res.figure(), a.figure)
    except OSError as exc:
        return _fail(stderr, EXIT_IO, type(exc).__name__, exc)
    except (LabError, ValueError) as exc:
        return _fail(stderr, EXIT_DOMAIN, type(exc).__name__, exc)
    return res.exit_code


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()

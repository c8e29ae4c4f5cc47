import csv
import io
import json
import math
import sys

import numpy as np
import pytest

import lane_emden_lab
from lane_emden_lab import angular, energy, exponents, fractional, gamma_core, radial, singular
from lane_emden_lab.cli import (
    EXIT_DOMAIN,
    EXIT_FAILED,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    ENV_OUTPUT_DIR,
    main,
    parse_range,
)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_exponents_example():
    code, out, _ = run("exponents", "--n", "11", "--s", "1")
    assert code == EXIT_OK
    d = json.loads(out)
    assert d["p_S"] == pytest.approx(13 / 9, rel=1e-15)
    assert d["p_c"] == pytest.approx(6.922024586816337, rel=1e-12)
    assert d["hardy"] == pytest.approx(20.25, rel=1e-14)


def test_exponents_infinite_written_as_string():
    code, out, _ = run("exponents", "--n", "10", "--s", "1")
    assert code == EXIT_OK and json.loads(out)["p_c"] == "inf"


def test_exponents_with_p():
    code, out, _ = run("exponents", "--n", "11", "--s", "1", "--p", "7")
    d = json.loads(out)
    assert d["regime"] == "Unclassified" and d["fractional_condition"] is False


def test_domain_error_is_one_json_line():
    code, out, err = run("exponents", "--n", "2", "--s", "1.5")
    assert code == EXIT_DOMAIN and out == ""
    lines = err.strip().splitlines()
    assert len(lines) == 1
    d = json.loads(lines[0])
    assert d["exit"] == EXIT_DOMAIN and d["error"] == "DomainError" and d["message"]


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nonsense"],
        ["exponents", "--n", "abc", "--s", "1"],
        ["exponents", "--s", "1"],
        ["phase-diagram", "--s", "1", "--n", "3:10", "--p", "1.1:5:10"],
        ["phase-diagram", "--s", "1", "--n", "3:10:1", "--p", "1.1:5:10"],
        ["exponents", "--n", "11", "--s", "1", "--format", "xml"],
    ],
)
def test_usage_errors(argv, capsys):
    code, out, _ = run(*argv)
    assert code == EXIT_USAGE and out == ""
    assert "usage" in capsys.readouterr().err


def test_io_error(tmp_path):
    blocker = tmp_path / "afile"
    blocker.write_text("x")
    code, _, err = run("exponents", "--n", "11", "--s", "1", "-o", str(blocker / "x.json"))
    assert code == EXIT_IO
    assert json.loads(err)["exit"] == EXIT_IO


def test_parse_range():
    assert parse_range("1:2:3") == pytest.approx([1, 1.5, 2])
    assert parse_range("-0.5:0.5:3") == pytest.approx([-0.5, 0, 0.5])
    for bad in ("1:2", "1:2:1", "a:2:3", "1:inf:3"):
        with pytest.raises(Exception):
            parse_range(bad)


def test_phase_diagram_csv():
    code, out, _ = run("phase-diagram", "--s", "1", "--n", "3:12:10", "--p", "1.5:9:16")
    assert code == EXIT_OK
    table = rows(out)
    assert len(table) == 160
    assert set(table[0]) == {"n", "p", "regime", "margin"}
    assert {r["regime"] for r in table} >= {"SubcriticalTrivial", "SupercriticalTrivial"}


def test_singular_csv():
    code, out, _ = run("singular", "--n", "5", "--s", "1", "--p", "3", "--r", "0.5:2:4")
    assert code == EXIT_OK
    table = rows(out)
    assert float(table[1]["u_1"]) == pytest.approx(math.sqrt(2))
    assert max(abs(float(r["residual"])) for r in table) < 1e-12
    code, out, _ = run("singular", "--n", "5", "--s", "1", "--p", "3", "--format", "json")
    assert json.loads(out)["amplitude"] == pytest.approx(math.sqrt(2))


def test_shoot_and_sample():
    code, out, _ = run("shoot", "--n", "3", "--s", "1", "--p", "5", "--a", "1.3160740129524924", "--r-max", "10", "--at", "0:10:5")
    assert code == EXIT_OK
    table = rows(out)
    r = np.array([float(x["r"]) for x in table])
    u = np.array([float(x["u_1"]) for x in table])
    assert u == pytest.approx(3**0.25 / np.sqrt(1 + r * r), abs=1e-6)
    code, out, _ = run("shoot", "--n", "13", "--s", "2", "--p", "2", "--a", "0.3", "--w0", "-0.2", "--r-max", "12", "--blow-down", "2", "--format", "json")
    d = json.loads(out)
    assert code == EXIT_OK and d["max_ode_residual"] < 1e-6


def test_shoot_s2_needs_w0(capsys):
    code, _, err = run("shoot", "--n", "13", "--s", "2", "--p", "2", "--a", "0.3")
    assert code == EXIT_USAGE and "--w0" in err


def test_shoot_unsupported_order_is_domain_error():
    code, _, err = run("shoot", "--n", "5", "--s", "0.5", "--p", "3", "--a", "0.3")
    assert code == EXIT_DOMAIN and json.loads(err)["error"] == "UnsupportedError"


def test_energy_scan_example():
    code, out, _ = run("energy-scan", "--n", "3", "--s", "1", "--p", "5", "--a", "1.316074", "--lambda", "0.5:8:40")
    assert code == EXIT_OK
    table = rows(out)
    assert list(table[0]) == ["lambda", "E", "dE_fd", "identity_rhs", "residual"]
    E = np.array([float(r["E"]) for r in table])
    assert len(E) == 40 and np.all(np.diff(E) >= -1e-8 * (1 + np.abs(E[:-1])))


def test_energy_scan_singular_and_growth():
    code, out, _ = run(
        "energy-scan", "--n", "13", "--s", "2", "--p", "2", "--singular", "--lambda", "1:10:4",
        "--scale-check", "2", "--growth", "1:50:8", "--format", "json",
    )
    assert code == EXIT_OK
    d = json.loads(out)
    assert np.ptp(d["E"]) <= 1e-6 * max(abs(d["E"][0]), 1)


def test_angular_csv():
    code, out, _ = run("angular", "--n", "13", "--p", "2:4:3", "--probe-s", "2")
    assert code == EXIT_OK
    table = rows(out)
    row = [r for r in table if float(r["p"]) == 3][0]
    assert float(row["alpha"]) == 46 and float(row["beta"]) == 504


def test_kernel_csv_and_json():
    code, out, _ = run("kernel", "--n", "3", "--s", "0.5", "--alpha", "0:1:3", "--c", "-0.5:0.5:3")
    assert code == EXIT_OK and len(rows(out)) == 9
    code, out, _ = run("kernel", "--n", "3", "--s", "0.5", "--alpha", "0:1:2", "--c", "0:0.5:2", "--p", "6", "--format", "json")
    d = json.loads(out)
    assert code == EXIT_OK
    assert d["A_quadrature"] == pytest.approx(d["A_closed_form"], rel=1e-6)
    assert d["hardy_quadrature"] == pytest.approx(d["hardy_closed_form"], rel=1e-6)


def test_kernel_at_origin_matches_quarter_pi():
    code, out, _ = run("kernel", "--n", "3", "--s", "0.5", "--alpha", "0:0:2", "--c", "0:0:2")
    assert float(rows(out)[0]["K"]) == pytest.approx(math.pi / 4, rel=1e-10)


def test_verify_subset():
    code, out, _ = run("verify", "--only", "1,3,15")
    assert code == EXIT_OK
    assert "3/3 checks passed" in out
    code, out, _ = run("verify", "--only", "1", "--format", "json")
    assert json.loads(out)["checks"][0]["passed"] is True


def test_verify_failure_exit_code(monkeypatch):
    from lane_emden_lab import verify

    monkeypatch.setattr(verify, "check_jl_laplacian", lambda: (_ for _ in ()).throw(RuntimeError("boom")))
    monkeypatch.setattr(verify, "CHECKS", (verify.check_jl_laplacian,) + verify.CHECKS[1:])
    code, out, _ = run("verify", "--only", "1")
    assert code == EXIT_FAILED and "FAIL" in out


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_OUTPUT_DIR, str(tmp_path))
    code, out, _ = run("exponents", "--n", "11", "--s", "1")
    assert code == EXIT_OK and out == ""
    assert json.loads((tmp_path / "exponents.json").read_text())["hardy"] == pytest.approx(20.25, rel=1e-14)
    code, _, _ = run("phase-diagram", "--s", "1", "--n", "3:4:2", "--p", "2:3:2", "-o", "pd.csv")
    assert (tmp_path / "pd.csv").exists()
    explicit = tmp_path / "sub"
    code, _, _ = run("exponents", "--n", "11", "--s", "1", "--output-dir", str(explicit))
    assert (explicit / "exponents.json").exists()


def test_byte_identical_outputs(tmp_path):
    for k in range(2):
        run("phase-diagram", "--s", "2", "--n", "5:20:4", "--p", "1.5:30:7", "-o", str(tmp_path / f"a{k}.csv"))
    assert (tmp_path / "a0.csv").read_bytes() == (tmp_path / "a1.csv").read_bytes()


@pytest.mark.parametrize("suffix", ["png", "svg"])
def test_figure_flag(tmp_path, suffix):
    paths = []
    for k in range(2):
        path = tmp_path / f"pd{k}.{suffix}"
        code, out, _ = run("phase-diagram", "--s", "1", "--n", "3:12:4", "--p", "1.5:9:5", "--figure", str(path))
        assert code == EXIT_OK and out.startswith("n,p,regime,margin")
        paths.append(path)
    assert paths[0].stat().st_size > 1000
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_default_output_has_no_figure(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    run("phase-diagram", "--s", "1", "--n", "3:4:2", "--p", "2:3:2")
    assert list(tmp_path.iterdir()) == []


# Every operation of the numerical modules must be reachable from some command.
OPERATIONS = [
    gamma_core.log_gamma, gamma_core.sphere_area, gamma_core.power_law_multiplier,
    gamma_core.hardy_constant, gamma_core.kappa_s,
    exponents.sobolev_exponent, exponents.jl_exponent_closed_form, exponents.jl_exponent_root,
    exponents.fractional_condition, exponents.classify, exponents.phase_diagram,
    singular.make_singular, singular.residual_local, singular.is_singular_stable, singular.growth_integral,
    radial.solve_radial, radial.blow_down, radial.sample,
    energy.energy_E1, energy.energy_E1_derivative_identity, energy.energy_E2,
    energy.energy_E2_derivative_bound, energy.energy_scan, energy.scale_invariance_check, energy.growth_slope,
    angular.angular_coefficients, angular.constant_solution_check, angular.stability_triple,
    angular.singular_instability_probe,
    fractional.kernel_K, fractional.kernel_monotonicity_gap,
    fractional.A_constant_quadrature, fractional.hardy_integral_quadrature,
]

AUDIT_RUNS = [
    ["exponents", "--n", "11", "--s", "1", "--p", "7"],
    ["exponents", "--n", "3", "--s", "0.5"],
    ["phase-diagram", "--s", "1", "--n", "3:12:4", "--p", "1.5:9:4"],
    ["singular", "--n", "5", "--s", "1", "--p", "3", "--r", "1:2:2"],
    ["shoot", "--n", "3", "--s", "1", "--p", "5", "--a", "1.3", "--r-max", "3", "--blow-down", "2", "--at", "0:1.5:3"],
    ["energy-scan", "--n", "3", "--s", "1", "--p", "5", "--a", "1.3", "--lambda", "1:2:2", "--scale-check", "2", "--growth", "1:2:4"],
    ["energy-scan", "--n", "13", "--s", "2", "--p", "2", "--a", "0.3", "--w0", "-0.2", "--lambda", "1:2:2"],
    ["angular", "--n", "13", "--p", "2:3:2", "--probe-s", "2"],
    ["kernel", "--n", "3", "--s", "0.5", "--alpha", "0:1:2", "--c", "0:0.5:2", "--p", "6"],
]


def test_every_operation_reachable():
    seen = set()

    def prof(frame, event, arg):
        if event == "call":
            seen.add(frame.f_code)

    sys.setprofile(prof)
    try:
        for argv in AUDIT_RUNS:
            code, _, err = run(*argv)
            assert code == EXIT_OK, (argv, err)
    finally:
        sys.setprofile(None)
    missing = [op.__qualname__ for op in OPERATIONS if op.__code__ not in seen]
    assert missing == []


def test_console_script_registered():
    from importlib.metadata import entry_points

    eps = [ep for ep in entry_points(group="console_scripts") if ep.name == "lane-emden-lab"]
    assert eps and eps[0].value == "lane_emden_lab.cli:main"

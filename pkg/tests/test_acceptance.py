"""The sixteen acceptance criteria, each at its stated tolerance.

Criteria 1 to 15 read the results of the built-in verification suite (run
once per session) and restate the thresholds here; criterion 16 runs the
``verify`` command twice. A pass/fail line per criterion is printed in the
terminal summary.
"""

import io
import math

import pytest

from lane_emden_lab.cli import EXIT_OK, main
from lane_emden_lab.verify import CHECKS, run_check


@pytest.fixture(scope="session")
def suite():
    return {k: run_check(fn) for k, fn in enumerate(CHECKS, 1)}


def _get(suite, k):
    r = suite[k]
    assert not r.note.startswith(("Error", "Exception")) and r.metrics, r.note
    return r


def test_criterion_01_jl_equivalence_s1(suite):
    r = _get(suite, 1)
    assert r.metric("max_rel_err") < 1e-9
    assert r.metric("infinite_for_n_le_10")
    assert r.passed


def test_criterion_02_jl_equivalence_s2(suite):
    r = _get(suite, 2)
    assert r.metric("max_rel_err") < 1e-9
    assert r.metric("infinite_for_n_le_12")
    assert abs(r.metric("jl_13_2") - 28.172) < 5e-4
    assert r.passed


def test_criterion_03_multiplier_identities(suite):
    r = _get(suite, 3)
    assert r.metric("max_rel_err_random") < 1e-12
    assert r.metric("max_rel_err_hardy4") < 1e-12
    assert r.passed


def test_criterion_04_fractional_condition(suite):
    r = _get(suite, 4)
    assert r.passed


def test_criterion_05_bubble(suite):
    r = _get(suite, 5)
    assert r.metric("max_abs_err") < 1e-6
    assert r.passed


def test_criterion_06_e1_monotonicity(suite):
    r = _get(suite, 6)
    assert r.metric("solutions") == 6
    assert r.metric("violations") == 0
    assert r.metric("max_identity_residual") < 1e-4
    assert r.metric("min_fd_order") >= 1.8
    assert r.passed


def test_criterion_07_e1_homogeneous(suite):
    r = _get(suite, 7)
    assert r.metric("rel_variation") < 1e-6
    assert r.metric("rel_dev_8pi2_3") < 1e-6
    assert r.passed


def test_criterion_08_e2(suite):
    r = _get(suite, 8)
    assert r.metric("singular_rel_variation") < 1e-6
    assert r.metric("generic_violations") == 0
    assert r.metric("generic_min_rel_fd") > -1e-6
    assert r.metric("bracket_path_gap") < 1e-6
    assert r.passed


def test_criterion_09_scale_invariance(suite):
    r = _get(suite, 9)
    assert r.metric("max_residual_s1") < 1e-8
    assert r.metric("max_residual_s2") < 1e-6
    assert r.passed


def test_criterion_10_growth_exponents(suite):
    r = _get(suite, 10)
    assert r.metric("max_abs_slope_err") < 1e-6
    assert r.passed


def test_criterion_11_angular(suite):
    r = _get(suite, 11)
    assert r.metric("max_rel_err_beta") < 1e-12
    assert r.metric("c3_sign_change_bracketed")
    assert r.metric("triple_13_2_exact")
    assert r.passed


def test_criterion_12_instability_probe(suite):
    r = _get(suite, 12)
    assert r.metric("agreeing") == r.metric("points") >= 12
    assert 0 < r.metric("stable_points") < r.metric("points")
    assert r.passed


def test_criterion_13_kernel(suite):
    r = _get(suite, 13)
    assert r.metric("k0_abs_err") < 1e-10
    assert r.metric("decreasing_in_alpha")
    assert r.metric("max_gap") < 0
    assert r.passed


def test_criterion_14_pv_quadrature(suite):
    r = _get(suite, 14)
    assert r.metric("max_rel_err_A") < 1e-3
    assert r.metric("max_rel_err_hardy") < 1e-3
    assert r.passed


def test_criterion_15_cubic_two_component(suite):
    r = _get(suite, 15)
    assert r.metric("n5_11_trivial") and r.metric("n4_critical") and r.metric("n13_40_unclassified")
    assert r.metric("n12_trivial_noted")
    assert math.isclose(r.metric("p_c_12"), 3.927, abs_tol=5e-4)
    assert "n=12" in r.note
    assert r.passed


def test_criterion_16_determinism(tmp_path):
    reports = []
    for k in range(2):
        path = tmp_path / f"verify{k}.txt"
        err = io.StringIO()
        assert main(["verify", "-o", str(path)], stdout=io.StringIO(), stderr=err) == EXIT_OK, err.getvalue()
        reports.append(path.read_bytes())
    assert reports[0] == reports[1]
    assert b"15/15 checks passed" in reports[0]

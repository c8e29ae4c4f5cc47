import math

import mpmath
import numpy as np
import pytest

from lane_emden_lab import ConvergenceError, DomainError, UnsupportedError
from lane_emden_lab.exponents import sobolev_exponent
from lane_emden_lab.fractional import (
    A_constant_quadrature,
    KernelQuery,
    fractional_normalization,
    folded_numerator,
    hardy_integral_quadrature,
    kernel_K,
    kernel_monotonicity_gap,
    sphere_inner_integral,
)
from lane_emden_lab.gamma_core import hardy_constant, power_law_multiplier, sphere_area
from lane_emden_lab.quadrature import QuadratureSpec


def test_kernel_query_validation():
    for args in ((0, 0.5, 0, 0), (3, 1.0, 0, 0), (3, 0.5, 2.5, 0), (3, 0.5, 0, 1.0), (1, 0.75, 0, 0)):
        with pytest.raises(DomainError):
            KernelQuery(*args)


def test_kernel_closed_values():
    # n = 4, s = 1/2, alpha = 1, c = 1/2: the integrand is (t^2 + t) / (t^2 - t + 1)^3
    assert kernel_K(KernelQuery(4, 0.5, 1.0, 0.5)) == pytest.approx(4 / 3, rel=1e-10)
    # mpmath at 40 digits
    assert kernel_K(KernelQuery(4, 0.5, 0.5, 0.5)) == pytest.approx(1.5336947021690171458, rel=1e-10)


def test_kernel_against_mpmath_grid():
    spec = QuadratureSpec(rel_tol=1e-12)
    mpmath.mp.dps = 30
    for n, s, a, c in [(3, 0.5, 0.7, -0.4), (5, 1.5, 0.9, 0.8), (6, 0.75, 2.0, 0.95)]:
        ex = (n + 2 * s) / 2
        ref = mpmath.quad(lambda t: (t ** (n - 1 - a) + t ** (2 * s - 1 + a)) / (t * t + 1 - 2 * t * c) ** ex, [0, c, 1] if c > 0 else [0, 1])
        assert kernel_K(KernelQuery(n, s, a, c, spec)) == pytest.approx(float(ref), rel=1e-10)


def test_kernel_symmetry_and_monotonicity():
    n, s = 4, 0.25
    top = n - 2 * s
    for c in (-0.5, 0.3):
        assert kernel_K(KernelQuery(n, s, 0.6, c)) == pytest.approx(kernel_K(KernelQuery(n, s, top - 0.6, c)), rel=1e-8)
    ks = [kernel_K(KernelQuery(n, s, a, 0.2)) for a in np.linspace(0, top / 2, 6)]
    assert all(b < a for a, b in zip(ks, ks[1:]))
    cs = [kernel_K(KernelQuery(n, s, 0.5, c)) for c in np.linspace(-1, 0.9, 6)]
    assert all(b > a for a, b in zip(cs, cs[1:]))


def test_gap_sign():
    n, s = 5, 0.5
    p_s = sobolev_exponent(n, s)
    assert kernel_monotonicity_gap(n, s, p_s, 0.3) == 0.0
    assert kernel_monotonicity_gap(n, s, p_s + 2, 0.3) < 0
    with pytest.raises(DomainError):
        kernel_monotonicity_gap(n, s, p_s - 0.5, 0.3)


def test_normalization():
    # s = 1/2, n = 3: C = Gamma(2) / (pi^2 Gamma(1/2)) * 1/2 * 2
    assert fractional_normalization(3, 0.5) == pytest.approx(1 / math.pi**2, rel=1e-13)
    with pytest.raises(UnsupportedError):
        fractional_normalization(3, 1.5)


def test_folded_numerator_branches_agree():
    n, s, a = 5, 0.3, 0.8
    ell = np.array([-0.0999999, -0.1000001])
    v = folded_numerator(n, s, a, ell, shift=1.0)
    assert v[0] == pytest.approx(v[1], rel=1e-5)
    t = np.exp(-0.05)
    direct = t * ((1 - t**-a) * t ** (n - 1) + (1 - t**a) * t ** (2 * s - 1))
    assert folded_numerator(n, s, a, np.array([-0.05]), shift=1.0)[0] == pytest.approx(direct, rel=1e-10)
    assert folded_numerator(n, s, a, np.array([0.0]))[0] == 0.0
    assert np.isfinite(folded_numerator(n, 0.1, a, np.array([-800.0]), shift=1.0)).all()


@pytest.mark.parametrize("n,s,t", [(2, 0.5, 0.3), (3, 0.25, 0.9), (4, 0.75, 0.99), (5, 0.5, 0.5)])
def test_sphere_inner_integral_against_hypergeometric(n, s, t):
    ref = sphere_area(n) * float(mpmath.hyp2f1((n + 2 * s) / 2, s + 1, n / 2, t * t))
    assert sphere_inner_integral(n, s, t) == pytest.approx(ref, rel=1e-9)
    assert sphere_inner_integral(n, s, 0.0) == sphere_area(n)
    with pytest.raises(DomainError):
        sphere_inner_integral(n, s, 1.0)


@pytest.mark.parametrize("n,s", [(2, 0.25), (3, 0.5), (4, 0.75)])
def test_pv_matches_closed_forms(n, s):
    p = sobolev_exponent(n, s) + 1.5
    assert A_constant_quadrature(n, s, p) == pytest.approx(power_law_multiplier(n, s, 2 * s / (p - 1)), rel=1e-7)
    assert hardy_integral_quadrature(n, s) == pytest.approx(hardy_constant(n, s), rel=1e-7)


def test_pv_domain():
    with pytest.raises(UnsupportedError):
        A_constant_quadrature(5, 1.5, 10)
    with pytest.raises(UnsupportedError):
        hardy_integral_quadrature(3, 0.5, QuadratureSpec(folding=False))
    with pytest.raises(DomainError):
        A_constant_quadrature(3.5, 0.5, 10)
    with pytest.raises(DomainError):
        A_constant_quadrature(3, 0.5, 2.0)


def test_quadrature_budget_exhaustion_reports_estimate():
    with pytest.raises(ConvergenceError) as info:
        hardy_integral_quadrature(4, 0.5, QuadratureSpec(rel_tol=1e-13, max_subdivisions=5))
    assert info.value.estimate is not None and math.isfinite(info.value.estimate)
    with pytest.raises(ConvergenceError):
        hardy_integral_quadrature(4, 0.5, QuadratureSpec(max_subdivisions=2))

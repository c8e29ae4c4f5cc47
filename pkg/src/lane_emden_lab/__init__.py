"""Numerics for supercritical coupled Lane-Emden systems (-Delta)^s u_i = |u|^(p-1) u_i."""

from .errors import ConvergenceError, DomainError, LabError, RadialSolveError, UnsupportedError
from .params import ProblemParams
from .gamma_core import (
    PowerLawMultiplierQuery,
    gamma,
    hardy_constant,
    kappa_s,
    log_gamma,
    power_law_multiplier,
    sphere_area,
)
from .exponents import (
    PhaseDiagram,
    Regime,
    RegimeTag,
    classify,
    fractional_condition,
    jl_exponent,
    jl_exponent_closed_form,
    jl_exponent_root,
    phase_diagram,
    sobolev_exponent,
    stability_margin,
)
from .singular import (
    GrowthKind,
    SingularSolution,
    growth_exponent,
    growth_integral,
    is_singular_stable,
    make_singular,
    residual_local,
)
from .quadrature import QuadratureSpec
from .radial import (
    RadialSolution,
    ShootingConfig,
    blow_down,
    ode_residual,
    sample,
    sample_singular,
    solve_radial,
)
from .energy import (
    E2Breakdown,
    EnergyCurve,
    energy_E1,
    energy_E1_derivative_identity,
    energy_E2,
    energy_E2_breakdown,
    energy_E2_derivative_bound,
    energy_scan,
    growth_slope,
    scale_invariance_check,
)
from .angular import (
    CutoffSpec,
    RampProfile,
    angular_coefficients,
    c2_survey,
    constant_solution_check,
    probe_closed_form,
    singular_instability_probe,
    stability_pair,
    stability_triple,
)
from .fractional import (
    KernelQuery,
    A_constant_quadrature,
    hardy_integral_quadrature,
    kernel_K,
    kernel_monotonicity_gap,
)

__version__ = "0.1.0"

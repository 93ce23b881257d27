"""Numerical toolkit for third-order psi-Laplacian boundary value problems
and their Lyapunov-type inequality certificates."""

from .equation import (
    Coefficient,
    Nonlinearity,
    Sandwich,
    SystemState,
    constant_coefficient,
    custom_nonlinearity,
    polynomial_coefficient,
    q_split,
    sampled_coefficient,
    signed_power_nonlinearity,
    system_derivative,
    trig_poly_coefficient,
)
from .integrate import SolverConfig, Trajectory, integrate_ivp
from .lyapunov import (
    InequalityReport,
    ZeroCountResult,
    is_balanced,
    lhs_bc1,
    max_location_feasible,
    min_sup_norm,
    phi_weight,
    threshold,
    verify_abs,
    verify_bc1,
    verify_bc2,
    zero_count_bound,
)
from .oscillation import (
    HolderRecord,
    ZeroGapReport,
    build_zero_gap_report,
    gap_series,
    holder_gap_check,
    window_norm,
    zero_sequence,
)
from .psi import (
    PsiFunction,
    PsiPropertyReport,
    check_jensen,
    check_reciprocal_convex,
    check_submultiplicative,
    check_supermultiplicative,
    custom_psi,
    eval_inverse,
    power_psi,
)
from .quadrature import QuadValue, integrate_open, integrate_weighted
from .shooting import (
    SolutionBC1,
    SolutionBC2,
    locate_xi,
    refine_zero,
    shoot,
    solve_bc1,
    solve_bc2,
)

__version__ = "0.1.0"

__all__ = [
    "Coefficient", "Nonlinearity", "Sandwich", "SystemState",
    "constant_coefficient", "custom_nonlinearity", "polynomial_coefficient",
    "q_split", "sampled_coefficient", "signed_power_nonlinearity",
    "system_derivative", "trig_poly_coefficient",
    "SolverConfig", "Trajectory", "integrate_ivp",
    "InequalityReport", "ZeroCountResult", "is_balanced", "lhs_bc1",
    "max_location_feasible", "min_sup_norm", "phi_weight", "threshold",
    "verify_abs", "verify_bc1", "verify_bc2", "zero_count_bound",
    "HolderRecord", "ZeroGapReport", "build_zero_gap_report", "gap_series",
    "holder_gap_check", "window_norm", "zero_sequence",
    "PsiFunction", "PsiPropertyReport", "check_jensen",
    "check_reciprocal_convex", "check_submultiplicative",
    "check_supermultiplicative", "custom_psi", "eval_inverse", "power_psi",
    "QuadValue", "integrate_open", "integrate_weighted",
    "SolutionBC1", "SolutionBC2", "locate_xi", "refine_zero", "shoot",
    "solve_bc1", "solve_bc2",
]

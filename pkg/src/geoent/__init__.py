"""Geometric measure of entanglement for phase-parameterized symmetric three-qubit states.

    psi = g|000> + t(|011> + |101> + |110>) + exp(i gamma) h|111>

The maximal product-state overlap P_max is computed in closed form at
gamma = 0 and pi/2, from a quartic in the Lagrange multiplier at pi/4,
and by multi-start Newton for any other phase. Two brute-force oracles
check all of it.
"""
__version__ = "0.1.0"

from .analytic import (
    PmaxResult, criteria, eigenvalues_gamma0, eigenvalues_gamma_half, pmax_gamma0, pmax_gamma_half,
)
from .general_gamma import (
    GammaSolveReport, QuarticPoly, pmax_general, quartic_coefficients, stationary_points_numeric,
    stationary_points_quarter,
)
from .oracle import (
    OracleResult, ProductTriple, alternating_maximize, grid_maximize_symmetric, overlap,
)
from .qstate import (
    DegenerateStateError, SymmetricState, UVPoint, from_params, from_uv, named_state,
    state_vector, to_uv,
)
from .stationarity import (
    lambda_zero_branch, nearest_product_lambda_zero, reduced_correlations, stationarity_residual,
)
from .sweep import DomainMap, SweepRecord, boundary_trace, domain_map, run_sweep

__all__ = [
    "DegenerateStateError", "DomainMap", "GammaSolveReport", "OracleResult", "PmaxResult",
    "ProductTriple", "QuarticPoly", "SweepRecord", "SymmetricState", "UVPoint",
    "alternating_maximize", "boundary_trace", "criteria", "domain_map", "eigenvalues_gamma0",
    "eigenvalues_gamma_half", "from_params", "from_uv", "grid_maximize_symmetric",
    "lambda_zero_branch", "named_state", "nearest_product_lambda_zero", "overlap",
    "pmax_gamma0", "pmax_gamma_half", "pmax_general", "quartic_coefficients",
    "reduced_correlations", "run_sweep", "stationarity_residual", "stationary_points_numeric",
    "stationary_points_quarter", "state_vector", "to_uv",
]

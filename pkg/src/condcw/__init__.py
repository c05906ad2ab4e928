"""Conditional Curie-Weiss model: limiting magnetization, critical couplings,
phase classification, and finite-N oracles."""

from condcw.errors import (
    AmbiguityError,
    ConvergenceError,
    DomainError,
    ParameterError,
    SizeError,
)
from condcw.model import (
    FiniteModel,
    MinimizerSet,
    ModelParams,
    SectorMagnetization,
    free_energy,
    free_energy_curvature,
    free_energy_deriv,
    hamiltonian_per_site,
    magnetization_from_z,
    self_consistency_residual,
)
from condcw.solver import (
    MagnetizationLimits,
    directional_limits,
    minimize_free_energy,
    solve_self_consistency,
    specific_magnetization,
    spontaneous_z,
)
from condcw.phase import (
    Region,
    Regime,
    TransitionReport,
    beta_double_star,
    beta_star,
    classify_region,
    classify_transition,
    jump_magnitude,
)
from condcw.exactn import (
    ConditionalTable,
    ExactResult,
    convergence_study,
    enumerate_conditional_measure,
    exact_moments,
)
from condcw.mcsim import ChainConfig, McEstimate, run_chain, transition_matrix_check

__version__ = "0.1.0"

__all__ = [
    "AmbiguityError",
    "ChainConfig",
    "ConditionalTable",
    "ConvergenceError",
    "DomainError",
    "ExactResult",
    "FiniteModel",
    "MagnetizationLimits",
    "McEstimate",
    "MinimizerSet",
    "ModelParams",
    "ParameterError",
    "Regime",
    "Region",
    "SectorMagnetization",
    "SizeError",
    "TransitionReport",
    "beta_double_star",
    "beta_star",
    "classify_region",
    "classify_transition",
    "convergence_study",
    "directional_limits",
    "enumerate_conditional_measure",
    "exact_moments",
    "free_energy",
    "free_energy_curvature",
    "free_energy_deriv",
    "hamiltonian_per_site",
    "jump_magnitude",
    "magnetization_from_z",
    "minimize_free_energy",
    "run_chain",
    "self_consistency_residual",
    "solve_self_consistency",
    "specific_magnetization",
    "spontaneous_z",
    "transition_matrix_check",
]

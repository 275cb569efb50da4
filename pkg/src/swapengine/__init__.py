"""Exact work and heat statistics of two-qudit partial-swap Otto engines."""
from .engine import (
    ConventionWarning,
    EngineParams,
    MomentSet,
    Regime,
    RegimeWarning,
    carnot_efficiency,
    classify_regime,
    cop,
    curzon_ahlborn_efficiency,
    entropy_production,
    mean_heat_cold,
    mean_heat_hot,
    mean_occupation,
    mean_occupation_inverse,
    mean_work,
    occupation_gap,
    otto_efficiency,
    partition_function,
)
from .spectral import (
    WorkHeatDistribution,
    characteristic_function,
    joint_distribution,
    moment_set,
    moments_from_chi,
    second_moment_work,
    snr_identity_rhs,
    verify_detailed_ft,
)
from .tpm import (
    EmpiricalStats,
    enumerate_joint,
    sample,
    transition_probability,
)
from .analysis import (
    efficiency_at_max_work,
    efficiency_bound_check,
    strongest_violation,
    tur_bound_check,
    ultimate_snr_limit,
)
from .finite_time import (
    FiniteTimeParams,
    optimal_power,
    power,
    steady_moments,
    steady_state,
)

__version__ = "0.1.0"

__all__ = [
    "ConventionWarning",
    "EmpiricalStats",
    "EngineParams",
    "FiniteTimeParams",
    "MomentSet",
    "Regime",
    "RegimeWarning",
    "WorkHeatDistribution",
    "__version__",
    "carnot_efficiency",
    "characteristic_function",
    "classify_regime",
    "cop",
    "curzon_ahlborn_efficiency",
    "efficiency_at_max_work",
    "efficiency_bound_check",
    "entropy_production",
    "enumerate_joint",
    "joint_distribution",
    "mean_heat_cold",
    "mean_heat_hot",
    "mean_occupation",
    "mean_occupation_inverse",
    "mean_work",
    "moment_set",
    "moments_from_chi",
    "occupation_gap",
    "optimal_power",
    "otto_efficiency",
    "partition_function",
    "power",
    "sample",
    "second_moment_work",
    "snr_identity_rhs",
    "steady_moments",
    "steady_state",
    "strongest_violation",
    "transition_probability",
    "tur_bound_check",
    "ultimate_snr_limit",
    "verify_detailed_ft",
]

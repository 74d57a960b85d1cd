"""Yield analysis for three-donor CTAP devices made by single-ion implantation."""

from .errors import (
    CTAPError,
    ConfigError,
    DegenerateError,
    DomainError,
    IntegrationError,
    LowStatisticsWarning,
    SRIMFormatError,
)
from .physics import (
    HBAR_MEV_NS,
    DonorTriple,
    MaterialParams,
    Position3D,
    pair_distances,
    to_angular,
    tunnel_coupling,
)
from .ctap import (
    PulseSchedule,
    PulseShape,
    TripleMetrics,
    adiabaticity_analytic,
    adiabaticity_numeric,
    bright_energies,
    dark_state,
    metrics_from_distances,
    omega12,
    omega23,
    tmax_for_adiabaticity,
)
from .propagator import EvolutionResult, evolve, fidelity_vs_adiabaticity_sweep
from .implant import (
    EmpiricalSource,
    ImplantStrategy,
    ParametricSource,
    StraggleSample,
    builtin_strategies,
    parse_srim_range3d,
    sample_positions,
    sample_triple,
)
from .yields import YieldReport, empirical_cdf, evaluate_population

__version__ = "0.1.0"

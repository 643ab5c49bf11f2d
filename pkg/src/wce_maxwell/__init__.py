"""Chaos-expansion and Monte Carlo solvers for noise-driven Maxwell systems."""

from .chaos import (
    BasisSpec,
    MultiIndex,
    TruncationSet,
    basis_m,
    basis_m_antiderivative,
    enumerate_truncation,
    evaluate_wick_polynomial,
    hermite,
    wick_G,
)
from .config import ConfigError, ExperimentConfig, emit_config, parse_config
from .harness import RunReport, run_experiment, write_outputs
from .models import FieldState, GridSpec, ModelVariant, TimeGrid, get_model
from .moments import (
    EnergySeries,
    MomentField,
    averaged_energy,
    discrete_energy,
    energy_reference,
    gaussian_moment_oracle,
    higher_moments,
    mean_field,
    relative_error_frobenius,
    second_moment,
    validate_coefficient_energy,
    wce_moment_field,
)
from .montecarlo import mc_run, wiener_from_spectral, wiener_increments
from .propagator import (
    WceSolution,
    forcing_terms,
    initial_condition,
    solve_coefficient,
    solve_propagator,
    spatial_rhs,
    step_explicit,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

"""Simulation, fitting and variability analysis for interface-type
(Schottky-barrier) memristor compact models."""

__version__ = "0.1.0"

from .model import (
    LegacyMimParams,
    ModelParameters,
    PhysicalSchottkyParams,
    SimmonsParams,
    hrs_current,
    instantaneous_current,
    legacy_mim_current,
    lrs_current,
    motion_window,
    schottky_reference_current,
    simmons_reference_current,
    state_derivative,
    threshold_rate,
)
from .waveform import SampledWaveform, SweepSpec, sample, standard_sweep
from .simulate import IVTrace, SimulationConfig, convergence_check, simulate
from .dataio import (
    GaussianParamSet,
    MeasurementSet,
    bundled_areas,
    load_all_bundled,
    load_bundled,
    load_measurements,
    load_params,
    load_trace,
    save_params,
    save_trace,
)
from .fitting import (
    FitConfig,
    FitResult,
    default_bounds,
    default_initial_parameters,
    fit_single,
    format_gaussian_table,
    mae,
    mpe,
    two_step_fit,
)
from .variation import (
    SensitivityReport,
    combined_averages,
    ensemble,
    rank_parameters,
    sample_parameters,
    sensitivity_search,
    trend_check,
)

__all__ = [
    "__version__",
    "ModelParameters", "PhysicalSchottkyParams", "SimmonsParams", "LegacyMimParams",
    "lrs_current", "hrs_current", "instantaneous_current", "threshold_rate",
    "motion_window", "state_derivative", "schottky_reference_current",
    "simmons_reference_current", "legacy_mim_current",
    "SweepSpec", "SampledWaveform", "standard_sweep", "sample",
    "SimulationConfig", "IVTrace", "simulate", "convergence_check",
    "GaussianParamSet", "MeasurementSet", "load_params", "save_params",
    "load_trace", "save_trace", "load_measurements",
    "bundled_areas", "load_bundled", "load_all_bundled",
    "FitConfig", "FitResult", "mae", "mpe", "fit_single", "two_step_fit",
    "default_initial_parameters", "default_bounds", "format_gaussian_table",
    "SensitivityReport", "sample_parameters", "ensemble",
    "sensitivity_search", "trend_check", "combined_averages", "rank_parameters",
]

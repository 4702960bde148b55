"""Pulse-width-modulation toolkit for quantum control.

Approximate continuous control fields by bang-bang pulse trains, propagate
the resulting dynamics with cached-eigenbasis steps (including higher-order
compositions), optimize pulses by exact-gradient descent, and compare the
analytic cost of the schemes.
"""

from .costmodel import (
    GammaGrid,
    boundary_order,
    cost_pwc,
    cost_pwm,
    gamma,
    gamma_grid,
)
from .grape import (
    BenchmarkReport,
    BenchmarkRow,
    GrapeOptions,
    GrapeProblem,
    GrapeResult,
    OptimizationError,
    gradient,
    infidelity,
    objective,
    optimize,
    optimize_pwc,
    random_initial_widths,
    run_fig5_benchmark,
    ten_level_problem,
)
from .model import (
    ControlSystem,
    SystemValidation,
    basis_state,
    build_ten_level_system,
    validate_system,
)
from .propagate import (
    ErrorOrderFit,
    HamiltonianCache,
    PulseFrame,
    TermCache,
    build_frame,
    error_order,
    evolve,
    expm_hermitian,
    frame_from_widths,
    pwm_step_factors,
    reference_propagator,
    step_pwc,
    step_pwm,
    step_pwm_higher,
    step_spo,
    suzuki_coefficient,
)
from .pwm import (
    AmplitudeBoundError,
    CutoffError,
    GridError,
    PWMSequence,
    SampledField,
    Spectrum,
    default_amplitudes,
    dominant_peaks,
    gaussian_train,
    inverse_pwm_pwc,
    lowpass_reconstruct,
    pulse_count_for_cutoff,
    pwm_approximate,
    pwm_signal,
    spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeBoundError",
    "BenchmarkReport",
    "BenchmarkRow",
    "ControlSystem",
    "CutoffError",
    "ErrorOrderFit",
    "GammaGrid",
    "GrapeOptions",
    "GrapeProblem",
    "GrapeResult",
    "GridError",
    "HamiltonianCache",
    "OptimizationError",
    "PWMSequence",
    "PulseFrame",
    "SampledField",
    "Spectrum",
    "SystemValidation",
    "TermCache",
    "basis_state",
    "boundary_order",
    "build_frame",
    "build_ten_level_system",
    "cost_pwc",
    "cost_pwm",
    "default_amplitudes",
    "dominant_peaks",
    "error_order",
    "evolve",
    "expm_hermitian",
    "frame_from_widths",
    "gamma",
    "gamma_grid",
    "gaussian_train",
    "gradient",
    "infidelity",
    "inverse_pwm_pwc",
    "lowpass_reconstruct",
    "objective",
    "optimize",
    "optimize_pwc",
    "pulse_count_for_cutoff",
    "pwm_approximate",
    "pwm_signal",
    "pwm_step_factors",
    "random_initial_widths",
    "reference_propagator",
    "run_fig5_benchmark",
    "spectrum",
    "step_pwc",
    "step_pwm",
    "step_pwm_higher",
    "step_spo",
    "suzuki_coefficient",
    "ten_level_problem",
    "validate_system",
]

"""incoupler — 1D simulator of a Raman atom-laser incoupler.

A condensate-pumped Raman process converts a moving atomic beam into an
optical probe field; because the conversion is linear in the field
operators, the quantum statistics of the beam (quadrature squeezing,
intensity correlations) are written onto the light. The package evolves the
coupled mode-function pairs, reads out quadrature variances and g2
correlations, estimates spontaneous-scattering degradation, and ships
ready-made pulsed/continuous/control scenarios behind a CLI.
"""

from .errors import ConfigurationError, DivergenceError, IncouplerError
from .grid import (
    ComplexField,
    SpatialGrid,
    absorbing_mask,
    inner_product,
    spectral_first_derivative,
    spectral_second_derivative,
)
from .params import (
    DerivedQuantities,
    ModelParams,
    PhysicalConstants,
    RunConfig,
    coupling_profile,
    derive,
    load_config_file,
)
from .states import (
    FieldState,
    InputMoments,
    ModeFunction,
    condensate_ground_state,
    make_continuous_initial_state,
    make_pulsed_initial_state,
    make_squeezed_input_moments,
    squeezing_db_to_r,
)
from .evolve import (
    FluxLedger,
    Propagator,
    RunResult,
    StepConfig,
    quasi_static_probe,
    run,
)
from .observables import (
    NumberTallies,
    QuadratureResult,
    StreamReadout,
    aligned_quadrature,
    g2_correlation,
    g2_profile,
    mode_coefficients,
    number_tallies,
    quadrature_variance,
)
from .losses import (
    LossEstimate,
    apply_beam_splitter_loss,
    illumination_window,
    scattering_rate,
    spontaneous_loss,
)
from .scenarios import SCENARIOS, RunSummary, ScenarioResult, effective_config, run_scenario

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "IncouplerError",
    "ConfigurationError",
    "DivergenceError",
    # grid
    "SpatialGrid",
    "ComplexField",
    "inner_product",
    "spectral_first_derivative",
    "spectral_second_derivative",
    "absorbing_mask",
    # params
    "PhysicalConstants",
    "ModelParams",
    "DerivedQuantities",
    "derive",
    "coupling_profile",
    "RunConfig",
    "load_config_file",
    # states
    "InputMoments",
    "ModeFunction",
    "FieldState",
    "squeezing_db_to_r",
    "make_squeezed_input_moments",
    "condensate_ground_state",
    "make_pulsed_initial_state",
    "make_continuous_initial_state",
    # evolve
    "StepConfig",
    "FluxLedger",
    "RunResult",
    "Propagator",
    "quasi_static_probe",
    "run",
    # observables
    "QuadratureResult",
    "NumberTallies",
    "mode_coefficients",
    "quadrature_variance",
    "aligned_quadrature",
    "g2_correlation",
    "g2_profile",
    "number_tallies",
    "StreamReadout",
    # losses
    "LossEstimate",
    "illumination_window",
    "scattering_rate",
    "spontaneous_loss",
    "apply_beam_splitter_loss",
    # scenarios
    "SCENARIOS",
    "RunSummary",
    "ScenarioResult",
    "effective_config",
    "run_scenario",
]

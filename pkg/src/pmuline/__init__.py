"""pmuline: three-phase transmission-line parameter estimation from
two-terminal synchronized phasor (PMU) measurements.

The package bundles a pi-model simulator, three estimators (a one-sample
and a two-sample positive-sequence method, and a full-matrix linear
least-squares method recovering the complete 3x3 series-impedance and
shunt-susceptance matrices), residual-based bad-data screening, and Monte
Carlo experiment drivers.
"""

__version__ = "0.1.0"

from .core import (
    LineParameters,
    SampleRecord,
    SequenceParameters,
    degree_of_unbalance,
    pack_theta,
    phase_to_sequence,
    recover_line_parameters,
    sequence_to_phase,
    sequence_transform,
    unpack_theta,
)
from .estimators import (
    DesignSystem,
    PositiveSequenceEstimate,
    build_design_system,
    compensate_mutual,
    estimate_double,
    estimate_optimal,
    estimate_single,
)
from .simulator import (
    LoadProfile,
    NoiseSpec,
    add_noise,
    add_noise_series,
    calibrate_unbalance,
    generate_series,
    scale_length,
    solve_terminal_currents,
)
from .baddata import ScreeningReport, scaled_residuals, screen_and_estimate
from .experiments import (
    SweepConfig,
    SweepResult,
    export_sweep,
    run_length_sweep,
    run_method_comparison,
)
from .fixtures import transposed_reference_line, untransposed_reference_line

__all__ = [
    "__version__",
    "LineParameters",
    "SampleRecord",
    "SequenceParameters",
    "degree_of_unbalance",
    "pack_theta",
    "unpack_theta",
    "phase_to_sequence",
    "sequence_to_phase",
    "sequence_transform",
    "recover_line_parameters",
    "DesignSystem",
    "PositiveSequenceEstimate",
    "build_design_system",
    "compensate_mutual",
    "estimate_single",
    "estimate_double",
    "estimate_optimal",
    "LoadProfile",
    "NoiseSpec",
    "add_noise",
    "add_noise_series",
    "calibrate_unbalance",
    "generate_series",
    "scale_length",
    "solve_terminal_currents",
    "ScreeningReport",
    "scaled_residuals",
    "screen_and_estimate",
    "SweepConfig",
    "SweepResult",
    "export_sweep",
    "run_length_sweep",
    "run_method_comparison",
    "transposed_reference_line",
    "untransposed_reference_line",
]

"""Constant-envelope OFDM waveform design with GISL sidelobe shaping."""

from .waveform import (
    TWO_PI,
    BasisMatrices,
    SampledWaveform,
    WaveformConfig,
    build_basis,
    compute_modulation_index,
    lfm_equivalent_tbp,
    random_psk,
    sample_frequency,
    sample_phase,
    synthesize,
)
from .metrics import (
    MAG_FLOOR,
    AmbiguitySurface,
    CorrelationResult,
    GislWeights,
    build_weights,
    compute_acf,
    compute_af,
    compute_gisl,
    compute_isl,
    compute_pslr,
    db,
    detect_mainlobe_null,
    weights_are_symmetric,
)
from .gradient import GradientWorkspace, build_dbar, gisl_gradient
from .optimizer import (
    ArmijoResult,
    LineSearchStall,
    OptimizationTrace,
    OptimizerConfig,
    TraceRow,
    armijo_backtrack,
    heavy_ball_direction,
    run_gd_gisl,
)
from .quantize import (
    QuantizationReport,
    QuantizationRow,
    degradation_sweep,
    quantize_psk,
    wrap_to_pi,
)

__version__ = "0.1.0"

__all__ = [
    "TWO_PI",
    "MAG_FLOOR",
    "WaveformConfig",
    "BasisMatrices",
    "SampledWaveform",
    "CorrelationResult",
    "GislWeights",
    "AmbiguitySurface",
    "OptimizerConfig",
    "OptimizationTrace",
    "TraceRow",
    "ArmijoResult",
    "LineSearchStall",
    "GradientWorkspace",
    "QuantizationReport",
    "QuantizationRow",
    "compute_modulation_index",
    "lfm_equivalent_tbp",
    "build_basis",
    "sample_phase",
    "sample_frequency",
    "synthesize",
    "random_psk",
    "compute_acf",
    "compute_af",
    "detect_mainlobe_null",
    "build_weights",
    "weights_are_symmetric",
    "compute_gisl",
    "compute_isl",
    "compute_pslr",
    "db",
    "build_dbar",
    "gisl_gradient",
    "heavy_ball_direction",
    "armijo_backtrack",
    "run_gd_gisl",
    "quantize_psk",
    "wrap_to_pi",
    "degradation_sweep",
]

"""anisotex: simulation and estimation of 2-D anisotropic self-similar textures.

Synthesizes operator scaling Gaussian random fields from their spectral
representation and measures their anisotropic critical exponents; the
exponent, scanned over analysis anisotropies, peaks at the field's own
anisotropy with peak value equal to the self-similarity index.
"""

from .besov import (
    DegenerateDirectionError,
    DirectionalExponent,
    ExponentScan,
    StructureFunction,
    average_structure_functions,
    critical_exponent,
    default_lags,
    directional_exponent,
    scan_anisotropy,
    snap_direction,
    structure_function,
    tent_prediction,
)
from .core import (
    Anisotropy,
    AnisotropyError,
    FieldSpec,
    SampledField,
    anisotropy_violations,
    matrix_power,
    validate_anisotropy,
)
from .homog import (
    HomogeneityReport,
    HomogeneousFunction,
    IntegrabilityReport,
    check_homogeneity,
    check_integrability,
    evaluate,
    register_rho_kind,
    rho_power_sum,
)
from .hywave import (
    FILTERS,
    HyperbolicPyramid,
    RatioScan,
    ScaleStats,
    coefficient_energy,
    hyperbolic_transform,
    inverse_hyperbolic_transform,
    pooled_scale_statistics,
    ratio_maximize,
    scale_statistics,
)
from .synth import (
    ScalingCheckResult,
    SpectralGrid,
    evaluate_at_points,
    monte_carlo_scaling_check,
    spectral_coefficients,
    spectral_grid,
    synthesize,
    synthesize_ensemble,
    variogram_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "Anisotropy", "AnisotropyError", "FieldSpec", "SampledField",
    "anisotropy_violations", "matrix_power", "validate_anisotropy",
    "HomogeneousFunction", "HomogeneityReport", "IntegrabilityReport",
    "check_homogeneity", "check_integrability", "evaluate",
    "register_rho_kind", "rho_power_sum",
    "SpectralGrid", "ScalingCheckResult", "spectral_grid",
    "spectral_coefficients", "synthesize", "synthesize_ensemble",
    "evaluate_at_points", "variogram_oracle", "monte_carlo_scaling_check",
    "StructureFunction", "DirectionalExponent", "ExponentScan",
    "DegenerateDirectionError", "structure_function", "directional_exponent",
    "average_structure_functions", "critical_exponent", "tent_prediction",
    "scan_anisotropy", "snap_direction", "default_lags",
    "FILTERS", "HyperbolicPyramid", "ScaleStats", "RatioScan",
    "hyperbolic_transform", "inverse_hyperbolic_transform",
    "coefficient_energy", "scale_statistics", "pooled_scale_statistics",
    "ratio_maximize",
]

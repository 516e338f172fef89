"""Spiked-covariance PCA with shrinkage-adjusted prediction scores.

Matrices are p x n with one column per sample.
"""

from ._spca import (
    ComponentEstimate,
    DegenerateVariable,
    DimensionError,
    DomainError,
    Error,
    FittedPcModel,
    FormatError,
    InputError,
    JackknifeResult,
    NotIdentifiable,
    NumericalFailure,
    ParseError,
    PredictionScores,
    RescaledSpectrum,
    adjustment_factor,
    eigenvector_angle,
    fit,
    jackknife_shrinkage,
    load_model,
    mp_edges,
    mp_integral,
    phase_threshold,
    predict,
    rescale_eigenvalues,
    rho,
    rho_inverse,
    sample_eigenvalues,
    save_model,
    score_angle,
    shrinkage_factor,
    spike_detection_edge,
    standardize,
    training_scores,
)

__all__ = [name for name in dir() if not name.startswith("_")]

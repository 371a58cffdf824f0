"""Multilevel Bouligand-Minkowski fractal texture descriptors."""

from ._core import (
    ConfigError,
    DataError,
    DilationCurve,
    Error,
    LdaModel,
    ResourceLimitError,
    achievable_distances,
    bm_descriptors,
    build_efv,
    confusion_stats,
    decompose,
    dilation_curve,
    dilation_curve_oracle,
    estimate_fd,
    estimate_fd_points,
    evaluate,
    fit_lda,
    generate_synthetic,
    load_grayscale,
    rank_features,
    save_pgm,
    scan_dataset,
    select_mld,
    shannon_entropy,
    stratified_holdout,
    synth_texture,
    tile_fixed,
)

__all__ = [name for name in dir() if not name.startswith("_")]

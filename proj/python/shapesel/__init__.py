"""Shapelet-guided selective forecasting."""

from ._shapesel import (
    ShapeselError,
    compute_threshold,
    default_motif,
    discard_by_distance,
    drop_count,
    filter_high_error,
    generate_planted,
    learn_dictionary,
    load_series,
    random_selection,
    run_pipeline,
    selective_mse,
    sliding_min_distance,
    znorm,
    znorm_ed,
)

__all__ = [
    "ShapeselError",
    "compute_threshold",
    "default_motif",
    "discard_by_distance",
    "drop_count",
    "filter_high_error",
    "generate_planted",
    "learn_dictionary",
    "load_series",
    "random_selection",
    "run_pipeline",
    "selective_mse",
    "sliding_min_distance",
    "znorm",
    "znorm_ed",
]

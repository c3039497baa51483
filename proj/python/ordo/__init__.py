"""Deterministic corpus ordering and scaling-law toolkit."""

from ._ordo import (
    Error,
    boundary_profile,
    cl_order,
    continuity_stats,
    cross_order,
    cycle_coverage,
    export_permutation,
    fit_data_scaling,
    fit_model_scaling,
    fit_scaling,
    fold_order,
    huber,
    import_permutation,
    jitter,
    load_scored_jsonl,
    local_diversity,
    predict_loss,
    r_squared_data,
    r_squared_model,
    random_order,
    rank_by_score,
    reorder_jsonl,
    seg_order,
    select_top_k,
    trajectory,
    validate_permutation,
    zigzag_order,
)

__all__ = [
    "Error",
    "boundary_profile",
    "cl_order",
    "continuity_stats",
    "cross_order",
    "cycle_coverage",
    "export_permutation",
    "fit_data_scaling",
    "fit_model_scaling",
    "fit_scaling",
    "fold_order",
    "huber",
    "import_permutation",
    "jitter",
    "load_scored_jsonl",
    "local_diversity",
    "predict_loss",
    "r_squared_data",
    "r_squared_model",
    "random_order",
    "rank_by_score",
    "reorder_jsonl",
    "seg_order",
    "select_top_k",
    "trajectory",
    "validate_permutation",
    "zigzag_order",
]

__version__ = "0.1.0"

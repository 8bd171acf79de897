"""Gaze-guided activity recognition and action anticipation."""

from ._core_loader import (
    action_iou,
    assign_per_frame,
    build_graph,
    execute_program,
    generate_dataset,
    ivt_filter,
    norm_levenshtein,
    train_and_evaluate,
)

__all__ = [
    "action_iou",
    "assign_per_frame",
    "build_graph",
    "execute_program",
    "generate_dataset",
    "ivt_filter",
    "norm_levenshtein",
    "train_and_evaluate",
]

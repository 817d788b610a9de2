"""Leather defect classification toolkit.

Edge-feature network and modified AlexNet pipelines, data preparation, metrics and a
synthetic leather generator. The heavy lifting lives in the C++ extension `_hidescan`.
"""

from ._hidescan import (
    HidescanError,
    accuracy,
    alexnet_shapes,
    ann_features,
    ann_parameter_count,
    block_frequency_features,
    brightness_category,
    canny,
    confusion,
    format_accuracy,
    kfold_split,
    read_image,
    render_synthetic,
    resize,
    roc,
    run_cli,
    split_60_5_35,
    split_sizes,
    to_grayscale,
    write_image,
)

__all__ = [
    "HidescanError",
    "accuracy",
    "alexnet_shapes",
    "ann_features",
    "ann_parameter_count",
    "block_frequency_features",
    "brightness_category",
    "canny",
    "confusion",
    "format_accuracy",
    "kfold_split",
    "read_image",
    "render_synthetic",
    "resize",
    "roc",
    "run_cli",
    "split_60_5_35",
    "split_sizes",
    "to_grayscale",
    "write_image",
]

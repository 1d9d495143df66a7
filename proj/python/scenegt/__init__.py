"""Trace-free multi-sensor semantic scene ground truth."""

from ._scenegt import (
    NUM_CLASSES,
    FormatError,
    Grid,
    GridSpec,
    IoError,
    PreconditionError,
    RangeError,
    Scene,
    UndefinedMetricError,
    class_names,
    evaluate,
    free_samples,
    generate_world,
    mean_iou,
    read_grid,
    trace_rate,
    write_grid,
)

__all__ = [
    "NUM_CLASSES",
    "FormatError",
    "Grid",
    "GridSpec",
    "IoError",
    "PreconditionError",
    "RangeError",
    "Scene",
    "UndefinedMetricError",
    "class_names",
    "evaluate",
    "free_samples",
    "generate_world",
    "mean_iou",
    "read_grid",
    "trace_rate",
    "write_grid",
]

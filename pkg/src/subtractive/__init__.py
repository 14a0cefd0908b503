"""Exact and Monte Carlo experiments with homogeneous subtractive continued-fraction maps."""

__version__ = "0.1.0"

from .exact_core import (  # noqa: E402
    MapParams,
    classify,
    project_to_B,
    project_to_simplex,
    s_map_step,
    step,
    subtractive_step,
    unordered_step3,
)

__all__ = [
    "MapParams",
    "classify",
    "project_to_B",
    "project_to_simplex",
    "s_map_step",
    "step",
    "subtractive_step",
    "unordered_step3",
]

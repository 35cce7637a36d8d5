"""Tensor-train estimation-of-distribution optimizer."""

from ._core import (
    ConfigError,
    DegenerateElite,
    DegenerateModel,
    IntegrationAccuracy,
    InvalidArgument,
    RunSpec,
    TensorTrain,
    benchmark,
    cmd_run,
    elite_logscore_gradient,
    known_problems,
    logz_gradient,
    optimize,
    optimize_function,
    run_toy,
    sample,
    sweep_update,
)

__all__ = [
    "ConfigError",
    "DegenerateElite",
    "DegenerateModel",
    "IntegrationAccuracy",
    "InvalidArgument",
    "RunSpec",
    "TensorTrain",
    "benchmark",
    "cmd_run",
    "elite_logscore_gradient",
    "known_problems",
    "logz_gradient",
    "optimize",
    "optimize_function",
    "run_toy",
    "sample",
    "sweep_update",
]

"""Sparse reconstruction with multiple side informations and adaptive weights."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    InvariantError,
    PowerIteration,
    ProblemInstance,
    SolverConfig,
    SolverResult,
    Termination,
    TrialReport,
    Variant,
    WeightState,
    objective_value,
)
from .solver import solve, solve_trace  # noqa: E402

__all__ = [
    "InvariantError",
    "PowerIteration",
    "ProblemInstance",
    "SolverConfig",
    "SolverResult",
    "Termination",
    "TrialReport",
    "Variant",
    "WeightState",
    "objective_value",
    "solve",
    "solve_trace",
]

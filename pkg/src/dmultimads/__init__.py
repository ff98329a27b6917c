"""Constrained multiobjective direct search with four constraint-handling variants."""

from .core import BlackboxIOError, ConfigurationError, Evaluation, ProblemSpec
from .solver import RunResult, SolverConfig, solve

__all__ = ["BlackboxIOError", "ConfigurationError", "Evaluation", "ProblemSpec",
           "RunResult", "SolverConfig", "solve"]

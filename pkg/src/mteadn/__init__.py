"""Decomposition-based multiobjective multitasking with dual neighborhoods."""
from .algorithm import AlgorithmConfig, preset, run, run_moead_baseline
from .core import RunRecord
from .problems import build_builtin_suite, load_builtin

__version__ = "0.1.0"

__all__ = [
    "AlgorithmConfig",
    "RunRecord",
    "build_builtin_suite",
    "load_builtin",
    "preset",
    "run",
    "run_moead_baseline",
]

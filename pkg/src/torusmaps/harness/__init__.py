"""Experiments, verification suites and the command line."""

from .experiments import ExperimentConfig, emit_rescaled_processes, run_diameter_scaling, run_label_gap, run_stats
from .metrics import StatRow, diameter, label_gap
from .upsilon import estimate_upsilon

__all__ = [
    "ExperimentConfig",
    "StatRow",
    "diameter",
    "emit_rescaled_processes",
    "estimate_upsilon",
    "label_gap",
    "run_diameter_scaling",
    "run_label_gap",
    "run_stats",
]

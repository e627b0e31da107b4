"""
relkd - Relation modeling and relation-graph distillation for noisy labels.

Usage:
    from relkd import RelkdRunner

    runner = RelkdRunner.from_config("relkd.yaml")
    rows = runner.run_experiment()
"""

from relkd.models import Dataset, ExperimentConfig, ResultRow, TrainHistory
from relkd.runner import RelkdRunner

__all__ = [
    "RelkdRunner",
    "Dataset",
    "ExperimentConfig",
    "ResultRow",
    "TrainHistory",
]

__version__ = "0.1.0"

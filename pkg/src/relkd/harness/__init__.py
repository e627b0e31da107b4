"""
Experiment harness: metrics, result files, embedding dumps and reports.

The orchestrator lives in relkd.runner and the CLI in relkd.harness.cli.
"""

from relkd.harness.embeddings import dump_embeddings, embedding_frame, read_embeddings
from relkd.harness.metrics import accuracy, collapse_threshold, confusion_matrix, representation_metrics
from relkd.harness.report import k_pivot, noise_grid, report
from relkd.harness.results import read_history, read_results, write_history, write_results

__all__ = [
    "accuracy",
    "confusion_matrix",
    "representation_metrics",
    "collapse_threshold",
    "dump_embeddings",
    "embedding_frame",
    "read_embeddings",
    "write_results",
    "read_results",
    "write_history",
    "read_history",
    "noise_grid",
    "k_pivot",
    "report",
]

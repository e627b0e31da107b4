"""
Relation graphs (Pearson edges) and relation-graph distillation losses.
"""

from relkd.relation.distill import RmdOut, edge_loss, node_loss, rmdnet_loss
from relkd.relation.pearson import edge_matrix, node_matrix, pearson_edge, standardize_rows

__all__ = [
    "pearson_edge",
    "standardize_rows",
    "edge_matrix",
    "node_matrix",
    "edge_loss",
    "node_loss",
    "rmdnet_loss",
    "RmdOut",
]

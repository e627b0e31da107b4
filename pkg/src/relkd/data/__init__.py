"""
Datasets, label-noise injection and augmentation views.
"""

from relkd.data.augment import augment_views
from relkd.data.csv_dataset import CsvSchema, load_csv
from relkd.data.idx_dataset import load_idx
from relkd.data.noise import CIFAR10_ASYMMETRIC, build_transition, cifar100_asymmetric_map, inject_noise
from relkd.data.synthetic import blob_centers, make_blobs

__all__ = [
    "make_blobs",
    "blob_centers",
    "CsvSchema",
    "load_csv",
    "load_idx",
    "build_transition",
    "inject_noise",
    "CIFAR10_ASYMMETRIC",
    "cifar100_asymmetric_map",
    "augment_views",
]

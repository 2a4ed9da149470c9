"""Flatten cluster-tree moments into the fixed-length electrostatic
feature vector.

Ordering is deterministic: ascending tree level; within a level, clusters
follow the octant path code accumulated from the root (bit 0 = x-high,
bit 1 = y-high, bit 2 = z-high); within a cluster, multi-indices are in
graded lexicographic order.  Empty clusters contribute zeros, so vectors
from different proteins always share the same layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .octree import ClusterTree, n_terms

ORDERING_VERSION = "level-octant-gradedlex-v1"


def feature_count(p: int, L: int) -> int:
    """N_f(p, L) = N_p * (8^(L+1) - 1) / 7 with N_p = (p+1)(p+2)(p+3)/6."""
    if p < 0:
        raise ValueError(f"expansion order must be >= 0, got {p}")
    if L < 0:
        raise ValueError(f"tree depth must be >= 0, got {L}")
    return n_terms(p) * (8 ** (L + 1) - 1) // 7


@dataclass(frozen=True)
class ElectroFeatureVector:
    values: np.ndarray  # (feature_count(p, L),)
    p: int
    L: int
    ordering_version: str = ORDERING_VERSION

    def __len__(self) -> int:
        return int(self.values.size)


def extract_features(tree: ClusterTree) -> ElectroFeatureVector:
    """Concatenate every cluster's moments in the canonical order."""
    parts = [
        cluster.moments for level in tree.level_clusters for cluster in level
    ]
    values = np.concatenate(parts)
    expected = feature_count(tree.expansion_order, tree.levels)
    if values.size != expected:
        raise AssertionError(
            f"feature vector has {values.size} entries, expected {expected}"
        )
    return ElectroFeatureVector(
        values=values, p=tree.expansion_order, L=tree.levels
    )

"""Label-sorted, partially shuffled data partitioning.

The shuffle fraction controls how decentralized the split is: 0 gives each
worker a contiguous block of the label-sorted order (maximally non-iid),
100 gives a uniformly shuffled split.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import ObjectiveError

__all__ = ["PartitionSpec", "partition"]


@dataclass(frozen=True)
class PartitionSpec:
    """Shuffle fraction in percent, RNG seed, and worker count."""

    shuffle_fraction: float
    seed: int
    n: int


def partition(labels: np.ndarray, spec: PartitionSpec) -> list[np.ndarray]:
    """Split point indices across workers, label-sorted then partially shuffled.

    Sorts indices by label (stable), shuffles the first
    floor(shuffle_fraction% of N) entries with the seeded RNG, and splits the
    result contiguously into n near-equal shards (sizes differ by at most 1).
    """
    if not 0.0 <= spec.shuffle_fraction <= 100.0:
        raise ObjectiveError(
            f"shuffle fraction must be in [0, 100], got {spec.shuffle_fraction}"
        )
    labels = np.asarray(labels)
    n_points = len(labels)
    if spec.n > n_points:
        raise ObjectiveError(f"{spec.n} workers but only {n_points} points")
    order = np.argsort(labels, kind="stable")
    k = int(np.floor(spec.shuffle_fraction / 100.0 * n_points))
    if k > 1:
        rng = np.random.default_rng(spec.seed)
        head = order[:k].copy()
        rng.shuffle(head)
        order = np.concatenate([head, order[k:]])
    return [shard.copy() for shard in np.array_split(order, spec.n)]

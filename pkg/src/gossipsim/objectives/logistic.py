"""L2-regularized logistic regression over partitioned data.

Includes a built-in two-class Gaussian generator and a CSV loader (header
row, feature columns, final ``label`` column). The stochastic oracle samples
a minibatch uniformly with replacement from the worker's shard; a batch of
None (or 0) returns the exact shard gradient.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .base import Objective, ObjectiveError

__all__ = ["LogisticObjective", "make_logistic", "make_two_class_gaussian", "load_csv"]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


class LogisticObjective(Objective):
    def __init__(
        self,
        features: np.ndarray,
        labels: np.ndarray,
        shards: list[np.ndarray],
        reg: float,
        batch: int | None,
    ):
        self.n = len(shards)
        self.dim = features.shape[1]
        self.features = features
        self.labels = labels.astype(float)
        self.shards = [np.asarray(s, dtype=int) for s in shards]
        if any(len(s) == 0 for s in self.shards):
            raise ObjectiveError("empty shard; too many workers for this dataset")
        self.reg = float(reg)
        self.batch = batch if batch else None
        self.sigma = None

    def _point_grads(self, idx: np.ndarray, x: np.ndarray) -> np.ndarray:
        z = self.features[idx] @ x
        return self.features[idx] * (_sigmoid(z) - self.labels[idx])[:, None]

    def worker_loss(self, i: int, x: np.ndarray) -> float:
        idx = self.shards[i]
        z = self.features[idx] @ x
        ce = np.logaddexp(0.0, z) - self.labels[idx] * z
        return float(ce.mean()) + 0.5 * self.reg * float(x @ x)

    def worker_grad(self, i: int, x: np.ndarray) -> np.ndarray:
        idx = self.shards[i]
        return self._point_grads(idx, x).mean(axis=0) + self.reg * x

    def oracle(self, i: int, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if self.batch is None:
            return self.worker_grad(i, x)
        shard = self.shards[i]
        picks = shard[rng.integers(0, len(shard), size=self.batch)]
        return self._point_grads(picks, x).mean(axis=0) + self.reg * x


def make_logistic(
    features: np.ndarray,
    labels: np.ndarray,
    shards: list[np.ndarray],
    reg: float = 0.0,
    batch: int | None = 1,
) -> LogisticObjective:
    """Cross-entropy losses over per-worker shards with minibatch oracles."""
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels)
    if not np.all(np.isfinite(features)):
        raise ObjectiveError("features must be finite")
    uniq = set(np.unique(labels).tolist())
    if not uniq <= {0, 1, 0.0, 1.0}:
        raise ObjectiveError(f"labels must be binary 0/1, got {sorted(uniq)}")
    return LogisticObjective(features, labels, shards, reg, batch)


def make_two_class_gaussian(
    n_points: int, d: int, separation: float = 2.0, seed: int = 0, scale0: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Two spherical Gaussian blobs of equal size, means +-separation/2 apart.

    ``scale0`` stretches the class-0 features; values above 1 give the two
    classes different curvature, so label-sorted splits produce workers whose
    losses genuinely disagree (not just shifted copies).
    """
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=d)
    direction /= np.linalg.norm(direction)
    half = n_points // 2
    sizes = [half, n_points - half]
    feats, labs = [], []
    for cls, size in enumerate(sizes):
        center = (cls - 0.5) * separation * direction
        blob = rng.normal(size=(size, d)) + center
        if cls == 0:
            blob = blob * scale0
        feats.append(blob)
        labs.append(np.full(size, cls))
    return np.concatenate(feats), np.concatenate(labs)


def load_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a dataset CSV: header row, feature columns, final ``label`` column."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip().split(",")
    if not header or header[-1] != "label":
        raise ObjectiveError(f"{path}: last CSV column must be named 'label'")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, :-1], data[:, -1].astype(int)

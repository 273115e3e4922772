"""Synthetic least-squares ensembles with a heterogeneity dial.

Worker losses are f_i(x) = ||A_i x - b_i||^2 / (2 m). The offsets b_i are
solved so that the gradients at the origin have exactly the requested
dispersion, realizing the heterogeneity-at-zero bound as a constructor knob.
"""

from __future__ import annotations

import numpy as np

from .base import Objective, ObjectiveError

__all__ = ["QuadraticObjective", "make_quadratics"]


class QuadraticObjective(Objective):
    def __init__(self, mats: list[np.ndarray], offsets: list[np.ndarray], sigma: float):
        self.n = len(mats)
        self.dim = mats[0].shape[1]
        self.m = mats[0].shape[0]
        self.mats = mats
        self.offsets = offsets
        self.sigma = float(sigma)
        hessians = [a.T @ a / self.m for a in mats]
        self.smoothness = max(float(np.linalg.eigvalsh(h)[-1]) for h in hessians)
        mean_h = sum(hessians) / self.n
        mean_lin = sum(a.T @ b / self.m for a, b in zip(mats, offsets)) / self.n
        x_star = np.linalg.solve(mean_h, mean_lin)
        self.delta = self.loss(np.zeros(self.dim)) - self.loss(x_star)

    def worker_loss(self, i: int, x: np.ndarray) -> float:
        r = self.mats[i] @ x - self.offsets[i]
        return float(r @ r) / (2.0 * self.m)

    def worker_grad(self, i: int, x: np.ndarray) -> np.ndarray:
        return self.mats[i].T @ (self.mats[i] @ x - self.offsets[i]) / self.m

    def oracle(self, i: int, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        g = self.worker_grad(i, x)
        if self.sigma == 0.0:
            return g
        return g + self.sigma * rng.normal(size=self.dim) / np.sqrt(self.dim)


def make_quadratics(
    n: int,
    d: int,
    vs0_sq: float,
    sigma: float,
    seed: int,
    rows: int | None = None,
    design: str = "shared",
) -> QuadraticObjective:
    """Build n random least-squares losses with gradient dispersion vs0_sq at zero.

    ``vs0_sq`` is the target value of the mean squared deviation of the
    worker gradients from their mean at the origin. The stochastic oracle
    adds spherical noise with per-query variance sigma^2.

    ``design`` picks the data matrices: "shared" gives every worker the same
    A (so the dispersion is constant in x and a zero target means identical
    offsets), "independent" draws per-worker matrices, whose differing
    curvatures make consensus errors feed back into the mean trajectory.
    """
    if d < 1:
        raise ObjectiveError(f"need dimension >= 1, got {d}")
    if vs0_sq < 0.0 or sigma < 0.0:
        raise ObjectiveError("vs0_sq and sigma must be nonnegative")
    if design not in ("shared", "independent"):
        raise ObjectiveError(f"unknown design {design!r}")
    m = rows or 2 * d
    if m < d:
        raise ObjectiveError(f"need at least d={d} rows per worker, got {m}")
    rng = np.random.default_rng(seed)
    if design == "shared":
        shared = rng.normal(size=(m, d))
        mats = [shared] * n
    else:
        mats = [rng.normal(size=(m, d)) for _ in range(n)]
    common = rng.normal(size=d)
    common /= np.linalg.norm(common)  # keeps the optimum away from the origin
    if vs0_sq == 0.0:
        spread = np.zeros((n, d))
    else:
        spread = rng.normal(size=(n, d))
        spread -= spread.mean(axis=0)
        spread /= np.sqrt((spread**2).sum(axis=1).mean())
        spread *= np.sqrt(vs0_sq)
    # choose b_i so that grad f_i(0) = -A_i^T b_i / m equals common + spread_i exactly
    offsets = [
        a @ np.linalg.solve(a.T @ a, -m * (common + s)) for a, s in zip(mats, spread)
    ]
    return QuadraticObjective(mats, offsets, sigma)

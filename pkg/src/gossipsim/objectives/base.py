"""Objective interface, oracle RNG streams and heterogeneity measurement.

Every stochastic oracle call takes an explicit numpy Generator, so a run is a
pure function of (model, stream). Streams are derived counter-style from
(run seed, worker id, iteration) via Philox, making results independent of
the order in which workers are evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Objective", "ObjectiveError", "HeterogeneityStats", "measure_heterogeneity", "oracle_stream"]


class ObjectiveError(ValueError):
    """Raised for invalid objective parameters."""


_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
# construction-time SeedSequence is cached because its state is overwritten
_TEMPLATE_SEED = np.random.SeedSequence(0)


def _splitmix64(z: int) -> int:
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def oracle_stream(seed: int, worker: int, iteration: int) -> np.random.Generator:
    """Deterministic counter-style stream per (run seed, worker, iteration).

    The triple is folded into a 128-bit Philox key with splitmix64, so every
    stream is independent of evaluation order and cheap to construct.
    """
    a = _splitmix64(int(seed) & _MASK64)
    b = _splitmix64(a ^ ((int(worker) & _MASK64) * _GOLDEN & _MASK64))
    c = _splitmix64(b ^ ((int(iteration) & _MASK64) * _GOLDEN & _MASK64))
    bitgen = np.random.Philox(seed=_TEMPLATE_SEED)
    bitgen.state = {
        "bit_generator": "Philox",
        "state": {
            "counter": np.zeros(4, np.uint64),
            "key": np.array([c, _splitmix64(c)], np.uint64),
        },
        "buffer": np.zeros(4, np.uint64),
        "buffer_pos": 4,
        "has_uint32": 0,
        "uinteger": 0,
    }
    return np.random.Generator(bitgen)


class Objective:
    """Ensemble of n per-worker losses with exact gradients and stochastic oracles.

    Subclasses implement ``worker_loss``, ``worker_grad`` and ``oracle``.
    The global loss is the mean of the worker losses. ``sigma`` bounds the
    per-query oracle noise (sqrt of the variance cap); None if unknown.
    """

    n: int
    dim: int
    sigma: float | None = None
    smoothness: float | None = None
    delta: float | None = None

    def worker_loss(self, i: int, x: np.ndarray) -> float:
        raise NotImplementedError

    def worker_grad(self, i: int, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def oracle(self, i: int, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Unbiased stochastic estimate of the worker gradient."""
        return self.worker_grad(i, x)

    def loss(self, x: np.ndarray) -> float:
        return sum(self.worker_loss(i, x) for i in range(self.n)) / self.n

    def grad(self, x: np.ndarray) -> np.ndarray:
        g = np.zeros(self.dim)
        for i in range(self.n):
            g += self.worker_grad(i, x)
        return g / self.n


@dataclass(frozen=True)
class HeterogeneityStats:
    """Worker-to-worker gradient dispersion.

    ``varsigma0_sq`` is exact at the origin; ``varsigma_sq_estimate`` is the
    max over probe points, a sampled lower bound on the global supremum.
    """

    varsigma0_sq: float
    varsigma_sq_estimate: float


def _dispersion(obj: Objective, x: np.ndarray) -> float:
    grads = np.stack([obj.worker_grad(i, x) for i in range(obj.n)])
    mean = grads.mean(axis=0)
    return float(((grads - mean) ** 2).sum(axis=1).mean())


def measure_heterogeneity(obj: Objective, probes: list[np.ndarray] | None = None) -> HeterogeneityStats:
    """Gradient dispersion at the origin and its sampled max over probe points.

    The origin is always included in the probe set, so the estimate never
    falls below the exact value at zero.
    """
    zero = np.zeros(obj.dim)
    at_zero = _dispersion(obj, zero)
    worst = at_zero
    for p in probes or []:
        worst = max(worst, _dispersion(obj, np.asarray(p, dtype=float)))
    return HeterogeneityStats(varsigma0_sq=at_zero, varsigma_sq_estimate=worst)

"""The bulk-synchronous engine and the five optimizers.

All algorithms act on worker models stacked as columns of a d x n array and
advance in lockstep: iteration t+1 reads only iteration-t state. Oracle
randomness comes from per-(seed, worker, iteration) streams, so traces are
bit-reproducible and independent of evaluation order.

Update rules (W doubly stochastic, G_t the stochastic gradients at X_t):

* dpsgd      X_{t+1} = X_t W - a G_t
* d2         X_{t+1} = (2 X_t - X_{t-1} - a G_t + a G_{t-1}) W,
             first step X_1 = (X_0 - a G_0) W
* dsgt       Y_t = Y_{t-1} W + G_t - G_{t-1} (Y_0 = G_0),
             X_{t+1} = X_t W - a Y_t
* defacto    phases of 2R iterations: R gradient accumulations at the frozen
             phase model, then the R exact consensus-plan factors on the
             replica; phase end applies the buffer mean
* detag      phases of R iterations: each runs one accelerated-gossip step on
             the replica and the tracker plus a gradient accumulation at the
             frozen phase model; the phase end folds the buffer difference
             into the tracker and steps the model with the updated tracker.
             Buffers enter the tracker as phase means (the accumulated sum
             over R iterations divided by R), so a phase acts as one update
             with an R-times-larger minibatch and the step size keeps its
             meaning across phase lengths.

With R=1 and zero momentum, detag and dsgt produce identical traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mixing import ConsensusPlan, MixingMatrix, ag_momentum
from .objectives import Objective, oracle_stream
from .specstring import SpecError, split_spec
from .topology import Topology
from .trace import RunTrace, consensus_distance, grad_norm_at_mean

__all__ = [
    "AlgorithmConfig",
    "AlgorithmError",
    "ALGORITHM_KINDS",
    "parse_algorithm_spec",
    "recommend_phase_length",
    "step_dpsgd",
    "step_d2",
    "step_dsgt",
    "run",
]

ALGORITHM_KINDS = ("dpsgd", "d2", "dsgt", "defacto", "detag")


class AlgorithmError(ValueError):
    """Raised for invalid algorithm configuration."""


@dataclass(frozen=True)
class AlgorithmConfig:
    """What to run and for how long.

    ``phase_length`` is the detag phase length R (defacto derives its R from
    the consensus plan). ``eta`` of None means the Chebyshev momentum is
    derived from the mixing matrix eigenvalue. ``budget`` is the number of
    oracle queries averaged per worker per gradient iteration.
    ``phase_schedule`` optionally grows R over time: pairs (start_iter, R)
    applied at phase starts, R nondecreasing.
    """

    kind: str
    alpha: float
    phase_length: int = 1
    eta: float | None = None
    budget: int = 1
    iterations: int = 1000
    warmup: int = 0
    warmup_alpha: float | None = None
    phase_schedule: tuple[tuple[int, int], ...] | None = None
    weight_decay: float = 0.0
    momentum: float = 0.0

    def __post_init__(self):
        if self.kind not in ALGORITHM_KINDS:
            raise AlgorithmError(f"unknown algorithm kind {self.kind!r}")
        if self.alpha <= 0:
            raise AlgorithmError(f"step size must be positive, got {self.alpha}")
        if self.phase_length < 1:
            raise AlgorithmError(f"phase length must be >= 1, got {self.phase_length}")
        if self.budget < 1:
            raise AlgorithmError(f"oracle budget must be >= 1, got {self.budget}")
        if self.phase_schedule:
            lengths = [r for _, r in self.phase_schedule]
            if lengths != sorted(lengths):
                raise AlgorithmError("phase schedule must be nondecreasing")


def parse_algorithm_spec(spec: str) -> tuple[str, dict[str, str]]:
    """Split an algorithm spec string like ``detag:alpha=0.01,R=auto,eta=auto``."""
    kind, kv = split_spec(spec)
    if kind not in ALGORITHM_KINDS:
        raise SpecError(f"unknown algorithm {kind!r} (expected one of {ALGORITHM_KINDS})")
    return kind, kv


def recommend_phase_length(
    n: int, lam: float, vs0_sq: float, iterations: int, delta: float, smoothness: float
) -> int:
    """Suggested detag phase length: max(log(n)/2, log(vs0^2 T / (Delta L))/2) / sqrt(1-lam).

    Natural logarithm, rounded up, clamped to at least one.
    """
    if not 0.0 <= lam < 1.0:
        raise AlgorithmError(f"lambda must be in [0, 1), got {lam}")
    if min(n, iterations) < 1 or delta <= 0 or smoothness <= 0 or vs0_sq < 0:
        raise AlgorithmError("n, T, delta, L must be positive and vs0_sq nonnegative")
    first = 0.5 * math.log(n)
    arg = vs0_sq * iterations / (delta * smoothness)
    second = 0.5 * math.log(arg) if arg > 0 else float("-inf")
    value = max(first, second) / math.sqrt(1.0 - lam)
    return max(1, math.ceil(value))


def step_dpsgd(x: np.ndarray, w: np.ndarray, grads: np.ndarray, alpha: float) -> np.ndarray:
    """Gossip the previous models, then take local gradient steps."""
    return x @ w - alpha * grads


def step_d2(
    x: np.ndarray,
    x_prev: np.ndarray | None,
    w: np.ndarray,
    grads: np.ndarray,
    grads_prev: np.ndarray | None,
    alpha: float,
) -> np.ndarray:
    """Variance-corrected gossip step; the first iteration is a plain one."""
    if x_prev is None:
        return (x - alpha * grads) @ w
    return (2.0 * x - x_prev - alpha * grads + alpha * grads_prev) @ w


def step_dsgt(
    x: np.ndarray,
    y_prev: np.ndarray | None,
    w: np.ndarray,
    grads: np.ndarray,
    grads_prev: np.ndarray | None,
    alpha: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Gradient-tracking step; returns the new model columns and tracker."""
    y = grads if y_prev is None else y_prev @ w + grads - grads_prev
    return x @ w - alpha * y, y


_NULL_RNG = np.random.default_rng(0)  # handed to exact oracles, never consumed


class _OracleBatch:
    """Per-iteration gradient queries with budget averaging, decay and momentum."""

    def __init__(self, obj: Objective, cfg: AlgorithmConfig, seed: int):
        self.obj = obj
        self.cfg = cfg
        self.seed = seed
        self.exact = obj.sigma == 0.0  # noiseless oracles never touch their stream
        self.heavy_ball = (
            np.zeros((obj.dim, obj.n)) if cfg.momentum else None
        )

    def __call__(self, x_cols: np.ndarray, iteration: int) -> np.ndarray:
        obj, cfg = self.obj, self.cfg
        g = np.empty_like(x_cols)
        for i in range(obj.n):
            if self.exact:
                g[:, i] = obj.oracle(i, x_cols[:, i], _NULL_RNG)
                continue
            rng = oracle_stream(self.seed, i, iteration)
            acc = obj.oracle(i, x_cols[:, i], rng)
            for _ in range(cfg.budget - 1):
                acc = acc + obj.oracle(i, x_cols[:, i], rng)
            g[:, i] = acc / cfg.budget
        if cfg.weight_decay:
            g += cfg.weight_decay * x_cols
        if self.heavy_ball is not None:
            self.heavy_ball = cfg.momentum * self.heavy_ball + g
            g = self.heavy_ball
        return g


def run(
    obj: Objective,
    topo: Topology,
    mix: MixingMatrix | ConsensusPlan,
    cfg: AlgorithmConfig,
    seed: int,
    init: np.ndarray | None = None,
    record_every: int = 1,
    probe=None,
) -> RunTrace:
    """Simulate one algorithm and return its trace.

    ``mix`` must be a ConsensusPlan for defacto and a MixingMatrix otherwise.
    The output model is the worker average at the final iteration; on
    NaN/Inf the run aborts with status "diverged" and a partial trace.
    ``probe(t, state)`` is called after every iteration with a dict of the
    live engine arrays (model/tracker/buffer columns, last gradients,
    phase-end flag) for invariant checks in tests.
    """
    n, d = obj.n, obj.dim
    if topo.n != n or mix.n != n:
        raise AlgorithmError(f"size mismatch: objective n={n}, graph n={topo.n}, matrix n={mix.n}")
    if cfg.kind == "defacto" and not isinstance(mix, ConsensusPlan):
        raise AlgorithmError("defacto needs a ConsensusPlan")
    if cfg.kind != "defacto" and isinstance(mix, ConsensusPlan):
        raise AlgorithmError(f"{cfg.kind} needs a MixingMatrix, not a ConsensusPlan")

    x = np.zeros((d, n)) if init is None else np.tile(
        np.asarray(init, dtype=float).reshape(d, 1), (1, n)
    )
    query = _OracleBatch(obj, cfg, seed)
    trace = RunTrace()
    queries = 0

    y_cols: np.ndarray | None = None  # tracker columns for dsgt/detag
    buf: np.ndarray | None = None  # phase gradient buffers for defacto/detag
    buf_prev: np.ndarray | None = None

    def record(iteration: int):
        xbar = x.mean(axis=1)
        cons_y = consensus_distance(y_cols) if y_cols is not None else 0.0
        trace.append(
            iteration,
            obj.loss(xbar),
            grad_norm_at_mean(obj, x),
            consensus_distance(x),
            cons_y,
            queries,
        )

    record(0)

    if cfg.kind == "detag":
        w = mix
        eta = ag_momentum(w.lam) if cfg.eta is None else cfg.eta
        x_rep = x.copy()  # mixing replica and its Chebyshev memory
        x_rep_prev = x.copy()
        y_cols = np.zeros((d, n))
        y_prev = np.zeros((d, n))
        buf = np.zeros((d, n))
        buf_prev = np.zeros((d, n))
        phase_r = 0
        phase_len = _scheduled_length(cfg, 0)
    if cfg.kind == "defacto":
        plan = mix
        rounds = plan.length
        x_rep = x.copy()
        buf = np.zeros((d, n))

    x_prev: np.ndarray | None = None
    g_prev: np.ndarray | None = None

    for t in range(cfg.iterations):
        alpha = cfg.warmup_alpha if (t < cfg.warmup and cfg.warmup_alpha is not None) else cfg.alpha
        g = None
        phase_end = True

        if cfg.kind == "dpsgd":
            g = query(x, t)
            queries += n * cfg.budget
            x = step_dpsgd(x, mix.w, g, alpha)

        elif cfg.kind == "d2":
            g = query(x, t)
            queries += n * cfg.budget
            x, x_prev = step_d2(x, x_prev, mix.w, g, g_prev, alpha), x
            g_prev = g

        elif cfg.kind == "dsgt":
            g = query(x, t)
            queries += n * cfg.budget
            x, y_cols = step_dsgt(x, y_cols, mix.w, g, g_prev, alpha)
            g_prev = g

        elif cfg.kind == "defacto":
            r = t % (2 * rounds)
            if r < rounds:
                g = query(x, t)
                buf += g
                queries += n * cfg.budget
            else:
                x_rep = x_rep @ plan.factors[r - rounds]
            phase_end = r == 2 * rounds - 1
            if phase_end:
                x = x_rep - alpha * buf / rounds
                buf = np.zeros((d, n))
                x_rep = x.copy()

        elif cfg.kind == "detag":
            x_next = (1.0 + eta) * (x_rep @ w.w) - eta * x_rep_prev
            x_rep_prev, x_rep = x_rep, x_next
            y_next = (1.0 + eta) * (y_cols @ w.w) - eta * y_prev
            y_prev, y_cols = y_cols, y_next
            g = query(x, t)
            buf += g
            queries += n * cfg.budget
            phase_r += 1
            phase_end = phase_r == phase_len
            if phase_end:
                y_cols = y_cols + buf / phase_len - buf_prev
                x = x_rep - alpha * y_cols
                buf_prev, buf = buf / phase_len, np.zeros((d, n))
                x_rep = x.copy()
                x_rep_prev = x.copy()
                y_prev = y_cols.copy()
                phase_r = 0
                phase_len = _scheduled_length(cfg, t + 1)

        if probe is not None:
            probe(t, {
                "x": x, "y": y_cols, "grads": g, "phase_end": phase_end,
                "buf": buf, "buf_prev": buf_prev,
                "queries": queries, "alpha": alpha,
            })

        if not np.isfinite(x).all():
            trace.status = "diverged"
            break
        if (t + 1) % record_every == 0 or t + 1 == cfg.iterations:
            record(t + 1)

    trace.final_x = x.mean(axis=1)
    return trace


def _scheduled_length(cfg: AlgorithmConfig, iteration: int) -> int:
    if not cfg.phase_schedule:
        return cfg.phase_length
    length = cfg.phase_length
    for start, r in cfg.phase_schedule:
        if iteration >= start:
            length = r
    return length

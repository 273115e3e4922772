"""The zero-chain hard instance and its probabilistic gradient oracle.

The base loss couples adjacent coordinates so that one gradient evaluation
can extend the set of nonzero coordinates by at most one; while the chain is
unfinished the gradient stays bounded away from zero in the max norm. The
smooth bump is

    psi(z) = 0                        for z <= 1/2
    psi(z) = exp(1 - 1/(2z-1)^2)      for z >  1/2

and the soft step is phi(z) = sqrt(e) * integral of exp(-t^2/2) up to z,
i.e. sqrt(2*pi*e) times the Gaussian CDF (the variant with a positive
exponent in the integrand diverges, so the negative sign is the only
definition under which the bound constants below hold).

Scaled copies f(x) = coeff * base(x / scale) place the instance inside a
target smoothness/suboptimality class. The even-indexed chain links can be
assigned to one end of a graph and the odd-indexed links to the other, which
forces one end-to-end traversal per unit of chain progress.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtr

from .base import Objective, ObjectiveError
from ..topology import Topology

__all__ = [
    "DELTA0",
    "L1_SMOOTH",
    "G_INF",
    "ZeroChainInstance",
    "psi",
    "psi_prime",
    "phi",
    "phi_prime",
    "prog",
    "zerochain_value_grad",
    "bernoulli_oracle",
    "rescale_instance",
    "split_instance",
    "homogeneous_objective",
]

# Bound constants of the base chain: range of values per link, smoothness,
# and the max-norm gradient bound.
DELTA0 = 12.0
L1_SMOOTH = 152.0
G_INF = 23.0

_SQRT_E = math.sqrt(math.e)
_PHI_INF = math.sqrt(2.0 * math.pi * math.e)


def psi(z):
    """Smooth bump, zero up to 1/2."""
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    mask = z > 0.5
    with np.errstate(divide="ignore", over="ignore"):
        t = 2.0 * z[mask] - 1.0
        out[mask] = np.exp(1.0 - 1.0 / (t * t))
    return out if out.ndim else float(out)


def psi_prime(z):
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    mask = z > 0.5
    with np.errstate(divide="ignore", over="ignore"):
        t = 2.0 * z[mask] - 1.0
        out[mask] = np.exp(1.0 - 1.0 / (t * t)) * 4.0 / (t * t * t)
    return out if out.ndim else float(out)


def phi(z):
    """Soft step sqrt(2*pi*e) * NormalCDF(z); ranges from 0 to about 4.1327."""
    out = _PHI_INF * ndtr(np.asarray(z, dtype=float))
    return out if out.ndim else float(out)


def phi_prime(z):
    z = np.asarray(z, dtype=float)
    out = _SQRT_E * np.exp(-0.5 * z * z)
    return out if out.ndim else float(out)


def prog(x: np.ndarray) -> int:
    """Largest 1-based index of a nonzero coordinate; 0 for the zero vector."""
    nz = np.nonzero(np.asarray(x))[0]
    return 0 if len(nz) == 0 else int(nz[-1]) + 1


@dataclass(frozen=True)
class ZeroChainInstance:
    """A scaled zero-chain loss: f(x) = coeff * base(x / scale).

    ``chain_length`` is the number of coupled coordinates. ``delta``,
    ``smoothness`` and ``epsilon`` record the targets the scaling was built
    for (None for the raw chain).
    """

    chain_length: int
    scale: float = 1.0
    coeff: float = 1.0
    delta: float | None = None
    smoothness: float | None = None
    epsilon: float | None = None

    def __post_init__(self):
        if self.chain_length < 1:
            raise ObjectiveError(f"chain length must be >= 1, got {self.chain_length}")
        if self.scale <= 0 or self.coeff <= 0:
            raise ObjectiveError("scale and coeff must be positive")


def _base_terms(u: np.ndarray, head: bool, term_idx: np.ndarray) -> tuple[float, np.ndarray]:
    """Value and gradient of a subset of the base chain.

    ``u`` holds the chain coordinates, ``term_idx`` the 0-based indices of
    the included links (link j couples u[j] and u[j+1]), ``head`` whether the
    leading -psi(1)*phi(u[0]) term is included.
    """
    t = len(u)
    value = 0.0
    grad = np.zeros(t)
    if head:
        value -= psi(1.0) * phi(u[0])
        grad[0] -= psi(1.0) * phi_prime(u[0])
    if len(term_idx) > 0:
        j = term_idx
        lead, trail = u[j], u[j + 1]
        value += float(np.sum(psi(-lead) * phi(-trail) - psi(lead) * phi(trail)))
        np.add.at(grad, j, -psi_prime(-lead) * phi(-trail) - psi_prime(lead) * phi(trail))
        # phi_prime is even, so both signs of the trailing argument share it
        np.add.at(grad, j + 1, -(psi(-lead) + psi(lead)) * phi_prime(trail))
    return value, grad


def _check_dim(inst: ZeroChainInstance, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or len(x) < inst.chain_length:
        raise ObjectiveError(
            f"need a vector of at least {inst.chain_length} coordinates, got shape {x.shape}"
        )
    return x


def zerochain_value_grad(inst: ZeroChainInstance, x: np.ndarray) -> tuple[float, np.ndarray]:
    """Exact value and analytic gradient of the scaled chain loss."""
    x = _check_dim(inst, x)
    t = inst.chain_length
    u = x[:t] / inst.scale
    value, grad_u = _base_terms(u, head=True, term_idx=np.arange(t - 1))
    grad = np.zeros_like(x)
    grad[:t] = (inst.coeff / inst.scale) * grad_u
    return inst.coeff * value, grad


def bernoulli_oracle(
    inst: ZeroChainInstance, x: np.ndarray, p: float, rng: np.random.Generator
) -> np.ndarray:
    """Gradient with the progress coordinate revealed only with probability p.

    Coordinates at or below prog(x) are exact; every later coordinate is
    scaled by z/p with a single Bernoulli(p) draw z, which keeps the oracle
    unbiased while stalling chain progress on the z=0 draws.
    """
    if not 0.0 < p <= 1.0:
        raise ObjectiveError(f"p must be in (0, 1], got {p}")
    _, grad = zerochain_value_grad(inst, x)
    pr = prog(x)
    z = 1.0 if rng.random() < p else 0.0
    grad[pr:] *= z / p
    return grad


def rescale_instance(
    inst: ZeroChainInstance, smoothness: float, epsilon: float, variant: str
) -> ZeroChainInstance:
    """Place the chain inside the target smoothness/suboptimality class.

    ``variant`` selects the scaling used with the single-chain construction
    ("setting1": scale = 2*l1*eps/L, divisor l1) or the even/odd split
    ("setting2": scale = 6*l1*eps/L, divisor 3*l1, accounting for the
    tripled smoothness of the weighted parts). The chain length is the floor
    formula for the suboptimality budget ``inst.delta``.
    """
    if smoothness <= 0 or epsilon <= 0:
        raise ObjectiveError("smoothness and epsilon must be positive")
    if inst.delta is None:
        raise ObjectiveError("instance needs a delta target to rescale")
    if variant == "setting1":
        scale = 2.0 * L1_SMOOTH * epsilon / smoothness
        coeff = smoothness * scale * scale / L1_SMOOTH
        t = math.floor(inst.delta / (DELTA0 * L1_SMOOTH * (2.0 * epsilon) ** 2))
    elif variant == "setting2":
        scale = 6.0 * L1_SMOOTH * epsilon / smoothness
        coeff = smoothness * scale * scale / (3.0 * L1_SMOOTH)
        t = math.floor(
            inst.delta * smoothness / (DELTA0 * L1_SMOOTH * (12.0 * epsilon) ** 2)
        )
    else:
        raise ObjectiveError(f"unknown rescale variant {variant!r}")
    if t < 1:
        raise ObjectiveError(
            f"targets delta={inst.delta}, L={smoothness}, eps={epsilon} give an empty "
            f"chain (T={t}); shrink eps or grow delta"
        )
    return replace(
        inst,
        chain_length=t,
        scale=scale,
        coeff=coeff,
        smoothness=smoothness,
        epsilon=epsilon,
    )


class ZeroChainObjective(Objective):
    """Identical chain loss on every worker, optionally with the Bernoulli oracle."""

    def __init__(self, inst: ZeroChainInstance, n: int, p: float | None = None):
        if p is not None and not 0.0 < p <= 1.0:
            raise ObjectiveError(f"p must be in (0, 1], got {p}")
        self.inst = inst
        self.n = n
        self.dim = inst.chain_length
        self.p = p
        grad_bound = inst.coeff / inst.scale * G_INF
        self.sigma = 0.0 if p in (None, 1.0) else grad_bound * math.sqrt((1 - p) / p)
        self.smoothness = inst.smoothness or inst.coeff / inst.scale**2 * L1_SMOOTH
        self.delta = inst.delta

    def worker_loss(self, i: int, x: np.ndarray) -> float:
        return zerochain_value_grad(self.inst, x)[0]

    def worker_grad(self, i: int, x: np.ndarray) -> np.ndarray:
        return zerochain_value_grad(self.inst, x)[1]

    def oracle(self, i: int, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if self.p is None:
            return self.worker_grad(i, x)
        return bernoulli_oracle(self.inst, x, self.p, rng)


class SplitZeroChainObjective(Objective):
    """Even chain links on the first workers, odd links on the last workers.

    The head group holds the leading term plus the even-indexed links (scaled
    by n over the group size); the tail group holds the odd-indexed links;
    everyone in between has an identically zero loss. The worker mean equals
    the full chain loss, but progress past an even link requires information
    to cross the graph between the two groups.
    """

    def __init__(self, inst: ZeroChainInstance, n: int, group: int):
        if group < 1 or 2 * group > n:
            raise ObjectiveError(f"groups of {group} workers do not fit in n={n}")
        self.inst = inst
        self.n = n
        self.dim = inst.chain_length
        self.group = group
        self.weight = n / group
        t = inst.chain_length
        # 1-based link i couples x_i and x_{i+1}; even i to the head group
        self.head_terms = np.arange(1, t - 1, 2)  # 0-based: links 2, 4, ...
        self.tail_terms = np.arange(0, t - 1, 2)  # 0-based: links 1, 3, ...
        self.sigma = 0.0
        self.smoothness = inst.smoothness
        self.delta = inst.delta

    def _role(self, i: int) -> tuple[bool, np.ndarray] | None:
        if i < self.group:
            return True, self.head_terms
        if i >= self.n - self.group:
            return False, self.tail_terms
        return None

    def worker_loss(self, i: int, x: np.ndarray) -> float:
        role = self._role(i)
        if role is None:
            return 0.0
        head, terms = role
        u = _check_dim(self.inst, x)[: self.inst.chain_length] / self.inst.scale
        value, _ = _base_terms(u, head=head, term_idx=terms)
        return self.weight * self.inst.coeff * value

    def worker_grad(self, i: int, x: np.ndarray) -> np.ndarray:
        x = _check_dim(self.inst, x)
        grad = np.zeros_like(x)
        role = self._role(i)
        if role is None:
            return grad
        head, terms = role
        t = self.inst.chain_length
        u = x[:t] / self.inst.scale
        _, grad_u = _base_terms(u, head=head, term_idx=terms)
        grad[:t] = self.weight * (self.inst.coeff / self.inst.scale) * grad_u
        return grad

    # the worker mean telescopes back to the full chain, so global metrics
    # can skip the per-worker loop
    def loss(self, x: np.ndarray) -> float:
        return zerochain_value_grad(self.inst, x)[0]

    def grad(self, x: np.ndarray) -> np.ndarray:
        return zerochain_value_grad(self.inst, x)[1]


def homogeneous_objective(
    inst: ZeroChainInstance, n: int, p: float | None = None
) -> ZeroChainObjective:
    """Every worker holds the same chain loss; p enables the Bernoulli oracle."""
    return ZeroChainObjective(inst, n, p)


def split_instance(
    inst: ZeroChainInstance, topo: Topology, mode: str = "even_odd"
) -> SplitZeroChainObjective:
    """Distribute the chain across a graph: first/last ceil(n/3) workers."""
    if mode != "even_odd":
        raise ObjectiveError(f"unknown split mode {mode!r}")
    if topo.n < 3:
        raise ObjectiveError(f"split needs at least 3 workers, got {topo.n}")
    return SplitZeroChainObjective(inst, topo.n, group=-(-topo.n // 3))

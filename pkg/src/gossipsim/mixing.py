"""Gossip matrices and consensus machinery.

Provides Metropolis weights, slack-matrix spectral control, a power-iteration
eigenvalue estimator, the Chebyshev-accelerated gossip step, and the exact
factorized consensus plan built from a spanning tree (gather then propagate).
Matrices act on worker states stacked as columns: one communication round
maps ``X`` to ``X @ W``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .topology import Topology, bfs_tree, build_graph, center_vertex

__all__ = [
    "MixingMatrix",
    "ConsensusPlan",
    "ChebyshevState",
    "MixingError",
    "PowerIterationError",
    "metropolis",
    "average_consensus",
    "slack",
    "second_eigenvalue",
    "ag_momentum",
    "ag_step",
    "consensus_plan",
    "apply_plan_step",
    "verify_plan",
    "contraction_factor",
]


class MixingError(ValueError):
    """Raised for invalid mixing-matrix parameters."""


class PowerIterationError(RuntimeError):
    """Power iteration hit its cap with the residual above tolerance."""


@dataclass(frozen=True)
class MixingMatrix:
    """Symmetric doubly stochastic matrix supported on a graph.

    ``lam`` caches the second-largest-magnitude eigenvalue
    max(|lambda_2|, |lambda_n|), which controls gossip mixing speed.
    ``support`` is None for the unconstrained (complete / single worker) case.
    """

    w: np.ndarray
    lam: float
    support: Topology | None = None

    @property
    def n(self) -> int:
        return self.w.shape[0]

    def spectral_gap(self) -> float:
        return 1.0 - self.lam


@dataclass(frozen=True)
class ConsensusPlan:
    """Ordered factor matrices whose product is the exact averaging matrix.

    Applying the factors in order to worker columns leaves every worker
    holding the initial column mean. Factors are graph-supported but not
    doubly stochastic.
    """

    factors: tuple[np.ndarray, ...]
    support: Topology

    @property
    def length(self) -> int:
        return len(self.factors)

    @property
    def n(self) -> int:
        return self.support.n


@dataclass(frozen=True)
class ChebyshevState:
    """One step of memory for the accelerated-gossip recurrence.

    At a phase start ``z_prev == z_curr`` (fresh momentum).
    """

    z_prev: np.ndarray
    z_curr: np.ndarray
    eta: float

    @staticmethod
    def start(z0: np.ndarray, eta: float) -> "ChebyshevState":
        z = np.array(z0, dtype=float)
        return ChebyshevState(z_prev=z.copy(), z_curr=z.copy(), eta=eta)


def metropolis(g: Topology) -> MixingMatrix:
    """Metropolis weights: W[i,j] = 1/(1+max(deg i, deg j)) on edges."""
    n = g.n
    w = np.zeros((n, n))
    for i, j in g.edges:
        w[i, j] = w[j, i] = 1.0 / (1.0 + max(g.degree(i), g.degree(j)))
    np.fill_diagonal(w, 1.0 - w.sum(axis=1))
    return MixingMatrix(w=w, lam=second_eigenvalue(w), support=g)


def average_consensus(n: int) -> MixingMatrix:
    """The rank-1 exact averaging matrix with every entry 1/n."""
    if n < 1:
        raise MixingError(f"need n >= 1, got {n}")
    w = np.full((n, n), 1.0 / n)
    support = build_graph("complete", n) if n >= 2 else None
    return MixingMatrix(w=w, lam=0.0, support=support)


def slack(w0: MixingMatrix, kappa: float) -> MixingMatrix:
    """Shrink the spectral gap by mixing with the identity: kappa*W0 + (1-kappa)*I."""
    if not 0.0 < kappa <= 1.0:
        raise MixingError(f"kappa must be in (0, 1], got {kappa}")
    if kappa == 1.0:
        return w0
    w = kappa * w0.w + (1.0 - kappa) * np.eye(w0.n)
    return MixingMatrix(w=w, lam=second_eigenvalue(w), support=w0.support)


def second_eigenvalue(w: np.ndarray, tol: float = 1e-12) -> float:
    """Second-largest-magnitude eigenvalue of a symmetric doubly stochastic matrix.

    Deflates the all-ones eigenvector and power-iterates on the squared
    deflated matrix (squaring removes the sign ambiguity when lambda_2 and
    lambda_n tie in magnitude). Deterministic seeded start.
    """
    w = np.asarray(w, dtype=float)
    n = w.shape[0]
    if w.shape != (n, n):
        raise MixingError("matrix must be square")
    b = w - np.full((n, n), 1.0 / n)
    if np.linalg.norm(b, "fro") < 1e-15 or n == 1:
        return 0.0
    b2 = b @ b
    rng = np.random.default_rng(0)
    v = rng.normal(size=n)
    v /= np.linalg.norm(v)
    cap = math.ceil(100 * n * math.log(1.0 / tol))
    for _ in range(cap):
        u = b2 @ v
        theta = float(v @ u)
        if np.linalg.norm(u - theta * v) <= tol * max(1.0, abs(theta)):
            return math.sqrt(max(theta, 0.0))
        norm = np.linalg.norm(u)
        if norm < 1e-30:
            return 0.0
        v = u / norm
    residual = float(np.linalg.norm(b2 @ v - (v @ (b2 @ v)) * v))
    raise PowerIterationError(
        f"power iteration did not converge in {cap} iterations (residual {residual:.3e})"
    )


def ag_momentum(lam: float) -> float:
    """Chebyshev momentum eta = (1 - sqrt(1-lam^2)) / (1 + sqrt(1-lam^2))."""
    if not 0.0 <= lam < 1.0:
        raise MixingError(f"lambda must be in [0, 1), got {lam}")
    s = math.sqrt(1.0 - lam * lam)
    return (1.0 - s) / (1.0 + s)


def ag_step(state: ChebyshevState, w: MixingMatrix) -> ChebyshevState:
    """One accelerated-gossip step: z <- (1+eta) * z W - eta * z_prev.

    Pure function; preserves the column mean exactly because W is doubly
    stochastic and the momentum terms telescope.
    """
    if state.z_curr.shape[-1] != w.n:
        raise MixingError(
            f"state has {state.z_curr.shape[-1]} workers, matrix has {w.n}"
        )
    z_next = (1.0 + state.eta) * (state.z_curr @ w.w) - state.eta * state.z_prev
    return ChebyshevState(z_prev=state.z_curr, z_curr=z_next, eta=state.eta)


def consensus_plan(g: Topology) -> ConsensusPlan:
    """Exact consensus factorization from a BFS tree rooted at the center.

    Gather: level by level from the deepest, each vertex adds its accumulated
    value into its parent and zeroes itself. Propagate: from the root down,
    each parent keeps 1/d_u of its value and hands each child v the fraction
    d_v/d_u, where d are subtree counts. The factor product equals the exact
    averaging matrix and the plan length is twice the tree depth, at most
    twice the graph diameter. Complete graphs get the single-factor plan.
    """
    n = g.n
    if g.is_complete():
        return ConsensusPlan(factors=(np.full((n, n), 1.0 / n),), support=g)
    tree = bfs_tree(g, center_vertex(g))
    depth = tree.depth
    by_level: list[list[int]] = [[] for _ in range(depth + 1)]
    for v in range(n):
        by_level[tree.level[v]].append(v)
    factors: list[np.ndarray] = []
    for alpha in range(depth, 0, -1):
        f = np.eye(n)
        for v in by_level[alpha]:
            u = tree.parent[v]
            f[v, u] = 1.0
            f[v, v] = 0.0
        factors.append(f)
    for alpha in range(depth):
        f = np.eye(n)
        for u in by_level[alpha]:
            children = [v for v in by_level[alpha + 1] if tree.parent[v] == u]
            if not children:
                continue
            d_u = tree.subtree_count[u]
            f[u, u] = (d_u - sum(tree.subtree_count[v] for v in children)) / d_u
            for v in children:
                f[u, v] = tree.subtree_count[v] / d_u
                f[v, v] = 0.0
        factors.append(f)
    return ConsensusPlan(factors=tuple(factors), support=g)


def apply_plan_step(plan: ConsensusPlan, r: int, x: np.ndarray) -> np.ndarray:
    """Apply the r-th plan factor to worker columns."""
    if not 0 <= r < plan.length:
        raise IndexError(f"plan step {r} out of range [0, {plan.length})")
    return x @ plan.factors[r]


def verify_plan(plan: ConsensusPlan) -> float:
    """Entrywise max |product of factors - averaging matrix|."""
    n = plan.n
    prod = np.eye(n)
    for f in plan.factors:
        prod = prod @ f
    return float(np.abs(prod - np.full((n, n), 1.0 / n)).max())


def contraction_factor(lam: float, rounds: int) -> float:
    """Per-phase consensus contraction (1 - sqrt(1-lam))^R of R-step accelerated gossip."""
    if not 0.0 <= lam < 1.0:
        raise MixingError(f"lambda must be in [0, 1), got {lam}")
    if rounds < 1:
        raise MixingError(f"need at least one round, got {rounds}")
    return (1.0 - math.sqrt(1.0 - lam)) ** rounds

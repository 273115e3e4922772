"""Loss ensembles and stochastic gradient oracles."""

from .base import (
    HeterogeneityStats,
    Objective,
    ObjectiveError,
    measure_heterogeneity,
    oracle_stream,
)
from .logistic import load_csv, make_logistic, make_two_class_gaussian
from .partition import PartitionSpec, partition
from .quadratic import make_quadratics
from .spec import parse_objective_spec
from .zerochain import (
    DELTA0,
    G_INF,
    L1_SMOOTH,
    ZeroChainInstance,
    bernoulli_oracle,
    homogeneous_objective,
    phi,
    phi_prime,
    prog,
    psi,
    psi_prime,
    rescale_instance,
    split_instance,
    zerochain_value_grad,
)

__all__ = [
    "Objective",
    "ObjectiveError",
    "HeterogeneityStats",
    "measure_heterogeneity",
    "oracle_stream",
    "PartitionSpec",
    "partition",
    "make_quadratics",
    "make_logistic",
    "make_two_class_gaussian",
    "load_csv",
    "parse_objective_spec",
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

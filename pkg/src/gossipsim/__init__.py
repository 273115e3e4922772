"""gossipsim: a deterministic simulator of decentralized stochastic training.

Builds worker graphs and gossip matrices, runs decentralized SGD variants
(plain gossip, variance-corrected, gradient-tracking, exact factorized
consensus, and tracked Chebyshev-accelerated gossip), provides the
zero-chain lower-bound hard instance with its probabilistic oracle, and
ships iteration-complexity calculators plus a sweep harness with CSV output.
"""

from .algorithms import AlgorithmConfig, recommend_phase_length, run
from .bounds import (
    ComplexityParams,
    complexity_table,
    lower_bound_general,
    lower_bound_gossip,
    upper_bound_defacto,
    upper_bound_detag,
)
from .config import ExperimentConfig, parse_config, prepare_run, serialize_config
from .mixing import (
    ChebyshevState,
    ConsensusPlan,
    MixingMatrix,
    ag_momentum,
    ag_step,
    average_consensus,
    consensus_plan,
    contraction_factor,
    metropolis,
    second_eigenvalue,
    slack,
    verify_plan,
)
from .sweep import sweep
from .topology import Topology, bfs_tree, build_graph, center_vertex, parse_graph_spec
from .trace import RunTrace, consensus_distance, grad_norm_at_mean, measure_Teps

__version__ = "0.1.0"

__all__ = [
    "AlgorithmConfig",
    "ChebyshevState",
    "ComplexityParams",
    "ConsensusPlan",
    "ExperimentConfig",
    "MixingMatrix",
    "RunTrace",
    "Topology",
    "ag_momentum",
    "ag_step",
    "average_consensus",
    "bfs_tree",
    "build_graph",
    "center_vertex",
    "complexity_table",
    "consensus_distance",
    "consensus_plan",
    "contraction_factor",
    "grad_norm_at_mean",
    "lower_bound_general",
    "lower_bound_gossip",
    "measure_Teps",
    "metropolis",
    "parse_config",
    "parse_graph_spec",
    "prepare_run",
    "recommend_phase_length",
    "run",
    "second_eigenvalue",
    "serialize_config",
    "slack",
    "sweep",
    "upper_bound_defacto",
    "upper_bound_detag",
    "verify_plan",
]

"""Experiment configuration: spec strings and the INI config-file format.

A config file has an ``[experiment]`` section with the graph / matrix /
objective / algorithm specs plus seeds, iteration cap, epsilon grid and
output path, and an optional ``[sweep]`` section with a step-size grid.
``parse_config(serialize_config(cfg))`` is the identity.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, replace

from .algorithms import AlgorithmConfig, parse_algorithm_spec, recommend_phase_length
from .mixing import ConsensusPlan, MixingMatrix, consensus_plan, metropolis, slack
from .objectives import Objective, measure_heterogeneity, parse_objective_spec
from .specstring import SpecError, split_spec
from .topology import Topology, parse_graph_spec

__all__ = [
    "ExperimentConfig",
    "ConfigError",
    "parse_config",
    "serialize_config",
    "parse_matrix_spec",
    "resolve_algorithm",
    "prepare_run",
]


class ConfigError(ValueError):
    """Raised for malformed configuration files or spec strings."""


@dataclass(frozen=True)
class ExperimentConfig:
    graph: str
    objective: str
    algorithms: tuple[str, ...]
    out: str
    matrix: str = "metropolis"
    seeds: tuple[int, ...] = (0,)
    iterations: int = 1000
    eps_grid: tuple[float, ...] = ()
    alphas: tuple[float, ...] = ()
    record_every: int = 1


def parse_matrix_spec(spec: str, topo: Topology) -> MixingMatrix:
    """Build the gossip matrix: ``metropolis`` with an optional slack ``kappa``."""
    kind, kv = split_spec(spec)
    if kind != "metropolis":
        raise ConfigError(f"unknown matrix spec {kind!r} (only 'metropolis' is supported)")
    w = metropolis(topo)
    kappa = float(kv.get("kappa", 1.0))
    return slack(w, kappa)


def resolve_algorithm(
    spec: str,
    topo: Topology,
    w: MixingMatrix,
    obj: Objective,
    iterations: int,
    alpha_override: float | None = None,
) -> tuple[AlgorithmConfig, MixingMatrix | ConsensusPlan]:
    """Turn an algorithm spec string into a runnable config and its mixer.

    ``R=auto`` resolves the phase length from the matrix eigenvalue and the
    objective's measured heterogeneity; ``eta=auto`` defers the Chebyshev
    momentum to the engine. defacto swaps the gossip matrix for the exact
    consensus plan of the graph.
    """
    kind, kv = parse_algorithm_spec(spec)
    try:
        alpha = alpha_override if alpha_override is not None else float(kv["alpha"])
    except KeyError:
        raise ConfigError(f"algorithm spec {spec!r} needs alpha= (or a sweep grid)")
    phase = 1
    if kv.get("R", "1") == "auto":
        vs0_sq = measure_heterogeneity(obj).varsigma0_sq
        phase = recommend_phase_length(
            n=topo.n,
            lam=w.lam,
            vs0_sq=vs0_sq,
            iterations=iterations,
            delta=obj.delta if obj.delta else 1.0,
            smoothness=obj.smoothness if obj.smoothness else 1.0,
        )
    else:
        phase = int(kv.get("R", 1))
    eta_raw = kv.get("eta", "auto")
    eta = None if eta_raw == "auto" else float(eta_raw)
    schedule = None
    if "schedule" in kv:
        pairs = []
        for part in kv["schedule"].split(";"):
            start, _, r = part.partition(":")
            pairs.append((int(start), int(r)))
        schedule = tuple(pairs)

    mix: MixingMatrix | ConsensusPlan = w
    if kind == "defacto":
        mix = consensus_plan(topo)
        phase = mix.length
    cfg = AlgorithmConfig(
        kind=kind,
        alpha=alpha,
        phase_length=phase,
        eta=eta,
        budget=int(kv.get("B", 1)),
        iterations=iterations,
        warmup=int(kv.get("warmup", 0)),
        warmup_alpha=float(kv["warmup_alpha"]) if "warmup_alpha" in kv else None,
        phase_schedule=schedule,
        weight_decay=float(kv.get("wd", 0.0)),
        momentum=float(kv.get("momentum", 0.0)),
    )
    return cfg, mix


def prepare_run(
    graph: str, matrix: str, objective: str, algorithm: str, iterations: int,
    alpha_override: float | None = None,
) -> tuple[Topology, MixingMatrix | ConsensusPlan, Objective, AlgorithmConfig]:
    """Resolve all spec strings of one run."""
    try:
        topo = parse_graph_spec(graph)
        w = parse_matrix_spec(matrix, topo)
        obj = parse_objective_spec(objective, topo)
        cfg, mix = resolve_algorithm(algorithm, topo, w, obj, iterations, alpha_override)
    except (SpecError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return topo, mix, obj, cfg


def _fmt_floats(values) -> str:
    return ",".join(repr(float(v)) for v in values)


def _fmt_ints(values) -> str:
    return ",".join(str(int(v)) for v in values)


def serialize_config(cfg: ExperimentConfig) -> str:
    parser = configparser.ConfigParser()
    parser["experiment"] = {
        "graph": cfg.graph,
        "matrix": cfg.matrix,
        "objective": cfg.objective,
        "algorithms": "\n" + "\n".join(cfg.algorithms),
        "seeds": _fmt_ints(cfg.seeds),
        "iterations": str(cfg.iterations),
        "eps_grid": _fmt_floats(cfg.eps_grid),
        "out": cfg.out,
        "record_every": str(cfg.record_every),
    }
    if cfg.alphas:
        parser["sweep"] = {"alphas": _fmt_floats(cfg.alphas)}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
        exp = parser["experiment"]
        algorithms = tuple(
            line.strip() for line in exp["algorithms"].splitlines() if line.strip()
        )
        seeds = tuple(int(s) for s in exp.get("seeds", "0").split(",") if s.strip())
        eps_raw = exp.get("eps_grid", "")
        eps_grid = tuple(float(e) for e in eps_raw.split(",") if e.strip())
        alphas: tuple[float, ...] = ()
        if parser.has_section("sweep"):
            alphas = tuple(
                float(a) for a in parser["sweep"].get("alphas", "").split(",") if a.strip()
            )
        return ExperimentConfig(
            graph=exp["graph"],
            matrix=exp.get("matrix", "metropolis"),
            objective=exp["objective"],
            algorithms=algorithms,
            seeds=seeds,
            iterations=exp.getint("iterations", 1000),
            eps_grid=eps_grid,
            out=exp.get("out", "results"),
            record_every=exp.getint("record_every", 1),
            alphas=alphas,
        )
    except (KeyError, ValueError, configparser.Error) as exc:
        raise ConfigError(f"bad config: {exc}") from exc


def with_overrides(cfg: ExperimentConfig, **kwargs) -> ExperimentConfig:
    """Copy with CLI flag overrides applied (None values are ignored)."""
    updates = {k: v for k, v in kwargs.items() if v is not None}
    return replace(cfg, **updates)

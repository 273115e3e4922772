"""Command-line client for the simulator service.

Subcommands map one-to-one onto the service endpoints. By default requests
are dispatched in-process (no server needed); pass ``--server URL`` to send
the same payloads to a running instance over HTTP.

Exit codes: 0 success, 2 configuration error, 3 diverged run.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import service
from .bounds import BoundsError
from .config import ConfigError, parse_config, with_overrides, serialize_config
from .objectives import ObjectiveError
from .specstring import SpecError
from .topology import TopologyError

__all__ = ["main", "build_parser"]

_CONFIG_ERRORS = (ConfigError, SpecError, TopologyError, ObjectiveError, BoundsError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gossipsim", description="decentralized training simulator"
    )
    parser.add_argument("--server", default=None, help="dispatch via HTTP to this base URL")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment and write its trace CSV")
    p_run.add_argument("--config", default=None, help="INI config supplying defaults")
    p_run.add_argument("--graph", default=None)
    p_run.add_argument("--matrix", default=None)
    p_run.add_argument("--objective", default=None)
    p_run.add_argument("--algorithm", default=None)
    p_run.add_argument("--iterations", type=int, default=None)
    p_run.add_argument("--eps", type=float, nargs="*", default=None, help="epsilon grid")
    p_run.add_argument("--record-every", type=int, default=None)
    p_run.add_argument("--seed", type=int, required=True)
    p_run.add_argument("--out", required=True, help="trace CSV path")

    p_sweep = sub.add_parser("sweep", help="run a config grid and write summary CSVs")
    p_sweep.add_argument("--config", required=True, help="INI experiment config")
    p_sweep.add_argument("--seed", type=int, nargs="*", default=None, help="override seeds")
    p_sweep.add_argument("--out", required=True, help="output directory")

    p_spec = sub.add_parser("spectral", help="matrix diagnostics for a graph")
    p_spec.add_argument("--graph", required=True)
    p_spec.add_argument("--kappa", type=float, default=1.0)
    p_spec.add_argument("--rounds", type=int, default=1)

    p_fact = sub.add_parser("factorize", help="exact consensus plan for a graph")
    p_fact.add_argument("--graph", required=True)
    p_fact.add_argument("--dump", action="store_true", help="print the factor matrices")

    p_bounds = sub.add_parser("bounds", help="complexity calculators and comparison table")
    p_bounds.add_argument("--delta", type=float, default=1.0)
    p_bounds.add_argument("--L", type=float, default=1.0, dest="smoothness")
    p_bounds.add_argument("--sigma2", type=float, default=0.0)
    p_bounds.add_argument("--n", type=int, default=1)
    p_bounds.add_argument("--B", type=int, default=1, dest="budget")
    p_bounds.add_argument("--D", type=int, default=1, dest="diam")
    p_bounds.add_argument("--lam", type=float, default=0.0)
    p_bounds.add_argument("--eps", type=float, default=0.1)
    p_bounds.add_argument("--vs02", type=float, default=0.0)
    p_bounds.add_argument("--vs2", type=float, default=0.0)
    return parser


def _dispatch(server: str | None, endpoint: str, handler, request):
    """Call the service handler in-process, or POST the payload to a server."""
    if server is None:
        return handler(request)
    import httpx

    response = httpx.post(
        server.rstrip("/") + endpoint, json=request.model_dump(), timeout=600.0
    )
    if response.status_code == 422:
        raise ConfigError(response.json().get("detail", response.text))
    response.raise_for_status()
    return response.json()


def _field(resp, name):
    return resp[name] if isinstance(resp, dict) else getattr(resp, name)


def _cmd_run(args) -> int:
    base = {
        "graph": None, "matrix": None, "objective": None, "algorithm": None,
        "iterations": None, "eps": None, "record_every": None,
    }
    if args.config:
        cfg = parse_config(Path(args.config).read_text())
        base.update(
            graph=cfg.graph, matrix=cfg.matrix, objective=cfg.objective,
            algorithm=cfg.algorithms[0], iterations=cfg.iterations,
            eps=list(cfg.eps_grid), record_every=cfg.record_every,
        )
    for key in base:
        flag = getattr(args, key)
        if flag is not None:
            base[key] = flag
    missing = [k for k in ("graph", "objective", "algorithm") if base[k] is None]
    if missing:
        raise ConfigError(f"missing required fields: {', '.join(missing)} (flag or --config)")
    req = service.RunRequest(
        graph=base["graph"],
        matrix=base["matrix"] or "metropolis",
        objective=base["objective"],
        algorithm=base["algorithm"],
        seed=args.seed,
        iterations=base["iterations"] or 1000,
        eps_grid=base["eps"] or [],
        record_every=base["record_every"] or 1,
        out=args.out,
    )
    resp = _dispatch(args.server, "/run", service.run_experiment, req)
    status = _field(resp, "status")
    print(f"status: {status}")
    print(f"iterations: {_field(resp, 'iterations')}  queries: {_field(resp, 'queries')}")
    print(f"final loss: {_field(resp, 'final_loss'):.6g}")
    print(f"final grad norm: {_field(resp, 'final_grad_norm'):.6g}")
    for eps, hit in (_field(resp, "t_eps") or {}).items():
        print(f"T_eps[{eps}]: {hit if hit is not None else 'not reached'}")
    print(f"trace: {_field(resp, 'trace_path')}")
    return 3 if status == "diverged" else 0


def _cmd_sweep(args) -> int:
    cfg = parse_config(Path(args.config).read_text())
    cfg = with_overrides(
        cfg,
        out=args.out,
        seeds=tuple(args.seed) if args.seed else None,
    )
    req = service.SweepRequest(config_text=serialize_config(cfg), out=args.out)
    resp = _dispatch(args.server, "/sweep", service.run_sweep, req)
    runs = _field(resp, "runs")
    for r in runs:
        best = "*" if _field(r, "best") else " "
        print(
            f"{best} {_field(r, 'algorithm')} alpha={_field(r, 'alpha')} "
            f"seed={_field(r, 'seed')} status={_field(r, 'status')} "
            f"final_grad_norm={_field(r, 'final_grad_norm'):.6g}"
        )
    print(f"summary: {_field(resp, 'summary_path')}")
    print(f"means: {_field(resp, 'mean_path')}")
    all_diverged = runs and all(_field(r, "status") == "diverged" for r in runs)
    return 3 if all_diverged else 0


def _cmd_spectral(args) -> int:
    req = service.SpectralRequest(graph=args.graph, kappa=args.kappa, rounds=args.rounds)
    resp = _dispatch(args.server, "/spectral", service.spectral, req)
    print(f"n: {_field(resp, 'n')}")
    print(f"diameter: {_field(resp, 'diameter')}")
    print(f"lambda: {_field(resp, 'lam')!r}")
    print(f"spectral gap: {_field(resp, 'spectral_gap')!r}")
    print(f"eta: {_field(resp, 'eta')!r}")
    print(f"rho(lambda, R={args.rounds}): {_field(resp, 'rho')!r}")
    return 0


def _cmd_factorize(args) -> int:
    req = service.FactorizeRequest(graph=args.graph, dump_factors=args.dump)
    resp = _dispatch(args.server, "/factorize", service.factorize, req)
    print(f"n: {_field(resp, 'n')}  diameter: {_field(resp, 'diameter')}")
    print(f"plan length: {_field(resp, 'length')}")
    print(f"max error: {_field(resp, 'max_error')!r}")
    factors = _field(resp, "factors")
    if factors:
        for idx, factor in enumerate(factors):
            print(f"factor {idx}:")
            for row in factor:
                print("  " + " ".join(f"{v:.6g}" for v in row))
    return 0


def _cmd_bounds(args) -> int:
    req = service.BoundsRequest(
        delta=args.delta, smoothness=args.smoothness, sigma_sq=args.sigma2,
        n=args.n, budget=args.budget, diam=args.diam, lam=args.lam,
        eps=args.eps, vs0_sq=args.vs02, vs_sq=args.vs2,
    )
    resp = _dispatch(args.server, "/bounds", service.bounds_report, req)
    print(f"lower bound (any protocol): {_field(resp, 'lower_general'):.6g}")
    print(f"lower bound (gossip):       {_field(resp, 'lower_gossip'):.6g}")
    print(f"upper bound defacto:        {_field(resp, 'upper_defacto'):.6g}")
    print(f"upper bound detag:          {_field(resp, 'upper_detag'):.6g}")
    print("algorithm        sample_term   comm_term     gap (order constant = 1)")
    for row in _field(resp, "table"):
        print(
            f"{_field(row, 'algorithm'):<16} {_field(row, 'sample_term'):<13.6g} "
            f"{_field(row, 'comm_term'):<13.6g} {_field(row, 'gap_formula')}"
        )
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "spectral": _cmd_spectral,
    "factorize": _cmd_factorize,
    "bounds": _cmd_bounds,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

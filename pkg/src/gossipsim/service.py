"""FastAPI service wrapping the simulator.

Endpoints mirror the CLI subcommands: spectral diagnostics, consensus-plan
factorization, complexity calculators, single runs and sweeps. Handlers are
plain functions over pydantic models, so the CLI can call them in-process
without a running server while remote clients POST the same payloads.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .algorithms import run
from .bounds import (
    BoundsError,
    ComplexityParams,
    complexity_table,
    lower_bound_general,
    lower_bound_gossip,
    upper_bound_defacto,
    upper_bound_detag,
)
from .config import ConfigError, ExperimentConfig, parse_config, prepare_run
from .mixing import ag_momentum, consensus_plan, contraction_factor
from .objectives import ObjectiveError
from .specstring import SpecError
from .sweep import sweep
from .topology import TopologyError, format_adjacency, parse_graph_spec
from .trace import measure_Teps, trace_to_csv, write_trace_csv

__all__ = [
    "app",
    "create_app",
    "SpectralRequest",
    "SpectralResponse",
    "FactorizeRequest",
    "FactorizeResponse",
    "BoundsRequest",
    "BoundsResponse",
    "RunRequest",
    "RunResponse",
    "SweepRequest",
    "SweepResponse",
    "spectral",
    "factorize",
    "bounds_report",
    "run_experiment",
    "run_sweep",
]

_USER_ERRORS = (ConfigError, SpecError, TopologyError, ObjectiveError, BoundsError, ValueError)


class SpectralRequest(BaseModel):
    graph: str = Field(description="graph spec, e.g. ring:16")
    kappa: float = 1.0
    rounds: int = Field(default=1, ge=1, description="R for the contraction factor")


class SpectralResponse(BaseModel):
    n: int
    diameter: int
    lam: float
    spectral_gap: float
    eta: float
    rho: float
    adjacency: str


class FactorizeRequest(BaseModel):
    graph: str
    dump_factors: bool = False


class FactorizeResponse(BaseModel):
    n: int
    diameter: int
    length: int
    max_error: float
    factors: list[list[list[float]]] | None = None


class BoundsRequest(BaseModel):
    delta: float = 1.0
    smoothness: float = 1.0
    sigma_sq: float = 0.0
    n: int = 1
    budget: int = 1
    diam: int = 1
    lam: float = 0.0
    eps: float = 0.1
    vs0_sq: float = 0.0
    vs_sq: float = 0.0


class TableRowModel(BaseModel):
    algorithm: str
    sample_term: float
    comm_term: float
    gap_formula: str


class BoundsResponse(BaseModel):
    lower_general: float
    lower_gossip: float
    upper_defacto: float
    upper_detag: float
    table: list[TableRowModel]


class RunRequest(BaseModel):
    graph: str
    objective: str
    algorithm: str
    matrix: str = "metropolis"
    seed: int = 0
    iterations: int = 1000
    eps_grid: list[float] = Field(default_factory=list)
    record_every: int = 1
    out: str | None = Field(default=None, description="write the trace CSV here")
    include_csv: bool = Field(default=False, description="inline the trace CSV in the response")


class RunResponse(BaseModel):
    status: str
    iterations: int
    final_loss: float
    final_grad_norm: float
    queries: int
    t_eps: dict[str, int | None]
    trace_path: str | None = None
    trace_csv: str | None = None


class SweepRequest(BaseModel):
    config_text: str = Field(description="INI experiment config")
    out: str | None = None


class SweepRunModel(BaseModel):
    algorithm: str
    alpha: float
    seed: int
    status: str
    final_loss: float
    final_grad_norm: float
    best: bool
    trace_path: str


class SweepResponse(BaseModel):
    runs: list[SweepRunModel]
    summary_path: str
    mean_path: str


def spectral(req: SpectralRequest) -> SpectralResponse:
    from .config import parse_matrix_spec

    topo = parse_graph_spec(req.graph)
    w = parse_matrix_spec(f"metropolis:kappa={req.kappa}", topo)
    return SpectralResponse(
        n=topo.n,
        diameter=topo.diameter,
        lam=w.lam,
        spectral_gap=1.0 - w.lam,
        eta=ag_momentum(w.lam),
        rho=contraction_factor(w.lam, req.rounds),
        adjacency=format_adjacency(topo),
    )


def factorize(req: FactorizeRequest) -> FactorizeResponse:
    from .mixing import verify_plan

    topo = parse_graph_spec(req.graph)
    plan = consensus_plan(topo)
    return FactorizeResponse(
        n=topo.n,
        diameter=topo.diameter,
        length=plan.length,
        max_error=verify_plan(plan),
        factors=[f.tolist() for f in plan.factors] if req.dump_factors else None,
    )


def bounds_report(req: BoundsRequest) -> BoundsResponse:
    params = ComplexityParams(
        delta=req.delta,
        smoothness=req.smoothness,
        sigma_sq=req.sigma_sq,
        n=req.n,
        budget=req.budget,
        diam=req.diam,
        lam=req.lam,
        eps=req.eps,
        vs0_sq=req.vs0_sq,
    )
    rows = complexity_table(params, req.vs_sq)
    return BoundsResponse(
        lower_general=lower_bound_general(params),
        lower_gossip=lower_bound_gossip(params),
        upper_defacto=upper_bound_defacto(params),
        upper_detag=upper_bound_detag(params),
        table=[
            TableRowModel(
                algorithm=r.algorithm,
                sample_term=r.sample_term,
                comm_term=r.comm_term,
                gap_formula=r.gap_formula,
            )
            for r in rows
        ],
    )


def run_experiment(req: RunRequest) -> RunResponse:
    topo, mix, obj, cfg = prepare_run(
        req.graph, req.matrix, req.objective, req.algorithm, req.iterations
    )
    trace = run(obj, topo, mix, cfg, req.seed, record_every=req.record_every)
    t_eps = measure_Teps(trace, req.eps_grid)
    path = None
    if req.out:
        path = str(write_trace_csv(trace, req.out))
    return RunResponse(
        status=trace.status,
        iterations=trace.records[-1][0],
        final_loss=trace.final_loss,
        final_grad_norm=trace.final_grad_norm,
        queries=trace.records[-1][5],
        t_eps={repr(eps): hit for eps, hit in t_eps.items()},
        trace_path=path,
        trace_csv=trace_to_csv(trace) if req.include_csv else None,
    )


def run_sweep(req: SweepRequest) -> SweepResponse:
    cfg: ExperimentConfig = parse_config(req.config_text)
    result = sweep(cfg, base_dir=req.out)
    return SweepResponse(
        runs=[
            SweepRunModel(
                algorithm=r.algorithm,
                alpha=r.alpha,
                seed=r.seed,
                status=r.status,
                final_loss=r.final_loss,
                final_grad_norm=r.final_grad_norm,
                best=r.best,
                trace_path=r.trace_path,
            )
            for r in result.runs
        ],
        summary_path=result.summary_path,
        mean_path=result.mean_path,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="gossipsim", version=__version__)

    def guard(fn, req):
        try:
            return fn(req)
        except _USER_ERRORS as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/spectral", response_model=SpectralResponse)
    def spectral_endpoint(req: SpectralRequest):
        return guard(spectral, req)

    @app.post("/factorize", response_model=FactorizeResponse)
    def factorize_endpoint(req: FactorizeRequest):
        return guard(factorize, req)

    @app.post("/bounds", response_model=BoundsResponse)
    def bounds_endpoint(req: BoundsRequest):
        return guard(bounds_report, req)

    @app.post("/run", response_model=RunResponse)
    def run_endpoint(req: RunRequest):
        return guard(run_experiment, req)

    @app.post("/sweep", response_model=SweepResponse)
    def sweep_endpoint(req: SweepRequest):
        return guard(run_sweep, req)

    return app


app = create_app()

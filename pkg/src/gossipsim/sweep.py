"""Grid sweeps over algorithms, step sizes and seeds, reported as CSV files.

Each run writes its own trace CSV; ``summary.csv`` has one row per run with
final metrics and first-hit iterations for the epsilon grid, and marks the
best step size per algorithm by final gradient norm (the grid-search
selector). ``summary_mean.csv`` aggregates the per-seed first-hit iterations.
Rows are sorted by spec string, so identical configs produce byte-identical
summaries.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

from .algorithms import parse_algorithm_spec, run
from .config import ExperimentConfig, prepare_run
from .trace import RunTrace, measure_Teps, write_trace_csv

__all__ = ["SweepResult", "sweep", "run_one"]


@dataclass
class SweepRunResult:
    algorithm: str
    alpha: float
    seed: int
    status: str
    final_loss: float
    final_grad_norm: float
    t_eps: dict[float, int | None]
    trace_path: str
    best: bool = False


@dataclass
class SweepResult:
    runs: list[SweepRunResult] = field(default_factory=list)
    summary_path: str = ""
    mean_path: str = ""


def run_one(
    cfg: ExperimentConfig, algorithm: str, seed: int, alpha: float | None = None
) -> RunTrace:
    """Execute a single run described by the experiment config."""
    topo, mix, obj, algo_cfg = prepare_run(
        cfg.graph, cfg.matrix, cfg.objective, algorithm, cfg.iterations, alpha
    )
    return run(obj, topo, mix, algo_cfg, seed, record_every=cfg.record_every)


def _slug(text: str) -> str:
    keep = [c if c.isalnum() or c in "._-" else "-" for c in text]
    return "".join(keep)


def sweep(cfg: ExperimentConfig, base_dir: str | Path | None = None) -> SweepResult:
    """Run the Cartesian product of algorithms x step sizes x seeds."""
    out_dir = Path(base_dir) if base_dir is not None else Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    alphas: tuple[float | None, ...] = cfg.alphas if cfg.alphas else (None,)

    result = SweepResult()
    for algorithm in sorted(cfg.algorithms):
        for alpha in alphas:
            for seed in cfg.seeds:
                trace = run_one(cfg, algorithm, seed, alpha)
                used_alpha = alpha if alpha is not None else _embedded_alpha(algorithm)
                name = f"trace_{_slug(algorithm)}_a{used_alpha!r}_s{seed}.csv"
                path = write_trace_csv(trace, out_dir / name)
                result.runs.append(
                    SweepRunResult(
                        algorithm=algorithm,
                        alpha=used_alpha,
                        seed=seed,
                        status=trace.status,
                        final_loss=trace.final_loss,
                        final_grad_norm=trace.final_grad_norm,
                        t_eps=measure_Teps(trace, cfg.eps_grid),
                        trace_path=str(path),
                    )
                )
    _mark_best(result.runs)
    result.summary_path = str(_write_summary(result.runs, cfg, out_dir / "summary.csv"))
    result.mean_path = str(_write_means(result.runs, cfg, out_dir / "summary_mean.csv"))
    return result


def _embedded_alpha(algorithm: str) -> float:
    _, kv = parse_algorithm_spec(algorithm)
    return float(kv.get("alpha", "nan"))


def _mark_best(runs: list[SweepRunResult]) -> None:
    by_algo: dict[str, list[SweepRunResult]] = {}
    for r in runs:
        by_algo.setdefault(r.algorithm, []).append(r)
    for group in by_algo.values():
        ok = [r for r in group if r.status == "ok"] or group
        min(ok, key=lambda r: r.final_grad_norm).best = True


def _eps_headers(cfg: ExperimentConfig) -> list[str]:
    return [f"teps_{eps!r}" for eps in cfg.eps_grid]


def _write_summary(runs: list[SweepRunResult], cfg: ExperimentConfig, path: Path) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["algorithm", "alpha", "seed", "status", "final_loss", "final_grad_norm"]
    writer.writerow(header + _eps_headers(cfg) + ["best"])
    for r in sorted(runs, key=lambda r: (r.algorithm, r.alpha, r.seed)):
        cells = [r.algorithm, repr(r.alpha), str(r.seed), r.status,
                 repr(r.final_loss), repr(r.final_grad_norm)]
        cells += ["" if r.t_eps[eps] is None else str(r.t_eps[eps]) for eps in cfg.eps_grid]
        writer.writerow(cells + ["1" if r.best else "0"])
    path.write_text(buf.getvalue())
    return path


def _write_means(runs: list[SweepRunResult], cfg: ExperimentConfig, path: Path) -> Path:
    """Per (algorithm, alpha): seed-averaged final metrics and first-hit iterations."""
    groups: dict[tuple[str, float], list[SweepRunResult]] = {}
    for r in runs:
        groups.setdefault((r.algorithm, r.alpha), []).append(r)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["algorithm", "alpha", "seeds", "mean_final_grad_norm"]
    writer.writerow(header + [f"mean_{h}" for h in _eps_headers(cfg)])
    for (algorithm, alpha), group in sorted(groups.items()):
        cells = [algorithm, repr(alpha), str(len(group))]
        cells.append(repr(sum(r.final_grad_norm for r in group) / len(group)))
        for eps in cfg.eps_grid:
            hits = [r.t_eps[eps] for r in group]
            cells.append("" if any(h is None for h in hits) else repr(sum(hits) / len(hits)))
        writer.writerow(cells)
    path.write_text(buf.getvalue())
    return path

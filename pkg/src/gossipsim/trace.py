"""Run traces, convergence metrics and CSV reporting."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .objectives import Objective

__all__ = [
    "TRACE_COLUMNS",
    "RunTrace",
    "grad_norm_at_mean",
    "consensus_distance",
    "measure_Teps",
    "write_trace_csv",
    "trace_to_csv",
    "read_trace_csv",
]

TRACE_COLUMNS = ("iter", "loss", "grad_norm", "consensus_x", "consensus_y", "queries")


def grad_norm_at_mean(obj: Objective, x_cols: np.ndarray) -> float:
    """Euclidean norm of the full gradient at the column-mean model."""
    return float(np.linalg.norm(obj.grad(x_cols.mean(axis=1))))


def consensus_distance(x_cols: np.ndarray) -> float:
    """Frobenius distance of the stacked worker states from their column mean."""
    return float(np.linalg.norm(x_cols - x_cols.mean(axis=1, keepdims=True), "fro"))


@dataclass
class RunTrace:
    """Per-iteration metrics of one run plus the averaged output model.

    Row 0 records the initial state; row t the state after iteration t.
    ``queries`` counts cumulative oracle calls across all workers.
    """

    records: list[tuple[int, float, float, float, float, int]] = field(default_factory=list)
    final_x: np.ndarray | None = None
    status: str = "ok"

    def append(self, iteration, loss, grad_norm, consensus_x, consensus_y, queries):
        self.records.append(
            (int(iteration), float(loss), float(grad_norm),
             float(consensus_x), float(consensus_y), int(queries))
        )

    def column(self, name: str) -> np.ndarray:
        idx = TRACE_COLUMNS.index(name)
        return np.array([rec[idx] for rec in self.records])

    @property
    def final_grad_norm(self) -> float:
        return self.records[-1][2]

    @property
    def final_loss(self) -> float:
        return self.records[-1][1]


def measure_Teps(trace: RunTrace, eps_grid) -> dict[float, int | None]:
    """First recorded iteration whose gradient norm is at or below each epsilon.

    Returns None for levels the run never reached.
    """
    iters = trace.column("iter")
    norms = trace.column("grad_norm")
    out: dict[float, int | None] = {}
    for eps in eps_grid:
        hits = np.nonzero(norms <= eps)[0]
        out[float(eps)] = int(iters[hits[0]]) if len(hits) else None
    return out


def trace_to_csv(trace: RunTrace) -> str:
    buf = io.StringIO()
    buf.write(",".join(TRACE_COLUMNS) + "\n")
    for it, loss, gn, cx, cy, q in trace.records:
        buf.write(f"{it},{loss!r},{gn!r},{cx!r},{cy!r},{q}\n")
    return buf.getvalue()


def write_trace_csv(trace: RunTrace, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(trace_to_csv(trace))
    return path


def read_trace_csv(source: str | Path) -> RunTrace:
    """Parse a trace CSV (path or literal text) back into a RunTrace."""
    text = source if isinstance(source, str) and "\n" in source else Path(source).read_text()
    lines = text.strip().splitlines()
    if lines[0] != ",".join(TRACE_COLUMNS):
        raise ValueError(f"unexpected trace header {lines[0]!r}")
    trace = RunTrace()
    for line in lines[1:]:
        it, loss, gn, cx, cy, q = line.split(",")
        trace.append(int(it), float(loss), float(gn), float(cx), float(cy), int(q))
    return trace

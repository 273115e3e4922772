"""Objective spec strings for the CLI and config files.

Examples:
    quad:n=8,d=20,vs0=10,sigma=1,seed=0
    logistic:points=400,d=10,shuffle=25,reg=0.001,batch=1,sep=2.0,seed=0
    logistic:file=data.csv,shuffle=100,reg=0.001,batch=1,seed=0
    zerochain:delta=1,L=1,eps=0.05,setting=2
    zerochain:T=12,setting=1,p=0.5
"""

from __future__ import annotations

from ..specstring import SpecError, split_spec
from ..topology import Topology
from .base import Objective
from .logistic import load_csv, make_logistic, make_two_class_gaussian
from .partition import PartitionSpec, partition
from .quadratic import make_quadratics
from .zerochain import (
    ZeroChainInstance,
    homogeneous_objective,
    rescale_instance,
    split_instance,
)

__all__ = ["parse_objective_spec"]


def parse_objective_spec(spec: str, topo: Topology) -> Objective:
    """Build the objective described by ``spec`` for the workers of ``topo``."""
    kind, kv = split_spec(spec)
    n = topo.n
    try:
        if kind == "quad":
            if "n" in kv and int(kv["n"]) != n:
                raise SpecError(f"objective says n={kv['n']} but graph has n={n}")
            return make_quadratics(
                n=n,
                d=int(kv.get("d", 10)),
                vs0_sq=float(kv.get("vs0", 0.0)),
                sigma=float(kv.get("sigma", 0.0)),
                seed=int(kv.get("seed", 0)),
                design=kv.get("design", "shared"),
            )
        if kind == "logistic":
            seed = int(kv.get("seed", 0))
            if "file" in kv:
                features, labels = load_csv(kv["file"])
            else:
                features, labels = make_two_class_gaussian(
                    n_points=int(kv.get("points", 400)),
                    d=int(kv.get("d", 10)),
                    separation=float(kv.get("sep", 2.0)),
                    seed=seed,
                    scale0=float(kv.get("scale0", 1.0)),
                )
            shards = partition(
                labels,
                PartitionSpec(
                    shuffle_fraction=float(kv.get("shuffle", 100.0)), seed=seed, n=n
                ),
            )
            batch = int(kv.get("batch", 1))
            return make_logistic(
                features,
                labels,
                shards,
                reg=float(kv.get("reg", 0.0)),
                batch=batch if batch > 0 else None,
            )
        if kind == "zerochain":
            p = float(kv["p"]) if "p" in kv else None
            setting = str(kv.get("setting", "1"))
            if "T" in kv:
                inst = ZeroChainInstance(chain_length=int(kv["T"]))
            else:
                inst = ZeroChainInstance(chain_length=1, delta=float(kv["delta"]))
                inst = rescale_instance(
                    inst, float(kv["L"]), float(kv["eps"]), f"setting{setting}"
                )
            if setting == "2":
                return split_instance(inst, topo)
            return homogeneous_objective(inst, n, p)
    except KeyError as exc:
        raise SpecError(f"objective spec {spec!r} missing key {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"bad objective spec {spec!r}: {exc}") from exc
    raise SpecError(f"unknown objective kind {kind!r}")

"""Name-to-function table shared by the command line and the benchmark runner."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from .decoder import DecoderConfig, ProbeOptions, decoder_distance
from .exact.codeword import bz_distance, distance_via_macwilliams, exhaustive_distance
from .exact.errors import connected_cluster_distance, exhaustive_error_distance, meet_in_middle_distance
from .heuristic import EvolParams, qdistevol, qdistrnd
from .results import DistanceResult
from .solvers import milp_distance, sat_distance
from .undetectable import cc_search, ge_search, ue_search


@dataclass
class JobConfig:
    """One method run on one input file."""

    method: str
    path: str = ""
    max_time: float | None = None
    iters: int | None = None
    seed: int = 0
    rep: int | None = None
    basis: str = "Z"
    threads: int = 1
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.max_time is not None and self.max_time <= 0:
            raise ValueError("max_time must be positive")
        if self.iters is not None and self.iters < 1:
            raise ValueError("iters must be at least 1")
        if self.rep not in (None, 2, 3, 4):
            raise ValueError("rep must be 2, 3 or 4")
        if self.basis.upper() not in ("X", "Z"):
            raise ValueError("basis must be x or z")


def _rep(cfg: JobConfig, default: int = 3) -> int:
    return cfg.rep if cfg.rep is not None else default


def _qdistevol(code, cfg: JobConfig) -> DistanceResult:
    params = dict(cfg.params)
    if cfg.iters is not None:
        # iters counts kernels, i.e. lam per generation times generations
        lam = params.get("lam", 100)
        params.setdefault("n_gens", max(1, cfg.iters // lam))
    if cfg.rep is not None:
        params.setdefault("rep", cfg.rep)
    return qdistevol(code, EvolParams(**params), seed=cfg.seed, basis=cfg.basis,
                     n_jobs=cfg.threads, max_time=cfg.max_time)


METHODS: dict[str, Callable[[Any, JobConfig], DistanceResult]] = {
    "exhaustive": lambda c, j: exhaustive_distance(c, j.basis, _rep(j), max_time=j.max_time),
    "macwilliams": lambda c, j: distance_via_macwilliams(c, j.basis),
    "bz": lambda c, j: bz_distance(c, j.max_time, basis=j.basis, rep=_rep(j), seed=j.seed, **j.params),
    "error-exhaustive": lambda c, j: exhaustive_error_distance(c, j.basis, _rep(j), j.max_time),
    "mitm": lambda c, j: meet_in_middle_distance(c, j.basis, _rep(j), j.max_time),
    "cluster": lambda c, j: connected_cluster_distance(c, j.basis, _rep(j), j.max_time, **j.params),
    "qdistrnd": lambda c, j: qdistrnd(c, j.iters or 1000, j.seed, j.rep, j.basis, n_jobs=j.threads,
                                      max_time=j.max_time, **j.params),
    "qdistevol": _qdistevol,
    "ge": lambda c, j: ge_search(c, j.basis, _rep(j), j.max_time),
    "cc": lambda c, j: cc_search(c, j.basis, _rep(j), j.max_time),
    "ue": lambda c, j: ue_search(c, j.basis, _rep(j), j.max_time),
    "decoder": lambda c, j: decoder_distance(c, ProbeOptions(j.iters or 100, seed=j.seed, **j.params),
                                             DecoderConfig(), j.basis, _rep(j), n_jobs=j.threads,
                                             max_time=j.max_time),
    "sat": lambda c, j: sat_distance(c, j.basis, _rep(j), j.params.get("solver"), j.max_time),
    "milp": lambda c, j: milp_distance(c, j.basis, _rep(j), j.params.get("solver"), j.max_time),
}

HEURISTICS = frozenset({"qdistrnd", "qdistevol", "decoder"})
EXACT = frozenset({"exhaustive", "macwilliams", "bz", "error-exhaustive", "mitm", "cluster", "sat", "milp"})


def run_method(code, cfg: JobConfig) -> DistanceResult:
    return METHODS[cfg.method](code, cfg)

"""Randomised upper bounds: random information sets and evolutionary search."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as _k
from .codes import StabiliserCode, as_detector_model
from .dem import DetectorModel
from .gf2 import BitVector
from .results import INF, Deadline, DistanceResult, NoResultError, Status, TrialStats


def trial_rng(seed: int | None, *index: int) -> np.random.Generator:
    """Independent generator for one trial, derived from the run seed and indices."""
    base = 0 if seed is None else int(seed)
    return np.random.default_rng([base, *index])


def regroup_order(rep: int | None) -> list[int] | None:
    """Block offsets (in units of n) listing each qubit's columns side by side.

    Two-block models put a qubit's X then Z column together; three-block
    models use X, Z, Y; four-block models keep block order.
    """
    return {2: [0, 1], 3: [1, 0, 2], 4: [0, 1, 2, 3]}.get(rep)


class KernelSearch:
    """Shared evaluation of ``ker H`` under a column order.

    Each call row-reduces ``H`` along a column list, reads off the kernel
    basis and scores the rows that flip some observable.
    """

    def __init__(self, dem: DetectorModel, regroup: bool = False, weighted: bool = False):
        if dem.num_observables == 0:
            raise NoResultError("model has no observables")
        self.dem = dem
        self.H = np.ascontiguousarray(dem.H.data)
        self.L = np.ascontiguousarray(dem.L.data)
        self.m = dem.num_errors
        self.mode = 1 if dem.rep == 2 else 0
        self.n = dem.n_qubits if dem.rep == 2 else self.m
        self.divisor = dem.weight_divisor
        self.costs = dem.costs() if weighted and dem.p is not None else None
        offsets = regroup_order(dem.rep) if regroup else None
        if regroup and offsets is None:
            raise ValueError("regrouping needs a block-represented model")
        self.offsets = offsets
        self.genome_size = dem.n_qubits if offsets else self.m

    def columns(self, genome: np.ndarray) -> np.ndarray:
        if self.offsets is None:
            return genome
        nq = self.dem.n_qubits
        return np.concatenate([[q + off * nq for off in self.offsets] for q in genome]).astype(np.int64)

    def evaluate(self, genome: np.ndarray):
        """Scores of the nontrivial kernel rows plus the kernel and pivot columns."""
        clist = self.columns(genome)
        R = self.H.copy()
        piv = _k.rref_inplace(R, clist)
        K = _k.kernel_from_rref(R, piv, self.m)
        w = _k.nontrivial_weights(K, self.L, self.mode, self.n)
        rows = np.flatnonzero(w >= 0)
        if self.costs is not None:
            dense = np.unpackbits(K[rows].view(np.uint8), axis=1, bitorder="little")[:, : self.m]
            scores = dense @ self.costs
        else:
            scores = w[rows] // self.divisor
        return scores.astype(float), K, rows, piv

    def pivot_genes(self, piv: np.ndarray) -> np.ndarray:
        """Genome entries owning a pivot column."""
        if self.offsets is None:
            return piv
        return np.unique(piv % self.dem.n_qubits)

    def witness(self, row: np.ndarray, pauli: bool) -> BitVector:
        e = BitVector(row.copy(), self.m)
        if not self.dem.is_undetectable_logical(e):
            raise AssertionError("kernel row is not an undetectable logical error")
        return self.dem.to_pauli(e) if pauli else e


def _resolve(code, basis: str, rep: int | None, default_rep: int) -> tuple[DetectorModel, bool]:
    is_stab = isinstance(code, StabiliserCode)
    dem = as_detector_model(code, basis, rep if rep is not None else default_rep)
    return dem, is_stab


def _best_keys(scores, K, rows):
    if rows.size == 0:
        return INF, [], None
    best = scores.min()
    hit = rows[scores == best]
    return float(best), [K[i].tobytes() for i in hit], K[hit[0]]


def _as_int(x: float) -> float:
    return int(x) if x != INF and float(x).is_integer() else x


def qdistrnd(code, iters: int = 1000, seed: int | None = 0, rep: int | None = None,
             basis: str = "Z", regroup: bool | None = None, weighted: bool = False,
             n_jobs: int = 1, max_time: float | None = None) -> DistanceResult:
    """Upper bound from kernels of ``H`` under random column orders.

    Stabiliser codes default to the four-block model without regrouping.
    ``stats`` on the result records every trial and the lowest-weight
    witnesses with their hit counts.
    """
    if iters < 1:
        raise ValueError("iters must be at least 1")
    deadline = Deadline(max_time)
    dem, pauli = _resolve(code, basis, rep, 4)
    search = KernelSearch(dem, bool(regroup), weighted)

    def trial(i: int):
        if deadline.expired():
            return None
        genome = trial_rng(seed, i).permutation(search.genome_size)
        scores, K, rows, _ = search.evaluate(genome)
        return _best_keys(scores, K, rows)

    stats = TrialStats()
    best_row = None
    batch = max(1, 4 * n_jobs)
    with ThreadPoolExecutor(max_workers=n_jobs) if n_jobs > 1 else _Serial() as pool:
        for start in range(0, iters, batch):
            outcomes = list(pool.map(trial, range(start, min(iters, start + batch))))
            for out in outcomes:
                if out is None:
                    break
                w, keys, row = out
                if w < stats.min_weight:
                    best_row = row
                stats.record(w, keys)
            if deadline.expired():
                break
    return _finish(search, stats, best_row, pauli, deadline, "qdistrnd")


def _finish(search: KernelSearch, stats: TrialStats, best_row, pauli: bool, deadline: Deadline,
            method: str, trace=None) -> DistanceResult:
    if best_row is None:
        if stats.iter_count == 0:
            return DistanceResult(Status.TIMEOUT, 1, INF, None, deadline.elapsed(), method, stats, trace)
        raise NoResultError("no nontrivial kernel vector found")
    w = search.witness(best_row, pauli)
    ub = _as_int(stats.min_weight)
    return DistanceResult(Status.UPPER_ONLY, min(1, ub), ub, w, deadline.elapsed(), method, stats, trace)


class _Serial:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    def map(self, fn, it):
        return map(fn, it)


def round_half_away(x: float) -> int:
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


@dataclass
class EvolParams:
    n_gens: int = 100
    lam: int = 100
    mu: int = 10
    p_mut: float | None = None  # default: genome length / 50, at least 1
    s_mut: float = 0.2
    swap_pivot: bool = True
    regroup: bool | None = None
    rep: int | None = None

    def __post_init__(self) -> None:
        if self.n_gens < 1 or self.lam < 1 or self.mu < 1:
            raise ValueError("n_gens, lam and mu must be positive")
        if self.lam % self.mu:
            raise ValueError("mu must divide lam")
        if self.mu > self.lam:
            raise ValueError("mu cannot exceed lam")
        if self.p_mut is not None and self.p_mut <= 0:
            raise ValueError("p_mut must be positive")


@dataclass
class _Member:
    genome: np.ndarray
    fitness: tuple[float, float] = (INF, INF)
    pivots: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))


def qdistevol(code, params: EvolParams | None = None, seed: int | None = 0, basis: str = "Z",
              weighted: bool = False, n_jobs: int = 1, max_time: float | None = None) -> DistanceResult:
    """Evolve column orders whose kernels contain low-weight logicals.

    Fitness is (minimum, mean) nontrivial row weight.  The best ``mu``
    orders each spawn ``lam / mu`` children by random transpositions;
    with ``swap_pivot`` each transposition exchanges a pivot entry with a
    non-pivot entry of the parent's reduction.  ``trace`` on the result
    holds the best fitness per generation.
    """
    params = params or EvolParams()
    deadline = Deadline(max_time)
    is_stab = isinstance(code, StabiliserCode)
    rep = params.rep if params.rep is not None else (2 if is_stab else None)
    regroup = params.regroup if params.regroup is not None else is_stab
    dem = as_detector_model(code, basis, rep if rep is not None else 3)
    search = KernelSearch(dem, regroup and dem.rep is not None, weighted)
    size = search.genome_size
    p_mut = params.p_mut if params.p_mut is not None else max(1.0, size / 50)

    def score(args):
        gen, idx, genome = args
        scores, K, rows, piv = search.evaluate(genome)
        if rows.size:
            fit = (float(scores.min()), float(scores.mean()))
        else:
            fit = (INF, INF)
        return fit, _best_keys(scores, K, rows), search.pivot_genes(piv)

    stats = TrialStats()
    best_row = None
    trace = []
    population = [trial_rng(seed, 0, i).permutation(size) for i in range(params.lam)]
    with ThreadPoolExecutor(max_workers=n_jobs) if n_jobs > 1 else _Serial() as pool:
        for gen in range(params.n_gens):
            results = list(pool.map(score, [(gen, i, g) for i, g in enumerate(population)]))
            members = []
            for genome, (fit, (w, keys, row), piv) in zip(population, results):
                if w < stats.min_weight:
                    best_row = row
                stats.record(w, keys)
                members.append(_Member(genome, fit, piv))
            members.sort(key=lambda mb: (mb.fitness, tuple(mb.genome.tolist())))
            trace.append((gen, members[0].fitness))
            if gen == params.n_gens - 1 or deadline.expired():
                break
            children = []
            per_parent = params.lam // params.mu
            for pi, parent in enumerate(members[: params.mu]):
                for j in range(per_parent):
                    rng = trial_rng(seed, gen + 1, pi * per_parent + j)
                    children.append(_mutate(parent, rng, p_mut, params.s_mut, params.swap_pivot))
            population = children
    return _finish(search, stats, best_row, is_stab, deadline, "qdistevol", trace)


def _mutate(parent: _Member, rng: np.random.Generator, p_mut: float, s_mut: float, swap_pivot: bool) -> np.ndarray:
    g = parent.genome.copy()
    size = g.size
    count = max(1, round_half_away(p_mut * (1 + s_mut * rng.random())))
    pivots = parent.pivots if swap_pivot else np.zeros(0, np.int64)
    is_piv = np.zeros(size, bool)
    is_piv[pivots] = True
    piv_genes = np.flatnonzero(is_piv)
    other_genes = np.flatnonzero(~is_piv)
    pos = np.empty(size, np.int64)
    pos[g] = np.arange(size)
    for _ in range(count):
        if piv_genes.size and other_genes.size:
            ga = piv_genes[rng.integers(piv_genes.size)]
            gb = other_genes[rng.integers(other_genes.size)]
            a, b = pos[ga], pos[gb]
        else:
            a, b = rng.choice(size, 2, replace=False)
        g[a], g[b] = g[b], g[a]
        pos[g[a]], pos[g[b]] = a, b
    return g

"""Belief propagation with ordered-statistics post-processing, and the
distance probe that decodes a unit syndrome on ``[H; x]``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numba import njit

from . import _kernels as _k
from .codes import as_detector_model
from .gf2 import BitMatrix, BitVector
from .results import INF, Deadline, DistanceResult, NoResultError, Status, TrialStats

LLR_CLAMP = 30.0


@dataclass(frozen=True)
class DecoderConfig:
    """BP+OSD settings.  ``priors`` is one error probability or one per column."""

    bp_iters: int = 100
    osd_order: int = 1
    priors: float | Sequence[float] = 0.05

    def __post_init__(self) -> None:
        if self.bp_iters < 1:
            raise ValueError("bp_iters must be at least 1")
        if self.osd_order not in (0, 1):
            raise ValueError("osd_order must be 0 or 1")
        p = np.atleast_1d(np.asarray(self.priors, dtype=float))
        if np.any((p <= 0) | (p > 0.5)):
            raise ValueError("priors must lie in (0, 0.5]")

    def prior_vector(self, n: int) -> np.ndarray:
        p = np.asarray(self.priors, dtype=float)
        if p.ndim == 0:
            return np.full(n, float(p))
        if p.shape != (n,):
            raise ValueError(f"need {n} priors, got {p.shape[0]}")
        return p.copy()


@dataclass(frozen=True)
class ProbeOptions:
    iters: int = 100
    permute_columns: bool = True
    add_random_stabilisers: bool = True
    seed: int | None = 0

    def __post_init__(self) -> None:
        if self.iters < 1:
            raise ValueError("iters must be at least 1")


def _tanner(H: np.ndarray):
    """Edge lists of the Tanner graph, grouped by check and by variable."""
    rows, cols = np.nonzero(H)
    order_v = np.argsort(cols, kind="stable")
    check_ptr = np.searchsorted(rows, np.arange(H.shape[0] + 1)).astype(np.int64)
    var_ptr = np.searchsorted(cols[order_v], np.arange(H.shape[1] + 1)).astype(np.int64)
    return rows.astype(np.int64), cols.astype(np.int64), check_ptr, var_ptr, order_v.astype(np.int64)


@njit(cache=True, nogil=True)
def _bp(edge_row, edge_col, check_ptr, var_ptr, var_edges, syndrome, prior_llr, iters, clamp):
    m = check_ptr.shape[0] - 1
    n = var_ptr.shape[0] - 1
    ne = edge_row.shape[0]
    q = np.empty(ne)
    r = np.zeros(ne)
    for e in range(ne):
        q[e] = prior_llr[edge_col[e]]
    post = prior_llr.copy()
    hard = np.zeros(n, np.uint8)
    for j in range(n):
        hard[j] = 1 if post[j] < 0 else 0
    converged = False
    # the zero correction is already valid for a zero syndrome
    ok = True
    for i in range(m):
        if syndrome[i]:
            ok = False
    if ok:
        for j in range(n):
            if hard[j]:
                ok = False
        if ok:
            return post, hard, True, 0
    done = 0
    for it in range(iters):
        done = it + 1
        for i in range(m):
            a, b = check_ptr[i], check_ptr[i + 1]
            for e in range(a, b):
                prod = 1.0
                for f in range(a, b):
                    if f != e:
                        prod *= np.tanh(0.5 * q[f])
                if prod > 1.0 - 1e-15:
                    prod = 1.0 - 1e-15
                elif prod < -1.0 + 1e-15:
                    prod = -1.0 + 1e-15
                v = 2.0 * np.arctanh(prod)
                if syndrome[i]:
                    v = -v
                if v > clamp:
                    v = clamp
                elif v < -clamp:
                    v = -clamp
                r[e] = v
        for j in range(n):
            s = prior_llr[j]
            for t in range(var_ptr[j], var_ptr[j + 1]):
                s += r[var_edges[t]]
            if s > clamp:
                s = clamp
            elif s < -clamp:
                s = -clamp
            post[j] = s
            hard[j] = 1 if s < 0 else 0
            for t in range(var_ptr[j], var_ptr[j + 1]):
                e = var_edges[t]
                v = s - r[e]
                if v > clamp:
                    v = clamp
                elif v < -clamp:
                    v = -clamp
                q[e] = v
        converged = True
        for i in range(m):
            par = 0
            for e in range(check_ptr[i], check_ptr[i + 1]):
                par ^= hard[edge_col[e]]
            if par != syndrome[i]:
                converged = False
                break
        if converged:
            break
    return post, hard, converged, done


def _as_dense(H) -> np.ndarray:
    if isinstance(H, BitMatrix):
        return H.to_dense()
    return np.asarray(H, dtype=np.uint8)


def _syndrome_bits(s, r: int) -> np.ndarray:
    bits = s.to_dense() if isinstance(s, BitVector) else np.asarray(s, dtype=np.uint8)
    if bits.shape != (r,):
        raise ValueError(f"syndrome length {bits.shape[0]} does not match {r} checks")
    return bits


@dataclass
class BPOutput:
    marginals: np.ndarray
    correction: BitVector
    converged: bool
    iterations: int


def bp_decode(H, syndrome, config: DecoderConfig | None = None) -> BPOutput:
    """Product-sum belief propagation with a parallel (flooding) schedule.

    Marginals are the posterior error probabilities, kept inside (0, 1) by
    clamping log-likelihoods at +-30.
    """
    config = config or DecoderConfig()
    Hd = _as_dense(H)
    s = _syndrome_bits(syndrome, Hd.shape[0])
    p = config.prior_vector(Hd.shape[1])
    llr = np.log((1 - p) / p)
    er, ec, cp, vp, ve = _tanner(Hd)
    post, hard, conv, its = _bp(er, ec, cp, vp, ve, s, llr, config.bp_iters, LLR_CLAMP)
    marg = 1.0 / (1.0 + np.exp(post))
    return BPOutput(marg, BitVector.from_dense(hard), bool(conv), int(its))


def osd_postprocess(H, syndrome, marginals: np.ndarray, order: int = 1,
                    priors: Sequence[float] | None = None) -> BitVector:
    """Ordered-statistics solution of ``H e = s`` guided by ``marginals``.

    Columns are ranked by descending marginal (ties by index) and the
    first independent ones form the information set.  Order 0 solves on
    that set alone.  Order 1 also tries flipping each remaining column in
    turn.  The cheapest candidate wins, where cost is weight or, with
    ``priors``, the total ``log((1-p)/p)``.  The hard decision implied by
    the marginals is included as a candidate when it is valid.
    """
    Hd = _as_dense(H)
    r, n = Hd.shape
    s = _syndrome_bits(syndrome, r)
    cost = np.ones(n) if priors is None else np.log((1 - np.asarray(priors)) / np.asarray(priors))
    order_cols = np.lexsort((np.arange(n), -np.asarray(marginals, dtype=float)))
    aug = BitMatrix.from_dense(np.hstack([Hd, s[:, None]]))
    R = np.ascontiguousarray(aug.data.copy())
    piv = _k.rref_inplace(R, order_cols.astype(np.int64))
    D = BitMatrix(R, n + 1).to_dense()
    rank = piv.shape[0]
    if D[rank:, n].any():
        raise ValueError("syndrome is not in the column space of H")
    sp = D[:rank, n]
    base = np.zeros(n, np.uint8)
    base[piv] = sp
    best, best_cost = base, float(cost[piv] @ sp)
    if order >= 1 and rank < n:
        others = np.setdiff1d(np.arange(n), piv)
        X = D[:rank][:, others] ^ sp[:, None]
        costs = cost[piv] @ X + cost[others]
        i = int(np.argmin(costs))
        if costs[i] < best_cost - 1e-12:
            best = np.zeros(n, np.uint8)
            best[piv] = X[:, i]
            best[others[i]] = 1
            best_cost = float(costs[i])
    hard = (np.asarray(marginals) > 0.5).astype(np.uint8)
    if not ((Hd.astype(np.int64) @ hard) % 2 ^ s).any():
        hc = float(cost @ hard)
        if hc < best_cost - 1e-12:
            best = hard
    return BitVector.from_dense(best)


def bp_osd_decode(H, syndrome, config: DecoderConfig | None = None) -> BitVector:
    """BP, then OSD unless BP converged to something OSD cannot beat."""
    config = config or DecoderConfig()
    out = bp_decode(H, syndrome, config)
    Hd = _as_dense(H)
    p = config.prior_vector(Hd.shape[1])
    return osd_postprocess(Hd, syndrome, out.marginals, config.osd_order, p)


Decoder = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def _default_decoder(config: DecoderConfig) -> Decoder:
    def decode(H: np.ndarray, s: np.ndarray, priors: np.ndarray) -> np.ndarray:
        cfg = DecoderConfig(config.bp_iters, config.osd_order, priors)
        return bp_osd_decode(H, s, cfg).to_dense()
    return decode


def decoder_distance(code, options: ProbeOptions | None = None, config: DecoderConfig | None = None,
                     basis: str = "Z", rep: int = 3, decoder: Decoder | None = None,
                     n_jobs: int = 1, max_time: float | None = None) -> DistanceResult:
    """Upper bound from decoding the syndrome ``(0, ..., 0, 1)`` on ``[H; x]``.

    Each iteration draws a random logical row ``x = b L`` with ``b != 0``,
    optionally adds a uniformly random combination of rows of ``H`` and
    permutes the columns.  A correction ``F`` has ``H F = 0`` and
    ``x F = 1``, so it flips some observable.  ``decoder`` may replace
    BP+OSD; it maps ``(H, syndrome, priors)`` to a correction.  Corrections
    failing the extended syndrome are discarded and counted in ``trace``.
    """
    options = options or ProbeOptions()
    config = config or DecoderConfig()
    deadline = Deadline(max_time)
    dem = as_detector_model(code, basis, rep)
    if dem.num_observables == 0:
        raise NoResultError("model has no observables")
    H, L = dem.H.to_dense(), dem.L.to_dense()
    r, m = H.shape
    k = L.shape[0]
    if dem.p is not None:
        priors = np.minimum(dem.p, 0.5)
    else:
        priors = config.prior_vector(m)
    decode = decoder or _default_decoder(config)
    target = np.zeros(r + 1, np.uint8)
    target[r] = 1

    def trial(i: int):
        if deadline.expired():
            return None
        rng = np.random.default_rng([0 if options.seed is None else options.seed, i])
        b = np.zeros(k, np.uint8)
        while not b.any():
            b = rng.integers(0, 2, k, dtype=np.uint8)
        x = (b.astype(np.int64) @ L) % 2
        if options.add_random_stabilisers and r:
            a = rng.integers(0, 2, r)
            x = (x + a @ H) % 2
        perm = rng.permutation(m) if options.permute_columns else np.arange(m)
        ext = np.vstack([H, x[None, :]]).astype(np.uint8)[:, perm]
        try:
            Fp = np.asarray(decode(ext, target, priors[perm]), dtype=np.uint8)
        except ValueError:
            return "fail"
        F = np.zeros(m, np.uint8)
        F[perm] = Fp
        if ((ext.astype(np.int64) @ Fp) % 2 != target).any():
            return "fail"
        e = BitVector.from_dense(F)
        if not dem.is_undetectable_logical(e):
            raise AssertionError("correction does not flip an observable")
        return dem.error_weight(e), e

    stats = TrialStats()
    discarded = 0
    best = None
    with ThreadPoolExecutor(max_workers=n_jobs) if n_jobs > 1 else _Serial() as pool:
        batch = max(1, 4 * n_jobs)
        for start in range(0, options.iters, batch):
            outs = list(pool.map(trial, range(start, min(options.iters, start + batch))))
            stop = False
            for out in outs:
                if out is None:
                    stop = True
                    break
                if out == "fail":
                    discarded += 1
                    continue
                w, e = out
                if w < stats.min_weight:
                    best = e
                stats.record(w, [e.data.tobytes()])
            if stop or deadline.expired():
                break
    trace = [("discarded", discarded)]
    if best is None:
        if stats.iter_count == 0 and discarded == 0:
            return DistanceResult(Status.TIMEOUT, 1, INF, None, deadline.elapsed(), "decoder", stats, trace)
        raise NoResultError("decoder never produced a valid correction")
    ub = int(stats.min_weight)
    witness = dem.to_pauli(best)
    return DistanceResult(Status.UPPER_ONLY, 1, ub, witness, deadline.elapsed(), "decoder", stats, trace)


class _Serial:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    def map(self, fn, it):
        return map(fn, it)

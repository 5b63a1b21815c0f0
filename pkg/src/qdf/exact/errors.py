"""Exact distances by enumerating errors on detector error models."""
from __future__ import annotations

import numpy as np

from .. import _kernels as _k
from ..codes import as_detector_model
from ..dem import DetectorModel
from ..gf2 import BitMatrix, BitVector
from ..results import INF, Deadline, DistanceResult, NoResultError, Status

CHUNK = 1 << 16


def _columns(dem: DetectorModel) -> tuple[np.ndarray, np.ndarray]:
    """Columns of ``H`` and ``L`` as packed rows."""
    Hc = dem.H.T if dem.num_detectors else BitMatrix.zeros(dem.num_errors, 1)
    Lc = dem.L.T if dem.num_observables else BitMatrix.zeros(dem.num_errors, 1)
    return np.ascontiguousarray(Hc.data), np.ascontiguousarray(Lc.data)


def _prepare(code, basis: str, rep: int) -> DetectorModel:
    dem = as_detector_model(code, basis, rep)
    if dem.rep == 2:
        raise ValueError("error enumeration needs a three- or four-block model, not two-block")
    if dem.num_observables == 0:
        raise NoResultError("model has no observables")
    return dem


def _verified(dem: DetectorModel, support, method: str, elapsed: float, status=Status.EXACT) -> DistanceResult:
    e = BitVector.from_indices(dem.num_errors, support)
    if not dem.is_undetectable_logical(e):
        raise AssertionError("reconstructed witness is not an undetectable logical error")
    d = dem.error_weight(e)
    lower = d if status is Status.EXACT else 1
    return DistanceResult(status, lower, d, e, elapsed, method)


def exhaustive_error_distance(code, basis: str = "Z", rep: int = 3,
                              max_time: float | None = None) -> DistanceResult:
    """Try every error of weight 1, 2, ... until one is an undetectable logical."""
    deadline = Deadline(max_time)
    dem = _prepare(code, basis, rep)
    Hc, Lc = _columns(dem)
    m = dem.num_errors
    for w in range(1, m + 1):
        c = np.zeros(w + 3, np.int64)
        _k.rd_init(c, w, m)
        sacc = np.bitwise_xor.reduce(Hc[:w], axis=0)
        lacc = np.bitwise_xor.reduce(Lc[:w], axis=0)
        state = np.zeros(3, np.int64)
        while not state[1]:
            _k.error_chunk(Hc, Lc, w, c, sacc, lacc, CHUNK, state)
            if state[2]:
                return _verified(dem, c[1 : w + 1].tolist(), "error-exhaustive", deadline.elapsed())
            if not state[1] and deadline.expired():
                lower = -(-w // dem.weight_divisor)
                return DistanceResult(Status.BOUNDS, lower, INF, None, deadline.elapsed(), "error-exhaustive")
    raise NoResultError("no undetectable logical error exists")


def _keys(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    return a.view(np.dtype((np.void, a.dtype.itemsize * a.shape[1]))).ravel()


def meet_in_middle_distance(code, basis: str = "Z", rep: int = 3, max_time: float | None = None,
                            max_items: int = 20_000_000) -> DistanceResult:
    """Split each candidate weight into two halves and collide their syndromes.

    For weight ``w`` the halves have weights ``ceil(w/2)`` and ``floor(w/2)``;
    a syndrome shared by errors with opposite parity on some observable
    gives an undetectable logical of weight at most ``w``.
    """
    deadline = Deadline(max_time)
    dem = _prepare(code, basis, rep)
    Hc, Lc = _columns(dem)
    m = dem.num_errors
    cache: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = {}

    def level(w: int):
        if w not in cache:
            syn, obs, sup = _k.weight_syndromes(Hc, Lc, w, max_items)
            if syn.shape[0] == 0:
                return None
            cache[w] = (_keys(syn), obs, sup, syn)
        return cache[w]

    bounds = lambda w: DistanceResult(Status.BOUNDS, -(-w // dem.weight_divisor), INF, None,
                                      deadline.elapsed(), "mitm")
    for lb in range(1, m + 1):
        w1 = (lb + 1) // 2
        w2 = lb - w1
        A = level(w1)
        if A is None:
            return bounds(lb)
        if w2 == 0:
            # weight one: a single column that is itself a logical error
            for i in range(A[0].shape[0]):
                if not A[3][i].any() and A[1][i].any():
                    return _verified(dem, A[2][i].tolist(), "mitm", deadline.elapsed())
            continue
        B = level(w2)
        if B is None:
            return bounds(lb)
        for j in range(dem.num_observables):
            word, bit = j >> 6, np.uint64(1) << np.uint64(j & 63)
            pa = (A[1][:, word] & bit) != 0
            pb = (B[1][:, word] & bit) != 0
            for p in (0, 1):
                ka = A[0][pa == bool(p)]
                kb = B[0][pb != bool(p)]
                common = np.intersect1d(ka, kb)
                if common.size:
                    ia = np.flatnonzero((A[0] == common[0]) & (pa == bool(p)))[0]
                    ib = np.flatnonzero((B[0] == common[0]) & (pb != bool(p)))[0]
                    support = set(A[2][ia].tolist()) ^ set(B[2][ib].tolist())
                    return _verified(dem, sorted(support), "mitm", deadline.elapsed())
            if deadline.expired():
                return bounds(lb)
    raise NoResultError("no undetectable logical error exists")


def connected_cluster_distance(code, basis: str = "Z", rep: int = 3, max_time: float | None = None,
                               restrict_support: int | None = None, transitive: bool = False,
                               max_frontier: int = 2_000_000) -> DistanceResult:
    """Grow error supports one neighbouring column at a time.

    Two columns are neighbours when they share a detector.  With
    ``restrict_support`` every support contains that column; the answer is
    only an upper bound unless the caller declares the code ``transitive``.
    """
    deadline = Deadline(max_time)
    dem = _prepare(code, basis, rep)
    m = dem.num_errors
    Hd = dem.H.to_dense().astype(np.int64)
    Ld = dem.L.to_dense()
    syn = [int.from_bytes(np.packbits(Hd[:, j], bitorder="little").tobytes(), "little") for j in range(m)]
    obs = [int.from_bytes(np.packbits(Ld[:, j], bitorder="little").tobytes(), "little") for j in range(m)]
    adj = Hd.T @ Hd
    neighbours = [frozenset(np.flatnonzero(adj[j]).tolist()) - {j} for j in range(m)]
    if restrict_support is not None:
        if not 0 <= restrict_support < m:
            raise ValueError("restrict_support column out of range")
        frontier = {(restrict_support,): (syn[restrict_support], obs[restrict_support])}
    else:
        frontier = {(j,): (syn[j], obs[j]) for j in range(m)}
    w = 1
    while frontier:
        for support, (s, o) in frontier.items():
            if s == 0 and o != 0:
                status = Status.EXACT if restrict_support is None or transitive else Status.UPPER_ONLY
                return _verified(dem, support, "cluster", deadline.elapsed(), status)
        if deadline.expired():
            return DistanceResult(Status.TIMEOUT, -(-(w + 1) // dem.weight_divisor), INF, None,
                                  deadline.elapsed(), "cluster")
        nxt: dict[tuple[int, ...], tuple[int, int]] = {}
        for support, (s, o) in frontier.items():
            members = set(support)
            reach = set()
            for j in support:
                reach |= neighbours[j]
            for j in reach - members:
                key = tuple(sorted(members | {j}))
                if key not in nxt:
                    nxt[key] = (s ^ syn[j], o ^ obs[j])
            if len(nxt) > max_frontier:
                return DistanceResult(Status.TIMEOUT, -(-(w + 1) // dem.weight_divisor), INF, None,
                                      deadline.elapsed(), "cluster")
        frontier = nxt
        w += 1
    raise NoResultError("no connected undetectable logical error exists")

"""Truncated searches for undetectable logical errors on detector error models.

States are pairs (active detectors, flipped observables).  A state is
extended only by errors touching its lowest active detector, since any
completion must cancel that detector.  Search proceeds breadth first so
the first logical error found is the lightest one reachable under the
truncation limits.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import as_detector_model
from .dem import DetectorModel
from .gf2 import BitVector
from .results import Deadline, DistanceResult, NoResultError, Status


@dataclass(frozen=True)
class UESearchParams:
    """Truncation limits.

    ``max_edge_degree``: errors flipping more detectors are ignored.
    ``max_active``: states with more active detectors are dropped.
    ``no_increase``: skip extensions that grow the active set.
    """

    max_edge_degree: int
    max_active: int
    no_increase: bool = False

    def __post_init__(self) -> None:
        if self.max_active < 2:
            raise ValueError("max_active must be at least 2")


def _bitmask(column: np.ndarray) -> int:
    return int.from_bytes(np.packbits(column, bitorder="little").tobytes(), "little")


def _search(dem: DetectorModel, params: UESearchParams, deadline: Deadline,
            max_states: int) -> list[int] | None:
    H, L = dem.H.to_dense(), dem.L.to_dense()
    m = dem.num_errors
    degree = H.sum(axis=0)
    usable = [j for j in range(m) if degree[j] <= params.max_edge_degree]
    syn = {j: _bitmask(H[:, j]) for j in usable}
    obs = {j: _bitmask(L[:, j]) for j in usable}
    touching: dict[int, list[int]] = {}
    for j in usable:
        for d in np.flatnonzero(H[:, j]):
            touching.setdefault(int(d), []).append(j)

    parent: dict[tuple[int, int], tuple[tuple[int, int] | None, int]] = {}
    frontier = []
    for j in usable:
        state = (syn[j], obs[j])
        if state[0] == 0:
            if state[1]:
                return [j]
            continue
        if state[0].bit_count() > params.max_active or state in parent:
            continue
        parent[state] = (None, j)
        frontier.append(state)

    def path(state: tuple[int, int], last: int) -> list[int]:
        out = [last]
        while state is not None:
            prev, j = parent[state]
            out.append(j)
            state = prev
        return out

    while frontier:
        if deadline.expired():
            raise TimeoutError
        nxt = []
        for state in frontier:
            s, o = state
            size = s.bit_count()
            d = (s & -s).bit_length() - 1
            for j in touching.get(d, ()):
                ns = s ^ syn[j]
                no = o ^ obs[j]
                if ns == 0:
                    if no:
                        return path(state, j)
                    continue
                nsize = ns.bit_count()
                if nsize > params.max_active or (params.no_increase and nsize > size):
                    continue
                key = (ns, no)
                if key in parent:
                    continue
                parent[key] = (state, j)
                nxt.append(key)
            if len(parent) > max_states:
                raise MemoryError("state budget exceeded")
        frontier = nxt
    return None


def _result(dem: DetectorModel, steps: list[int], status: Status, deadline: Deadline, method: str) -> DistanceResult:
    support = sorted({j for j in steps if steps.count(j) % 2})
    e = BitVector.from_indices(dem.num_errors, support)
    if not dem.is_undetectable_logical(e):
        raise AssertionError("search path is not an undetectable logical error")
    d = dem.error_weight(e)
    return DistanceResult(status, d if status is Status.EXACT else 1, d, e, deadline.elapsed(), method)


def undetectable_error_search(code, params: UESearchParams, basis: str = "Z", rep: int = 3,
                              max_time: float | None = None, max_states: int = 5_000_000) -> DistanceResult:
    """Lightest undetectable logical error reachable under ``params``.

    Raises :class:`NoResultError` when the truncated space holds none.
    """
    deadline = Deadline(max_time)
    dem = _model(code, basis, rep)
    return _run(dem, params, deadline, max_states, "ue-search")


def _model(code, basis: str, rep: int) -> DetectorModel:
    dem = as_detector_model(code, basis, rep)
    if dem.num_errors == 0 or dem.num_detectors == 0 and dem.num_observables == 0:
        raise ValueError("empty detector error model")
    if dem.rep == 2:
        raise ValueError("undetectable-error search needs a three- or four-block model")
    return dem


def _run(dem, params, deadline, max_states, method, exact_if: bool = False) -> DistanceResult:
    try:
        steps = _search(dem, params, deadline, max_states)
    except TimeoutError:
        return DistanceResult(Status.TIMEOUT, 1, float("inf"), None, deadline.elapsed(), method)
    if steps is None:
        raise NoResultError(f"no logical error reachable with {params}")
    return _result(dem, steps, Status.EXACT if exact_if else Status.UPPER_ONLY, deadline, method)


def ge_search(code, basis: str = "Z", rep: int = 3, max_time: float | None = None) -> DistanceResult:
    """Graph-like search: errors and active sets of at most two detectors.

    Exact when every error flips at most two detectors.
    """
    dem = _model(code, basis, rep)
    graphlike = bool(np.all(dem.H.to_dense().sum(axis=0) <= 2))
    return _run(dem, UESearchParams(2, 2), Deadline(max_time), 5_000_000, "ge", exact_if=graphlike)


def cc_search(code, basis: str = "Z", rep: int = 3, max_time: float | None = None) -> DistanceResult:
    """Search tuned for colour codes, where errors flip up to three detectors."""
    dem = _model(code, basis, rep)
    return _run(dem, UESearchParams(3, 3), Deadline(max_time), 5_000_000, "cc")


def ue_search(code, basis: str = "Z", rep: int = 3, max_time: float | None = None,
              max_active_ceiling: int = 8) -> DistanceResult:
    """Raise the active-set limit from 2 until the same distance appears twice."""
    deadline = Deadline(max_time)
    dem = _model(code, basis, rep)
    last = None
    best = None
    for s_max in range(2, max_active_ceiling + 1):
        params = UESearchParams(dem.num_detectors or 1, s_max)
        try:
            steps = _search(dem, params, deadline, 5_000_000)
        except (TimeoutError, MemoryError):
            break
        if steps is None:
            last = None
            continue
        res = _result(dem, steps, Status.UPPER_ONLY, deadline, "ue")
        if best is None or res.d_upper < best.d_upper:
            best = res
        if last is not None and res.d_upper == last:
            break
        last = res.d_upper
    if best is None:
        if deadline.expired():
            return DistanceResult(Status.TIMEOUT, 1, float("inf"), None, deadline.elapsed(), "ue")
        raise NoResultError("no logical error reachable up to the active-set ceiling")
    best.elapsed = deadline.elapsed()
    return best

"""Detector error models: container, text parser/writer and basis filter."""
from __future__ import annotations

import re
import warnings
from typing import Callable, Mapping, Sequence

import numpy as np

from .gf2 import BitMatrix, BitVector


class DemParseError(ValueError):
    pass


class DetectorModel:
    """Detector matrix ``H`` and observable matrix ``L`` over the same error columns.

    ``rep`` records how columns relate to qubits when the model was built
    from a stabiliser code (2, 3 or 4 blocks of ``n_qubits`` columns); it
    selects the weight function and the map from errors back to Paulis.
    """

    def __init__(self, H: BitMatrix, L: BitMatrix, p: Sequence[float] | None = None,
                 coords: Mapping[int, tuple[float, ...]] | None = None, name: str = "",
                 rep: int | None = None, n_qubits: int | None = None):
        if H.cols != L.cols:
            raise ValueError(f"H has {H.cols} columns but L has {L.cols}")
        if p is not None:
            p = np.asarray(p, dtype=float)
            if p.shape != (H.cols,):
                raise ValueError("need one probability per error")
            if np.any((p <= 0) | (p > 0.5)):
                raise ValueError("error probabilities must lie in (0, 0.5]")
        if rep not in (None, 2, 3, 4):
            raise ValueError("rep must be 2, 3, 4 or None")
        if rep is not None:
            if n_qubits is None or H.cols != rep * n_qubits:
                raise ValueError("block layout needs n_qubits with rep * n_qubits columns")
        self.H, self.L, self.p = H, L, p
        self.coords = dict(coords or {})
        self.name, self.rep, self.n_qubits = name, rep, n_qubits

    @property
    def num_detectors(self) -> int:
        return self.H.rows

    @property
    def num_errors(self) -> int:
        return self.H.cols

    @property
    def num_observables(self) -> int:
        return self.L.rows

    @property
    def weight_divisor(self) -> int:
        return 2 if self.rep == 4 else 1

    def error_weight(self, e: BitVector) -> int:
        if self.rep == 2:
            d = e.to_dense()
            n = self.n_qubits
            return int(np.count_nonzero(d[:n] | d[n:]))
        return e.weight() // self.weight_divisor

    def to_pauli(self, e: BitVector) -> BitVector:
        """Map an error vector to its two-block Pauli (identity for plain models)."""
        if self.rep is None or self.rep == 2:
            return e
        from .codes import from_block

        return from_block(BitMatrix.from_rows([e], e.n), self.rep, strict=False).row(0)

    def costs(self) -> np.ndarray:
        """Per-error cost ``log((1-p)/p)``, or all ones without probabilities."""
        if self.p is None:
            return np.ones(self.num_errors)
        return np.log((1 - self.p) / self.p)

    def is_undetectable_logical(self, e: BitVector) -> bool:
        return not (self.H.to_dense() @ e.to_dense() % 2).any() and bool((self.L.to_dense() @ e.to_dense() % 2).any())

    def select_errors(self, cols: Sequence[int]) -> "DetectorModel":
        cols = list(cols)
        p = None if self.p is None else self.p[cols]
        return DetectorModel(self.H.select_columns(cols), self.L.select_columns(cols), p,
                             self.coords, self.name)

    def __repr__(self) -> str:
        return (f"DetectorModel(name={self.name!r}, detectors={self.num_detectors}, "
                f"errors={self.num_errors}, observables={self.num_observables})")


_LINE = re.compile(r"^([a-z_]+)(?:\[[^\]]*\])?(?:\(([^)]*)\))?\s*(.*)$")


def _combine(p1: float, p2: float) -> float:
    return p1 * (1 - p2) + p2 * (1 - p1)


def parse_dem(text: str, merge: bool = True, name: str = "") -> DetectorModel:
    """Parse the detector-error-model text subset.

    Supported: ``error(p) D.. L..``, ``detector(c..) D..``,
    ``logical_observable L..``, ``shift_detectors(c..) k`` and ``#``
    comments.  Columns follow first appearance; with ``merge`` errors with
    identical targets are combined as independent flips.
    """
    det_offset = 0
    coord_offset: list[float] = []
    columns: dict[tuple, int] = {}
    dets_list: list[tuple[int, ...]] = []
    obs_list: list[tuple[int, ...]] = []
    probs: list[float] = []
    coords: dict[int, tuple[float, ...]] = {}
    n_det = 0
    n_obs = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise DemParseError(f"line {lineno}: cannot parse {raw!r}")
        instr, args, rest = m.group(1), m.group(2), m.group(3).split()
        try:
            nums = [float(a) for a in args.split(",")] if args and args.strip() else []
        except ValueError as exc:
            raise DemParseError(f"line {lineno}: bad arguments {args!r}") from exc
        if instr == "error":
            if len(nums) != 1 or not 0 < nums[0] < 1:
                raise DemParseError(f"line {lineno}: error probability must lie in (0, 1)")
            dets, obs = set(), set()
            for tok in rest:
                if tok == "^":
                    continue
                target = _target(tok, lineno)
                kind, idx = target
                if kind == "D":
                    idx += det_offset
                    if idx in dets:
                        raise DemParseError(f"line {lineno}: detector D{idx} repeated in one error")
                    dets.add(idx)
                    n_det = max(n_det, idx + 1)
                else:
                    if idx in obs:
                        raise DemParseError(f"line {lineno}: observable L{idx} repeated in one error")
                    obs.add(idx)
                    n_obs = max(n_obs, idx + 1)
            key = (tuple(sorted(dets)), tuple(sorted(obs)))
            if merge and key in columns:
                j = columns[key]
                probs[j] = _combine(probs[j], nums[0])
            else:
                columns.setdefault(key, len(probs))
                dets_list.append(key[0])
                obs_list.append(key[1])
                probs.append(nums[0])
        elif instr == "detector":
            for tok in rest:
                kind, idx = _target(tok, lineno)
                if kind != "D":
                    raise DemParseError(f"line {lineno}: detector instruction takes D targets")
                idx += det_offset
                c = list(nums)
                for i, off in enumerate(coord_offset[: len(c)]):
                    c[i] += off
                if c:
                    coords[idx] = tuple(c)
                n_det = max(n_det, idx + 1)
        elif instr == "logical_observable":
            for tok in rest:
                kind, idx = _target(tok, lineno)
                if kind != "L":
                    raise DemParseError(f"line {lineno}: logical_observable takes L targets")
                n_obs = max(n_obs, idx + 1)
        elif instr == "shift_detectors":
            if len(coord_offset) < len(nums):
                coord_offset += [0.0] * (len(nums) - len(coord_offset))
            for i, v in enumerate(nums):
                coord_offset[i] += v
            if rest:
                try:
                    det_offset += int(rest[0])
                except ValueError as exc:
                    raise DemParseError(f"line {lineno}: bad shift {rest[0]!r}") from exc
        else:
            raise DemParseError(f"line {lineno}: unsupported instruction {instr!r}")
    m = len(probs)
    Hd = np.zeros((n_det, m), np.uint8)
    Ld = np.zeros((n_obs, m), np.uint8)
    for j, (ds, os_) in enumerate(zip(dets_list, obs_list)):
        Hd[list(ds), j] = 1
        Ld[list(os_), j] = 1
    H = BitMatrix.from_dense(Hd) if n_det else BitMatrix.zeros(0, m)
    L = BitMatrix.from_dense(Ld) if n_obs else BitMatrix.zeros(0, m)
    try:
        return DetectorModel(H, L, np.array(probs) if m else None, coords, name=name)
    except ValueError as exc:
        raise DemParseError(str(exc)) from exc


def _target(tok: str, lineno: int) -> tuple[str, int]:
    if len(tok) < 2 or tok[0] not in "DL" or not tok[1:].isdigit():
        raise DemParseError(f"line {lineno}: bad target {tok!r}")
    return tok[0], int(tok[1:])


def _fmt_num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def format_dem(dem: DetectorModel, default_p: float = 0.01) -> str:
    """Write a model back to text; ``default_p`` fills in missing probabilities."""
    lines = []
    Hd, Ld = dem.H.to_dense(), dem.L.to_dense()
    for j in range(dem.num_errors):
        p = default_p if dem.p is None else float(dem.p[j])
        targets = [f"D{i}" for i in np.flatnonzero(Hd[:, j])] + [f"L{i}" for i in np.flatnonzero(Ld[:, j])]
        lines.append(f"error({p!r}) " + " ".join(targets))
    for i in range(dem.num_detectors):
        if i in dem.coords:
            c = ", ".join(_fmt_num(v) for v in dem.coords[i])
            lines.append(f"detector({c}) D{i}")
        else:
            lines.append(f"detector D{i}")
    for i in range(dem.num_observables):
        lines.append(f"logical_observable L{i}")
    return "\n".join(lines) + "\n"


def chromobius_basis(coord: tuple[float, ...]) -> str:
    """Basis from the fourth coordinate: 0-2 are X-type, 3-5 Z-type."""
    if len(coord) < 4:
        raise ValueError(f"coordinate {coord} has no basis entry")
    c = int(coord[3])
    if c in (0, 1, 2):
        return "X"
    if c in (3, 4, 5):
        return "Z"
    raise ValueError(f"unrecognised basis label {coord[3]}")


def filter_dem(dem: DetectorModel, desired_basis: str,
               coord_basis: Callable[[tuple[float, ...]], str] = chromobius_basis) -> DetectorModel:
    """Keep detectors of one basis and the errors seen only by them.

    Errors that touch neither a kept detector nor an observable are dropped.
    """
    desired = desired_basis.upper()
    keep_det = []
    for i in range(dem.num_detectors):
        if i not in dem.coords:
            raise ValueError(f"detector D{i} has no coordinates")
        if coord_basis(dem.coords[i]).upper() == desired:
            keep_det.append(i)
    keep_set = set(keep_det)
    Hd, Ld = dem.H.to_dense(), dem.L.to_dense()
    keep_err = []
    pure_only: set[int] = set()
    other_only: set[int] = set()
    for j in range(dem.num_errors):
        support = set(np.flatnonzero(Hd[:, j]).tolist())
        flips = set(np.flatnonzero(Ld[:, j]).tolist())
        if support and support <= keep_set:
            pure_only |= flips
        elif support and not (support & keep_set):
            other_only |= flips
        if support <= keep_set and (support or flips):
            keep_err.append(j)
    both = pure_only & other_only
    if both:
        warnings.warn(f"observables {sorted(both)} are flipped by errors of both bases", stacklevel=2)
    H = BitMatrix.from_dense(Hd[np.ix_(keep_det, keep_err)]) if keep_det else BitMatrix.zeros(0, len(keep_err))
    L = BitMatrix.from_dense(Ld[:, keep_err]) if dem.num_observables else BitMatrix.zeros(0, len(keep_err))
    p = None if dem.p is None else dem.p[keep_err]
    coords = {new: dem.coords[old] for new, old in enumerate(keep_det)}
    return DetectorModel(H, L, p, coords, name=dem.name)


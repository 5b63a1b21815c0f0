"""Exact distances by enumerating codewords.

Every code type is first turned into a :class:`CodewordSpace`: a full-rank
generator ``G`` whose row combinations are the candidate codewords, and a
tail ``T`` whose combination is nonzero exactly for nontrivial ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable

import numpy as np

from .. import _kernels as _k
from ..codes import ClassicalCode, CssCode, StabiliserCode, dem_from_code, from_block, omega, to_block
from ..dem import DetectorModel
from ..gf2 import BitMatrix, BitVector, kernel_basis, row_basis, rref_ordered, vstack
from ..results import INF, Deadline, DistanceResult, NoResultError, Status

DEFAULT_BUDGET = 2**32
CHUNK = 1 << 16


@dataclass
class CodewordSpace:
    G: BitMatrix
    T: BitMatrix | None
    mode: int  # 0: Hamming weight, 1: symplectic weight on 2n columns
    n: int
    divisor: int
    to_witness: Callable[[BitVector], BitVector]

    @property
    def rank(self) -> int:
        return self.G.rows

    def weight(self, v: BitVector) -> int:
        if self.mode == 1:
            return int(_k.symplectic_weight(v.data, self.n))
        return v.weight()


def _identity(v: BitVector) -> BitVector:
    return v


def _tail(G: BitMatrix, partner: BitMatrix) -> BitMatrix:
    return BitMatrix.from_dense(_k.parity_products(G.data, partner.data))


def codeword_space(code, basis: str = "Z", rep: int = 3) -> CodewordSpace:
    """Candidate codewords for ``code``; see the module docstring."""
    if isinstance(code, ClassicalCode):
        G = row_basis(code.G)
        if G.rows == 0:
            raise ValueError("empty code")
        return CodewordSpace(G, None, 0, code.n, 1, _identity)
    if isinstance(code, CssCode):
        b = basis.upper()
        if b not in ("X", "Z"):
            raise ValueError(f"basis must be X or Z, got {basis!r}")
        trivial, logical, partner = (code.HZ, code.LZ, code.LX) if b == "Z" else (code.HX, code.LX, code.LZ)
        G = vstack([row_basis(trivial), logical]) if trivial.rows else logical
        return CodewordSpace(G, _tail(G, partner), 0, code.n, 1, _identity)
    if isinstance(code, StabiliserCode):
        n = code.n
        stacked = vstack([row_basis(code.S), code.L])
        tail = BitMatrix.from_dense(
            (stacked.to_dense().astype(np.int64) @ omega(code.L).to_dense().T.astype(np.int64)) & 1)
        if rep == 2:
            return CodewordSpace(stacked, tail, 1, n, 1, _identity)
        if rep == 3:
            G3 = to_block(stacked, 3)
            back = lambda v: from_block(BitMatrix.from_rows([v], v.n), 3).row(0)
            return CodewordSpace(G3, tail, 0, n, 2, back)
        if rep == 4:
            dem = dem_from_code(code, rep=4)
            space = codeword_space(dem)
            space.to_witness = dem.to_pauli
            return space
        raise ValueError("rep must be 2, 3 or 4")
    if isinstance(code, DetectorModel):
        K = kernel_basis(code.H)
        if code.rep == 2:
            return CodewordSpace(K, _tail(K, code.L), 1, code.n_qubits, 1, _identity)
        return CodewordSpace(K, _tail(K, code.L), 0, code.num_errors, code.weight_divisor, _identity)
    raise TypeError(f"unsupported code type {type(code).__name__}")


def _arrays(space: CodewordSpace):
    G = np.ascontiguousarray(space.G.data)
    if space.T is None:
        return G, np.zeros((G.shape[0], 1), np.uint64), False
    return G, np.ascontiguousarray(space.T.data), True


def _full_mask(cols: int) -> np.ndarray:
    return BitVector.from_dense(np.ones(cols, np.uint8)).data


# exhaustive enumeration


def exhaustive_distance(code, basis: str = "Z", rep: int = 3, budget: int = DEFAULT_BUDGET,
                        max_time: float | None = None) -> DistanceResult:
    """Minimum weight over every nontrivial codeword, visited in Gray-code order."""
    deadline = Deadline(max_time)
    space = code if isinstance(code, CodewordSpace) else codeword_space(code, basis, rep)
    r = space.rank
    if 2**r > budget:
        raise ValueError(f"span has 2^{r} vectors, above the enumeration budget {budget}")
    G, T, has_tail = _arrays(space)
    acc = np.zeros(G.shape[1], np.uint64)
    tacc = np.zeros(T.shape[1], np.uint64)
    best = np.array([np.iinfo(np.int64).max], np.int64)
    best_vec = np.zeros_like(acc)
    mask = _full_mask(space.G.cols)
    step = 1
    total = 1 << r
    while step < total:
        step = _k.span_chunk(G, T, has_tail, mask, space.mode, space.n, step, CHUNK, acc, tacc,
                             best, best_vec, np.zeros(0, np.int64))
        if step < total and deadline.expired():
            if best[0] == np.iinfo(np.int64).max:
                return DistanceResult(Status.TIMEOUT, 1, INF, None, deadline.elapsed(), "exhaustive")
            d = best[0] // space.divisor
            w = space.to_witness(BitVector(best_vec, space.G.cols))
            return DistanceResult(Status.UPPER_ONLY, 1, d, w, deadline.elapsed(), "exhaustive")
    if best[0] == np.iinfo(np.int64).max:
        raise NoResultError("code has no nontrivial codewords")
    d = int(best[0]) // space.divisor
    w = space.to_witness(BitVector(best_vec, space.G.cols))
    return DistanceResult(Status.EXACT, d, d, w, deadline.elapsed(), "exhaustive")


# weight enumerators


@dataclass
class WeightEnumerator:
    """``coeffs[w]`` counts codewords of weight ``w``; length ``n``."""

    coeffs: list[int]
    n: int

    def __post_init__(self) -> None:
        self.coeffs = [int(c) for c in self.coeffs] + [0] * (self.n + 1 - len(self.coeffs))

    @property
    def size(self) -> int:
        return sum(self.coeffs)

    def as_dict(self) -> dict[int, int]:
        return {w: c for w, c in enumerate(self.coeffs) if c}

    def __sub__(self, other: "WeightEnumerator") -> "WeightEnumerator":
        if self.n != other.n:
            raise ValueError("length mismatch")
        return WeightEnumerator([a - b for a, b in zip(self.coeffs, other.coeffs)], self.n)

    def min_weight(self) -> int | None:
        """Smallest nonzero weight with a positive coefficient."""
        return next((w for w in range(1, self.n + 1) if self.coeffs[w] > 0), None)


def weight_enumerator(G: BitMatrix, symplectic: bool = False, budget: int = DEFAULT_BUDGET) -> WeightEnumerator:
    B = row_basis(G) if G.rows else G
    if 2**B.rows > budget:
        raise ValueError(f"span has 2^{B.rows} vectors, above the enumeration budget {budget}")
    n = G.cols // 2 if symplectic else G.cols
    out = np.zeros(n + 1, np.int64)
    _k.span_weight_counts(np.ascontiguousarray(B.data), 1 if symplectic else 0, n, out)
    return WeightEnumerator(out.tolist(), n)


def macwilliams(WH: WeightEnumerator, variant: str = "classical") -> WeightEnumerator:
    """Enumerator of the (symplectic) dual from the enumerator of a code."""
    q = {"classical": 1, "quantum": 3}.get(variant)
    if q is None:
        raise ValueError("variant must be 'classical' or 'quantum'")
    n = WH.n
    size = WH.size
    out = []
    for j in range(n + 1):
        total = 0
        for w, c in enumerate(WH.coeffs):
            if not c:
                continue
            s = 0
            for i in range(max(0, j - (n - w)), min(w, j) + 1):
                s += comb(n - w, j - i) * q ** (j - i) * comb(w, i) * (-1) ** i
            total += c * s
        if total % size:
            raise ValueError("transform is not integral; enumerator is inconsistent")
        out.append(total // size)
    return WeightEnumerator(out, n)


def _dual_counts(checks: BitMatrix, symplectic: bool, budget: int) -> WeightEnumerator:
    if checks.rows == 0:
        n = checks.cols // 2 if symplectic else checks.cols
        return macwilliams(WeightEnumerator([1], n), "quantum" if symplectic else "classical")
    return macwilliams(weight_enumerator(checks, symplectic, budget), "quantum" if symplectic else "classical")


def distance_via_macwilliams(code, basis: str = "Z", budget: int = DEFAULT_BUDGET) -> DistanceResult:
    """Distance from weight enumerators, transforming the smaller side."""
    deadline = Deadline()
    divisor = 1
    if isinstance(code, ClassicalCode):
        if code.k <= code.n - code.k:
            WG = weight_enumerator(code.G, budget=budget)
        else:
            WG = macwilliams(weight_enumerator(code.H, budget=budget))
        d = WG.min_weight()
    elif isinstance(code, StabiliserCode):
        WS = weight_enumerator(code.S, symplectic=True, budget=budget)
        d = (macwilliams(WS, "quantum") - WS).min_weight()
    elif isinstance(code, CssCode):
        checks, trivial = (code.HX, code.HZ) if basis.upper() == "Z" else (code.HZ, code.HX)
        W = _dual_counts(checks, False, budget) - weight_enumerator(trivial, budget=budget)
        d = W.min_weight()
    elif isinstance(code, DetectorModel):
        sym = code.rep == 2
        H, HL = code.H, vstack([code.H, code.L])
        if sym:
            H, HL = omega(H), omega(HL)
        d = (_dual_counts(H, sym, budget) - _dual_counts(HL, sym, budget)).min_weight()
        divisor = code.weight_divisor
    else:
        raise TypeError(f"unsupported code type {type(code).__name__}")
    if d is None:
        raise NoResultError("code has no nontrivial codewords")
    d //= divisor
    return DistanceResult(Status.EXACT, d, d, None, deadline.elapsed(), "macwilliams")


# information sets and Brouwer-Zimmermann


@dataclass
class InfoSetBasis:
    GList: list[BitMatrix]
    ISList: list[list[int]]
    kList: list[int]
    TList: list[BitMatrix | None] = field(default_factory=list)


def _info_sets_once(C: BitMatrix, clist: list[int]):
    mats, sets = [], []
    remaining = list(clist)
    R = C
    while remaining:
        R, piv = rref_ordered(R, remaining)
        if not piv:
            break
        mats.append(R)
        sets.append(piv)
        done = set(piv)
        remaining = [c for c in remaining if c not in done]
    return mats, sets


def is_basis(G: BitMatrix, attempts: int = 10, seed: int | None = 0,
             columns: list[int] | None = None, tail: BitMatrix | None = None) -> InfoSetBasis:
    """Disjoint information sets covering the nonzero columns of ``G``.

    The first attempt uses natural column order and the rest random orders;
    the basis with fewest sets (then largest total size) wins, earliest
    first on ties.  ``columns`` limits which columns may be pivots and
    ``tail`` is carried through the row operations.
    """
    if G.is_zero():
        raise ValueError("generator matrix is zero")
    cols = columns if columns is not None else list(range(G.cols))
    d = G.to_dense()
    nz = [c for c in cols if d[:, c].any()]
    C = G if tail is None else BitMatrix.from_dense(np.hstack([d, tail.to_dense()]))
    rng = np.random.default_rng(seed)
    best = None
    for a in range(max(1, attempts)):
        order = nz if a == 0 else [nz[i] for i in rng.permutation(len(nz))]
        mats, sets = _info_sets_once(C, order)
        key = (len(sets), -sum(len(s) for s in sets))
        if best is None or key < best[0]:
            best = (key, mats, sets)
    _, mats, sets = best
    r = len(sets[0])
    glist, tlist = [], []
    for M in mats:
        dm = M.to_dense()[:r]
        glist.append(BitMatrix.from_dense(dm[:, : G.cols]))
        tlist.append(None if tail is None else BitMatrix.from_dense(dm[:, G.cols :]))
    return InfoSetBasis(glist, sets, [len(s) for s in sets], tlist)


def detect_evenness(G: BitMatrix) -> int:
    """Largest of 8, 4, 2 dividing every codeword weight, else 1."""
    d = G.to_dense().astype(np.int64)
    w = d.sum(axis=1)
    if np.any(w % 2):
        return 1
    P = d @ d.T
    if np.any(w % 4) or np.any(P % 2):
        return 2
    if np.any(w % 8) or np.any(P % 4):
        return 4
    r = d.shape[0]
    for i in range(r):
        for j in range(i + 1, r):
            if np.any((d[i] * d[j]) @ d[j + 1 :].T % 2):
                return 4
    return 8


_EVENNESS = {"none": 1, "even": 2, "doubly-even": 4, "triply-even": 8}


def bz_distance(code, max_time: float | None = None, evenness: str = "auto", basis: str = "Z",
                rep: int = 3, attempts: int = 10, seed: int | None = 0) -> DistanceResult:
    """Brouwer-Zimmermann search over disjoint information sets.

    Returns ``Exact`` once the upper bound meets the lower bound, or
    ``Bounds``/``Timeout`` when ``max_time`` runs out first.  The result's
    ``trace`` lists ``(t, set index, LB, UB)`` after every round.
    """
    deadline = Deadline(max_time)
    space = code if isinstance(code, CodewordSpace) else codeword_space(code, basis, rep)
    r = space.rank
    if r == 0:
        raise ValueError("empty code")
    if evenness == "auto":
        mod = detect_evenness(space.G) if space.mode == 0 else 1
    elif evenness in _EVENNESS:
        mod = _EVENNESS[evenness]
    else:
        raise ValueError(f"unknown evenness option {evenness!r}")
    ib = is_basis(space.G, attempts=attempts, seed=seed, tail=space.T)
    klist = ib.kList
    s = len(klist)

    def as_weight(lb_ham: int) -> int:
        lb = -(-lb_ham // mod) * mod
        if space.mode == 1:
            lb = -(-lb // 2)
        return lb

    def conv(lb_raw: int) -> int:
        # lower bound on the reported distance
        return -(-as_weight(lb_raw) // space.divisor)

    def t_star(ub: float) -> int:
        for t in range(1, r + 1):
            if as_weight(sum(max(0, t + 1 - r + k) for k in klist)) >= ub:
                return t
        return r

    mask = _full_mask(space.G.cols)
    big = np.iinfo(np.int64).max
    best = np.array([big], np.int64)
    best_vec = np.zeros(space.G.data.shape[1], np.uint64)
    has_tail = space.T is not None
    mats = []
    for i in range(s):
        G = np.ascontiguousarray(ib.GList[i].data)
        T = np.ascontiguousarray(ib.TList[i].data) if has_tail else np.zeros((r, 1), np.uint64)
        mats.append((G, T))
    m_list = [0] * s
    trace: list[tuple[int, int, int, float]] = []
    tmax = r

    def finish(status: Status, lb_raw: int) -> DistanceResult:
        ub = INF if best[0] == big else int(best[0]) // space.divisor
        lb = ub if status is Status.EXACT else min(conv(lb_raw), ub)
        w = None if best[0] == big else space.to_witness(BitVector(best_vec.copy(), space.G.cols))
        if status is Status.BOUNDS and ub == INF:
            status = Status.TIMEOUT
        return DistanceResult(status, lb, ub, w, deadline.elapsed(), "bz", trace=trace)

    for t in range(1, r + 1):
        for i in range(s):
            k = klist[i]
            if tmax + 1 - r + k <= 0:
                continue
            G, T = mats[i]
            c = np.zeros(t + 3, np.int64)
            _k.rd_init(c, t, r)
            acc = np.bitwise_xor.reduce(G[:t], axis=0)
            tacc = np.bitwise_xor.reduce(T[:t], axis=0)
            state = np.zeros(3, np.int64)
            while True:
                before = best[0]
                _k.subset_chunk(G, T, has_tail, mask, space.mode, space.n, t, c, acc, tacc,
                                CHUNK, best, best_vec, mod, state)
                if state[2]:
                    raise ValueError(f"codeword weight not divisible by {mod}; evenness assumption is wrong")
                if best[0] < before:
                    tmax = t_star(best[0])
                if state[1]:
                    break
                if deadline.expired():
                    return finish(Status.BOUNDS, sum(m_list))
            m_list[i] = max(0, t + 1 - r + k)
            lb_raw = sum(m_list)
            trace.append((t, i, conv(lb_raw), INF if best[0] == big else int(best[0]) // space.divisor))
            if best[0] != big and best[0] <= as_weight(lb_raw):
                return finish(Status.EXACT, lb_raw)
    if best[0] == big:
        raise NoResultError("code has no nontrivial codewords")
    return finish(Status.EXACT, sum(m_list))

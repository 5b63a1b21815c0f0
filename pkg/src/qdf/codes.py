"""Classical and stabiliser code containers and the maps between representations."""
from __future__ import annotations

from enum import IntEnum

import numpy as np

from .dem import DetectorModel
from .gf2 import BitMatrix, BitVector, hstack, kernel_basis, rank, rref_ordered, vstack


class BlockRep(IntEnum):
    TWO = 2
    THREE = 3
    FOUR = 4


# Pauli vectors in two-block (x|z) form


def _halves(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if v.shape[-1] % 2:
        raise ValueError("two-block vectors have even length")
    n = v.shape[-1] // 2
    return v[..., :n], v[..., n:]


def symplectic_product(a: BitVector, b: BitVector) -> int:
    """``a Ω bᵀ`` for two-block vectors: 1 when the Paulis anticommute."""
    if a.n != b.n:
        raise ValueError("length mismatch")
    ax, az = _halves(a.to_dense())
    bx, bz = _halves(b.to_dense())
    return int((ax @ bz + az @ bx) & 1)


def symplectic_weight(v: BitVector) -> int:
    x, z = _halves(v.to_dense())
    return int(np.count_nonzero(x | z))


def omega(M: BitMatrix) -> BitMatrix:
    """Swap the X and Z halves of every row."""
    x, z = _halves(M.to_dense())
    return BitMatrix.from_dense(np.hstack([z, x]))


def symplectic_products(A: BitMatrix, B: BitMatrix) -> np.ndarray:
    """Matrix of pairwise symplectic products between rows of ``A`` and ``B``."""
    return (A.to_dense().astype(np.int64) @ omega(B).to_dense().T.astype(np.int64)) & 1


def to_block(M: BitMatrix, rep: int) -> BitMatrix:
    """Map two-block rows to the two-, three- or four-block representation."""
    rep = BlockRep(rep)
    if rep is BlockRep.TWO:
        return M.copy()
    x, z = _halves(M.to_dense())
    if rep is BlockRep.THREE:
        return BitMatrix.from_dense(np.hstack([x, z, x ^ z]))
    y = x & z
    return BitMatrix.from_dense(np.hstack([x ^ y, y, z ^ y, x | z]))


def from_block(M: BitMatrix, rep: int, strict: bool = True) -> BitMatrix:
    """Inverse of :func:`to_block`.

    With ``strict`` a four-block row whose last block is not the union of
    the first three supports is rejected.  Without it the linear inverse is
    applied, which is what maps code-space vectors back to Paulis.
    """
    rep = BlockRep(rep)
    d = M.to_dense()
    if d.shape[1] % int(rep):
        raise ValueError(f"column count {d.shape[1]} is not a multiple of {int(rep)}")
    n = d.shape[1] // int(rep)
    blocks = [d[:, i * n : (i + 1) * n] for i in range(int(rep))]
    if rep is BlockRep.TWO:
        return M.copy()
    if rep is BlockRep.THREE:
        a, b, c = blocks
        return BitMatrix.from_dense(np.hstack([b ^ c, a ^ c]))
    a, b, c, e = blocks
    if strict and not np.array_equal(e, a | b | c):
        bad = int(np.flatnonzero((e != (a | b | c)).any(axis=1))[0])
        raise ValueError(f"row {bad} is not a valid four-block vector: last block must be the support")
    return BitMatrix.from_dense(np.hstack([a ^ b, c ^ b]))


def complementary_basis(H: BitMatrix) -> BitMatrix:
    """Unit vectors on the non-pivot columns of ``H``; stacked with ``H`` they span everything."""
    _, piv = rref_ordered(H)
    free = [c for c in range(H.cols) if c not in set(piv)]
    out = np.zeros((len(free), H.cols), np.uint8)
    out[np.arange(len(free)), free] = 1
    return BitMatrix.from_dense(out)


def _extend_to_complement(base: BitMatrix, candidates: BitMatrix) -> list[np.ndarray]:
    """Rows of ``candidates`` that extend ``base`` to the span of both."""
    cur = base.copy()
    r = rank(cur)
    chosen = []
    for i in range(candidates.rows):
        trial = vstack([cur, candidates.select_rows([i])])
        rt = rank(trial)
        if rt > r:
            cur, r = trial, rt
            chosen.append(candidates.to_dense()[i])
    return chosen


def check_commuting(S: BitMatrix) -> None:
    P = symplectic_products(S, S)
    bad = np.argwhere(P)
    if bad.size:
        i, j = bad[0]
        raise ValueError(f"stabiliser rows {int(i)} and {int(j)} anticommute")


def logical_basis(S: BitMatrix) -> BitMatrix:
    """Logical operators for the stabiliser group generated by ``S``.

    Returns ``2k`` rows ordered ``X̄_1..X̄_k, Z̄_1..Z̄_k`` with
    ``X̄_i`` anticommuting with ``Z̄_i`` only.
    """
    check_commuting(S)
    n2 = S.cols
    normaliser = kernel_basis(omega(S)) if S.rows else BitMatrix.identity(n2)
    base = S if S.rows else BitMatrix.zeros(0, n2)
    work = [row.astype(np.uint8) for row in _extend_to_complement(base, normaliser)]
    om = lambda a, b: int((a[: n2 // 2] @ b[n2 // 2 :] + a[n2 // 2 :] @ b[: n2 // 2]) & 1)
    xs, zs = [], []
    while work:
        a = work.pop(0)
        j = next((i for i, b in enumerate(work) if om(a, b)), None)
        if j is None:
            raise ValueError("logical candidates are degenerate; stabiliser matrix is inconsistent")
        b = work.pop(j)
        cleaned = []
        for c in work:
            c = c ^ (a * om(c, b)) ^ (b * om(c, a))
            cleaned.append(c)
        work = cleaned
        xs.append(a)
        zs.append(b)
    if not xs:
        return BitMatrix.zeros(0, n2)
    return BitMatrix.from_dense(np.array(xs + zs, dtype=np.uint8))


def css_logicals(HX: BitMatrix, HZ: BitMatrix) -> tuple[BitMatrix, BitMatrix]:
    """Paired ``(LX, LZ)`` with ``LX·LZᵀ = I``."""
    n = HX.cols
    zcand = _extend_to_complement(HZ, kernel_basis(HX))
    xcand = _extend_to_complement(HX, kernel_basis(HZ))
    if len(zcand) != len(xcand):
        raise ValueError("X and Z logical counts differ; check matrices are not a CSS pair")
    if not zcand:
        return BitMatrix.zeros(0, n), BitMatrix.zeros(0, n)
    LX = np.array(xcand, dtype=np.uint8)
    LZ = np.array(zcand, dtype=np.uint8)
    P = (LX.astype(np.int64) @ LZ.T.astype(np.int64)) & 1
    LX = (_gf2_inverse(P).astype(np.int64) @ LX.astype(np.int64)) & 1
    return BitMatrix.from_dense(LX.astype(np.uint8)), BitMatrix.from_dense(LZ)


def _gf2_inverse(P: np.ndarray) -> np.ndarray:
    k = P.shape[0]
    aug = BitMatrix.from_dense(np.hstack([P.astype(np.uint8), np.eye(k, dtype=np.uint8)]))
    R, piv = rref_ordered(aug, range(k))
    if len(piv) < k:
        raise ValueError("logical pairing matrix is singular")
    return R.to_dense()[:, k:]


class ClassicalCode:
    """Binary linear code given by a generator matrix, a check matrix or both."""

    def __init__(self, G: BitMatrix | None = None, H: BitMatrix | None = None, name: str = ""):
        if G is None and H is None:
            raise ValueError("need a generator or a check matrix")
        self.name = name
        if G is not None and H is not None:
            if G.cols != H.cols:
                raise ValueError("G and H have different lengths")
            if not (G @ H.T).is_zero():
                raise ValueError("G·Hᵀ is not zero")
            if rank(G) + rank(H) != G.cols:
                raise ValueError("rank(G) + rank(H) must equal n")
        self._G = G
        self._H = H

    @property
    def n(self) -> int:
        return (self._G if self._G is not None else self._H).cols

    @property
    def G(self) -> BitMatrix:
        if self._G is None:
            self._G = kernel_basis(self._H)
        return self._G

    @property
    def H(self) -> BitMatrix:
        if self._H is None:
            self._H = kernel_basis(self._G)
        return self._H

    @property
    def k(self) -> int:
        return rank(self.G)

    def __repr__(self) -> str:
        return f"ClassicalCode(name={self.name!r}, n={self.n}, k={self.k})"


class StabiliserCode:
    """Stabiliser code in two-block form ``S = [H_X | H_Z]``."""

    def __init__(self, S: BitMatrix, L: BitMatrix | None = None, name: str = ""):
        if S.cols % 2:
            raise ValueError("stabiliser matrix must have 2n columns")
        check_commuting(S)
        if L is not None:
            if L.cols != S.cols:
                raise ValueError("logical basis has the wrong length")
            if L.rows and np.any(symplectic_products(S, L)):
                raise ValueError("logical operators do not commute with the stabilisers")
            r = rank(S)
            if rank(vstack([S, L]) if L.rows else S) != S.cols - r:
                raise ValueError("logical operators and stabilisers must span the normaliser")
        self.S = S
        self.name = name
        self._L = L

    @property
    def n(self) -> int:
        return self.S.cols // 2

    @property
    def k(self) -> int:
        return self.n - rank(self.S)

    @property
    def L(self) -> BitMatrix:
        if self._L is None:
            self._L = logical_basis(self.S)
        return self._L

    def is_css(self) -> bool:
        n = self.n
        d = self.S.to_dense()
        return rank(self.S) == rank(BitMatrix.from_dense(d[:, :n])) + rank(BitMatrix.from_dense(d[:, n:]))

    def to_css(self) -> "CssCode":
        """Split into X-only and Z-only generators; fails for non-CSS codes."""
        if not self.is_css():
            raise ValueError("code is not CSS")
        n = self.n
        # pivot Z columns first: rows left without a Z pivot are X-only
        R, piv = rref_ordered(self.S, list(range(n, 2 * n)) + list(range(n)))
        d = R.to_dense()[: len(piv)]
        xonly = d[~d[:, n:].any(axis=1), :n]
        R2, piv2 = rref_ordered(self.S, list(range(n)) + list(range(n, 2 * n)))
        d2 = R2.to_dense()[: len(piv2)]
        zonly = d2[~d2[:, :n].any(axis=1), n:]
        return CssCode(BitMatrix.from_dense(xonly.reshape(-1, n)), BitMatrix.from_dense(zonly.reshape(-1, n)), name=self.name)

    def __repr__(self) -> str:
        return f"StabiliserCode(name={self.name!r}, n={self.n}, k={self.k})"


class CssCode:
    """CSS code with X checks ``HX`` and Z checks ``HZ``."""

    def __init__(self, HX: BitMatrix, HZ: BitMatrix, LX: BitMatrix | None = None,
                 LZ: BitMatrix | None = None, name: str = ""):
        if HX.cols != HZ.cols:
            raise ValueError("HX and HZ have different lengths")
        if HX.rows and HZ.rows and not (HX @ HZ.T).is_zero():
            raise ValueError("HX·HZᵀ is not zero")
        if (LX is None) != (LZ is None):
            raise ValueError("give both LX and LZ or neither")
        if LX is not None:
            if HX.rows and not (HX @ LZ.T).is_zero():
                raise ValueError("HX·LZᵀ is not zero")
            if HZ.rows and not (HZ @ LX.T).is_zero():
                raise ValueError("HZ·LXᵀ is not zero")
            if LX.rows != LZ.rows or rank(LX @ LZ.T) != LX.rows:
                raise ValueError("LX·LZᵀ must have full rank")
        self.HX, self.HZ, self.name = HX, HZ, name
        self._LX, self._LZ = LX, LZ

    @property
    def n(self) -> int:
        return self.HX.cols

    @property
    def k(self) -> int:
        return self.n - rank(self.HX) - rank(self.HZ)

    def _logicals(self) -> None:
        if self._LX is None:
            self._LX, self._LZ = css_logicals(self.HX, self.HZ)

    @property
    def LX(self) -> BitMatrix:
        self._logicals()
        return self._LX

    @property
    def LZ(self) -> BitMatrix:
        self._logicals()
        return self._LZ

    def to_stabiliser(self) -> StabiliserCode:
        n = self.n
        zx = BitMatrix.zeros(self.HX.rows, n)
        zz = BitMatrix.zeros(self.HZ.rows, n)
        S = vstack([hstack([self.HX, zx]), hstack([zz, self.HZ])])
        L = vstack([hstack([self.LX, BitMatrix.zeros(self.LX.rows, n)]),
                    hstack([BitMatrix.zeros(self.LZ.rows, n), self.LZ])])
        return StabiliserCode(S, L, name=self.name)

    def __repr__(self) -> str:
        return f"CssCode(name={self.name!r}, n={self.n}, k={self.k})"


def dem_from_code(code, basis: str = "Z", rep: int = 3) -> DetectorModel:
    """Detector and observable matrices built straight from a code.

    Classical codes use ``H`` with a complementary basis as observables.
    For CSS codes the Z distance uses ``(HX, LX)`` and the X distance
    ``(HZ, LZ)``.  Stabiliser codes use the chosen block representation.
    """
    if isinstance(code, ClassicalCode):
        H = code.H
        return DetectorModel(H, complementary_basis(H), name=code.name)
    if isinstance(code, CssCode):
        b = basis.upper()
        if b == "Z":
            return DetectorModel(code.HX, code.LX, name=code.name)
        if b == "X":
            return DetectorModel(code.HZ, code.LZ, name=code.name)
        raise ValueError(f"basis must be X or Z, got {basis!r}")
    if isinstance(code, StabiliserCode):
        rep = BlockRep(rep)
        S, L, n = code.S, code.L, code.n
        if rep is BlockRep.TWO:
            return DetectorModel(omega(S), omega(L), name=code.name, rep=2, n_qubits=n)
        if rep is BlockRep.THREE:
            return DetectorModel(to_block(S, 3), to_block(L, 3), name=code.name, rep=3, n_qubits=n)
        eye = np.eye(n, dtype=np.uint8)
        H4 = vstack([to_block(S, 4), BitMatrix.from_dense(np.hstack([eye] * 4))])
        return DetectorModel(H4, to_block(L, 4), name=code.name, rep=4, n_qubits=n)
    raise TypeError(f"cannot build a detector model from {type(code).__name__}")


def as_detector_model(obj, basis: str = "Z", rep: int = 3) -> DetectorModel:
    """Pass detector models through; build one from any code type."""
    if isinstance(obj, DetectorModel):
        return obj
    return dem_from_code(obj, basis=basis, rep=rep)

"""Bit-packed linear algebra over GF(2)."""
from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels as _k


def _words(ncols: int) -> int:
    return max(1, (ncols + 63) >> 6)


def _pack(dense: np.ndarray) -> np.ndarray:
    dense = np.ascontiguousarray(dense, dtype=np.uint8)
    rows, cols = dense.shape
    w = _words(cols)
    if rows == 0:
        return np.zeros((0, w), np.uint64)
    padded = np.zeros((rows, w * 64), np.uint8)
    padded[:, :cols] = dense & 1
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False).reshape(rows, w)


def _unpack(data: np.ndarray, cols: int) -> np.ndarray:
    rows = data.shape[0]
    if rows == 0:
        return np.zeros((0, cols), np.uint8)
    raw = np.ascontiguousarray(data.astype("<u8", copy=False)).view(np.uint8).reshape(rows, -1)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :cols].copy()


def _parse_bits(s: str) -> list[int]:
    bits = [int(ch) for ch in s if ch in "01"]
    if any(ch not in "01|,_ \t" for ch in s):
        raise ValueError(f"not a 0/1 row string: {s!r}")
    return bits


class BitVector:
    """Fixed-length binary vector packed into 64-bit words."""

    __slots__ = ("data", "n")

    def __init__(self, data: np.ndarray, n: int):
        self.data = np.ascontiguousarray(data, dtype=np.uint64)
        self.n = int(n)

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(np.zeros(_words(n), np.uint64), n)

    @classmethod
    def from_dense(cls, bits: Sequence[int] | np.ndarray) -> "BitVector":
        arr = np.asarray(bits, dtype=np.uint8).reshape(1, -1)
        return cls(_pack(arr)[0], arr.shape[1])

    @classmethod
    def from_indices(cls, n: int, idx: Iterable[int]) -> "BitVector":
        dense = np.zeros(n, np.uint8)
        dense[list(idx)] = 1
        return cls.from_dense(dense)

    @classmethod
    def from_string(cls, s: str) -> "BitVector":
        return cls.from_dense(_parse_bits(s))

    def to_dense(self) -> np.ndarray:
        return _unpack(self.data.reshape(1, -1), self.n)[0]

    def support(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.to_dense())]

    def weight(self) -> int:
        return int(np.bitwise_count(self.data).sum())

    def dot(self, other: "BitVector") -> int:
        return int(np.bitwise_count(self.data & other.data).sum()) & 1

    def __xor__(self, other: "BitVector") -> "BitVector":
        return BitVector(self.data ^ other.data, self.n)

    def __and__(self, other: "BitVector") -> "BitVector":
        return BitVector(self.data & other.data, self.n)

    def __or__(self, other: "BitVector") -> "BitVector":
        return BitVector(self.data | other.data, self.n)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return int((int(self.data[i >> 6]) >> (i & 63)) & 1)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BitVector) and self.n == other.n and bool(np.array_equal(self.data, other.data))

    def __hash__(self) -> int:
        return hash((self.n, self.data.tobytes()))

    def __bool__(self) -> bool:
        return bool(self.data.any())

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.to_dense())

    def __repr__(self) -> str:
        return f"BitVector('{self.to_string()}')"


class BitMatrix:
    """Binary matrix with rows packed into 64-bit words.

    Padding bits past ``cols`` are always zero, so word-level XOR, AND and
    popcount give correct row operations and weights.
    """

    __slots__ = ("data", "cols")

    def __init__(self, data: np.ndarray, cols: int):
        data = np.ascontiguousarray(data, dtype=np.uint64)
        if data.ndim != 2:
            raise ValueError("packed data must be two-dimensional")
        if data.shape[1] != _words(cols):
            raise ValueError("word count does not match column count")
        self.data = data
        self.cols = int(cols)

    # construction
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(np.zeros((rows, _words(cols)), np.uint64), cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, arr) -> "BitMatrix":
        a = np.asarray(arr)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        if a.size and not np.all((a == 0) | (a == 1)):
            raise ValueError("matrix entries must be 0 or 1")
        return cls(_pack(a.astype(np.uint8)), a.shape[1])

    @classmethod
    def from_strings(cls, rows: Sequence[str], cols: int | None = None) -> "BitMatrix":
        parsed = [_parse_bits(r) for r in rows]
        if not parsed:
            return cls.zeros(0, cols or 0)
        lengths = {len(p) for p in parsed}
        if len(lengths) != 1:
            raise ValueError("rows have different lengths")
        width = lengths.pop()
        if cols is not None and width != cols:
            raise ValueError(f"expected {cols} columns, got {width}")
        return cls.from_dense(np.array(parsed, dtype=np.uint8).reshape(len(parsed), width))

    @classmethod
    def from_rows(cls, rows: Sequence[BitVector], cols: int) -> "BitMatrix":
        if not rows:
            return cls.zeros(0, cols)
        return cls(np.stack([r.data for r in rows]), cols)

    # shape and access
    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> np.ndarray:
        return _unpack(self.data, self.cols)

    def to_strings(self) -> list[str]:
        return ["".join("1" if b else "0" for b in row) for row in self.to_dense()]

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.data.copy(), self.cols)

    def row(self, i: int) -> BitVector:
        return BitVector(self.data[i].copy(), self.cols)

    def __getitem__(self, i: int) -> BitVector:
        return self.row(i)

    def __iter__(self):
        for i in range(self.rows):
            yield self.row(i)

    def __len__(self) -> int:
        return self.rows

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.shape == other.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __repr__(self) -> str:
        if self.rows * self.cols <= 400:
            return f"BitMatrix({self.to_strings()!r})"
        return f"BitMatrix(<{self.rows}x{self.cols}>)"

    def row_weights(self) -> np.ndarray:
        return np.bitwise_count(self.data).sum(axis=1).astype(np.int64)

    def select_rows(self, idx) -> "BitMatrix":
        return BitMatrix(self.data[np.asarray(idx, dtype=np.int64)], self.cols)

    def select_columns(self, idx) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense()[:, np.asarray(idx, dtype=np.int64)])

    def nonzero_columns(self) -> list[int]:
        acc = np.bitwise_or.reduce(self.data, axis=0) if self.rows else np.zeros(self.data.shape[1], np.uint64)
        return BitVector(acc, self.cols).support()

    @property
    def T(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return matmul(self, other)

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return BitMatrix(self.data ^ other.data, self.cols)

    def is_zero(self) -> bool:
        return not self.data.any()


def hstack(mats: Sequence[BitMatrix]) -> BitMatrix:
    rows = {m.rows for m in mats}
    if len(rows) != 1:
        raise ValueError("row counts differ")
    return BitMatrix.from_dense(np.hstack([m.to_dense() for m in mats]))


def vstack(mats: Sequence[BitMatrix]) -> BitMatrix:
    cols = {m.cols for m in mats}
    if len(cols) != 1:
        raise ValueError("column counts differ")
    return BitMatrix(np.vstack([m.data for m in mats]), cols.pop())


def matmul(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    if A.cols != B.rows:
        raise ValueError(f"cannot multiply {A.shape} by {B.shape}")
    prod = A.to_dense().astype(np.int64) @ B.to_dense().astype(np.int64)
    return BitMatrix.from_dense((prod & 1).astype(np.uint8))


def dot(u: BitVector, v: BitVector) -> int:
    if u.n != v.n:
        raise ValueError("length mismatch")
    return u.dot(v)


def rref_ordered(M: BitMatrix, clist: Sequence[int] | None = None) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form pivoting only on ``clist``, in the given order.

    Returns the reduced matrix and the pivot columns, where pivot ``i`` is
    the leading column of row ``i``.
    """
    if clist is None:
        clist = range(M.cols)
    cl = np.asarray(list(clist), dtype=np.int64)
    if cl.size and (cl.min() < 0 or cl.max() >= M.cols):
        raise ValueError("column index out of range")
    if len(set(cl.tolist())) != cl.size:
        raise ValueError("column list has duplicates")
    R = M.data.copy()
    piv = _k.rref_inplace(R, cl)
    return BitMatrix(R, M.cols), [int(p) for p in piv]


def rank(M: BitMatrix) -> int:
    return len(rref_ordered(M)[1])


def row_basis(M: BitMatrix) -> BitMatrix:
    """Independent rows spanning the row space of ``M`` (reduced form)."""
    R, piv = rref_ordered(M)
    return R.select_rows(range(len(piv)))


def kernel_basis(M: BitMatrix, clist: Sequence[int] | None = None) -> BitMatrix:
    """Basis of the right kernel of ``M``, one row per non-pivot column.

    ``clist`` must contain an information set of ``M``; otherwise fewer
    pivots than ``rank(M)`` are found and a ``ValueError`` is raised.
    """
    if clist is None:
        clist = range(M.cols)
    clist = list(clist)
    R, piv = rref_ordered(M, clist)
    if len(clist) < M.cols and len(piv) < rank(M):
        raise ValueError("column list does not contain an information set")
    K = _k.kernel_from_rref(R.data, np.asarray(piv, dtype=np.int64), M.cols)
    return BitMatrix(K, M.cols)


def in_row_space(M: BitMatrix, v: BitVector) -> bool:
    return rank(vstack([M, BitMatrix.from_rows([v], M.cols)])) == rank(M)


def gray_iterate(G: BitMatrix, t: int | None, visit: Callable[[tuple[int, ...], BitVector], None]) -> int:
    """Visit linear combinations of the rows of ``G`` in Gray-code order.

    With ``t=None`` every nonzero combination is visited, each step adding a
    single row.  With an integer ``t`` the ``t``-row combinations are visited
    in revolving-door order, each step swapping one row for another.  The
    callback gets the sorted row indices and the combined vector.  Returns
    the number of row additions performed.
    """
    r = G.rows
    adds = 0
    acc = np.zeros(G.data.shape[1], np.uint64)
    if t is None:
        chosen: set[int] = set()
        for s in range(1, 1 << r):
            b = (s & -s).bit_length() - 1
            acc ^= G.data[b]
            adds += 1
            chosen ^= {b}
            visit(tuple(sorted(chosen)), BitVector(acc.copy(), G.cols))
        return adds
    if t < 0 or t > r:
        raise ValueError("t out of range")
    if t == 0:
        return 0
    c = np.zeros(t + 3, np.int64)
    _k.rd_init(c, t, r)
    for j in range(1, t + 1):
        acc ^= G.data[c[j]]
        adds += 1
    while True:
        visit(tuple(int(x) for x in sorted(c[1 : t + 1])), BitVector(acc.copy(), G.cols))
        o, i = _k.rd_next(c, t, r)
        if o < 0:
            return adds
        acc ^= G.data[o]
        acc ^= G.data[i]
        adds += 2

"""Compiled inner loops over bit-packed rows.

Every matrix handled here is a C-contiguous ``uint64`` array of shape
``(rows, words)``; column ``c`` lives in word ``c >> 6`` at bit ``c & 63``.
"""
from __future__ import annotations

import numpy as np
from numba import njit

_ONE = np.uint64(1)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True, inline="always")
def getbit(row, c):
    return (row[c >> 6] >> np.uint64(c & 63)) & _ONE


@njit(cache=True, inline="always")
def setbit(row, c):
    row[c >> 6] |= _ONE << np.uint64(c & 63)


@njit(cache=True)
def row_weight(row):
    s = 0
    for k in range(row.shape[0]):
        s += popcount(row[k])
    return s


@njit(cache=True)
def symplectic_weight(row, n):
    """Number of qubits ``q`` with bit ``q`` or bit ``n + q`` set."""
    s = 0
    for q in range(n):
        if getbit(row, q) | getbit(row, n + q):
            s += 1
    return s


@njit(cache=True)
def masked_weight(row, mask):
    s = 0
    for k in range(row.shape[0]):
        s += popcount(row[k] & mask[k])
    return s


@njit(cache=True, nogil=True)
def rref_inplace(M, clist):
    """Row reduce ``M`` over the columns listed in ``clist``, in that order.

    Returns the pivot column of each leading row.  Columns missing from
    ``clist`` are never used as pivots.
    """
    r = M.shape[0]
    w = M.shape[1]
    piv = np.empty(min(r, clist.shape[0]), np.int64)
    cur = 0
    for idx in range(clist.shape[0]):
        if cur >= r:
            break
        c = clist[idx]
        wd = c >> 6
        bit = _ONE << np.uint64(c & 63)
        i = cur
        while i < r and (M[i, wd] & bit) == 0:
            i += 1
        if i == r:
            continue
        if i != cur:
            for k in range(w):
                tmp = M[i, k]
                M[i, k] = M[cur, k]
                M[cur, k] = tmp
        for i2 in range(r):
            if i2 != cur and (M[i2, wd] & bit) != 0:
                for k in range(w):
                    M[i2, k] ^= M[cur, k]
        piv[cur] = c
        cur += 1
    return piv[:cur]


@njit(cache=True, nogil=True)
def kernel_from_rref(R, piv, ncols):
    """Kernel basis read off a reduced matrix, one row per non-pivot column."""
    s = piv.shape[0]
    w = (ncols + 63) >> 6
    is_piv = np.zeros(ncols, np.bool_)
    for i in range(s):
        is_piv[piv[i]] = True
    K = np.zeros((ncols - s, w), np.uint64)
    j = 0
    for q in range(ncols):
        if is_piv[q]:
            continue
        setbit(K[j], q)
        for i in range(s):
            if getbit(R[i], q):
                setbit(K[j], piv[i])
        j += 1
    return K


@njit(cache=True, nogil=True)
def kernel_perm(M, clist, ncols):
    R = M.copy()
    piv = rref_inplace(R, clist)
    return kernel_from_rref(R, piv, ncols)


@njit(cache=True, nogil=True)
def parity_products(A, B):
    """``C[i, j] = <A_i, B_j>`` over GF(2) as a ``uint8`` array."""
    C = np.zeros((A.shape[0], B.shape[0]), np.uint8)
    for i in range(A.shape[0]):
        for j in range(B.shape[0]):
            s = np.uint64(0)
            for k in range(A.shape[1]):
                s ^= A[i, k] & B[j, k]
            C[i, j] = popcount(s) & 1
    return C


@njit(cache=True, nogil=True)
def row_weights(K, mode, n):
    """Weights of every row; ``mode`` 0 Hamming, 1 symplectic on ``2n`` bits."""
    out = np.empty(K.shape[0], np.int64)
    for i in range(K.shape[0]):
        if mode == 0:
            out[i] = row_weight(K[i])
        else:
            out[i] = symplectic_weight(K[i], n)
    return out


@njit(cache=True, nogil=True)
def nontrivial_weights(K, L, mode, n):
    """Weight of each row of ``K`` with odd overlap with some row of ``L``; -1 otherwise."""
    out = np.full(K.shape[0], -1, np.int64)
    for i in range(K.shape[0]):
        hit = False
        for j in range(L.shape[0]):
            s = np.uint64(0)
            for k in range(K.shape[1]):
                s ^= K[i, k] & L[j, k]
            if popcount(s) & 1:
                hit = True
                break
        if hit:
            if mode == 0:
                out[i] = row_weight(K[i])
            else:
                out[i] = symplectic_weight(K[i], n)
    return out


# Revolving-door enumeration of t-subsets of {0..n-1}.  ``c`` has length
# t + 3 and is 1-indexed: c[1..t] the subset, c[t+1] = n, c[t+2] = 0.


@njit(cache=True)
def rd_init(c, t, n):
    for j in range(1, t + 1):
        c[j] = j - 1
    c[t + 1] = n
    c[t + 2] = 0


@njit(cache=True)
def rd_next(c, t, n):
    """Advance to the next subset; returns ``(out, in)`` or ``(-1, -1)`` at the end."""
    if t == 0 or t == n:
        return -1, -1
    if t == 1:
        if c[1] + 1 < n:
            c[1] += 1
            return c[1] - 1, c[1]
        return -1, -1
    if t & 1:
        if c[1] + 1 < c[2]:
            c[1] += 1
            return c[1] - 1, c[1]
        j = 2
        state = 4
    else:
        if c[1] > 0:
            c[1] -= 1
            return c[1] + 1, c[1]
        j = 2
        state = 5
    while True:
        if state == 4:
            if c[j] >= j:
                old = c[j]
                c[j] = c[j - 1]
                c[j - 1] = j - 2
                return old, j - 2
            j += 1
            state = 5
        else:
            if c[j] + 1 < c[j + 1]:
                old = c[j - 1]
                c[j - 1] = c[j]
                c[j] += 1
                return old, c[j]
            j += 1
            if j <= t:
                state = 4
            else:
                return -1, -1


@njit(cache=True)
def _evaluate(acc, tacc, mode, n, has_tail, wmask):
    """Weight of a candidate codeword, or -1 when it is trivial."""
    nz = False
    if has_tail:
        for k in range(tacc.shape[0]):
            if tacc[k] != 0:
                nz = True
                break
    else:
        for k in range(acc.shape[0]):
            if acc[k] != 0:
                nz = True
                break
    if not nz:
        return -1
    if mode == 0:
        return masked_weight(acc, wmask)
    return symplectic_weight(acc, n)


@njit(cache=True, nogil=True)
def subset_chunk(G, T, has_tail, wmask, mode, n, t, c, acc, tacc,
                 max_steps, best, best_vec, parity_mod, state):
    """Visit up to ``max_steps`` t-subsets of the rows of ``G``.

    ``acc``/``tacc`` hold the XOR of the current subset.  ``state[0]`` is 1
    once the current subset has been visited; ``state[1]`` is set when the
    enumeration is exhausted and ``state[2]`` when a weight breaks the
    promised divisibility.  Returns the number of subsets visited.
    """
    nrows = G.shape[0]
    steps = 0
    while steps < max_steps:
        if state[0] == 1:
            o, i_ = rd_next(c, t, nrows)
            if o < 0:
                state[1] = 1
                return steps
            for k in range(G.shape[1]):
                acc[k] ^= G[o, k] ^ G[i_, k]
            if has_tail:
                for k in range(T.shape[1]):
                    tacc[k] ^= T[o, k] ^ T[i_, k]
        state[0] = 1
        steps += 1
        w = _evaluate(acc, tacc, mode, n, has_tail, wmask)
        if w >= 0:
            if parity_mod > 1 and w % parity_mod != 0:
                state[2] = 1
            if w < best[0]:
                best[0] = w
                best_vec[:] = acc
    return steps


@njit(cache=True, inline="always")
def _ctz(x):
    k = 0
    while (x & 1) == 0:
        x >>= 1
        k += 1
    return k


@njit(cache=True, nogil=True)
def span_chunk(G, T, has_tail, wmask, mode, n, step0, max_steps, acc, tacc,
               best, best_vec, counts):
    """Reflected Gray-code sweep over the span of ``G`` from step ``step0``.

    Step ``s`` toggles row ``ctz(s)``.  When ``counts`` is non-empty it
    accumulates a histogram of nontrivial weights.  Returns the next step.
    """
    r = G.shape[0]
    total = np.int64(1) << r
    s = step0
    end = min(total, step0 + max_steps)
    want_counts = counts.shape[0] > 0
    while s < end:
        b = _ctz(s)
        for k in range(G.shape[1]):
            acc[k] ^= G[b, k]
        if has_tail:
            for k in range(T.shape[1]):
                tacc[k] ^= T[b, k]
        w = _evaluate(acc, tacc, mode, n, has_tail, wmask)
        if w >= 0:
            if want_counts:
                counts[w] += 1
            if w < best[0]:
                best[0] = w
                best_vec[:] = acc
        s += 1
    return s


@njit(cache=True, nogil=True)
def span_weight_counts(G, mode, n, out):
    """Weight histogram of every vector in the span of ``G`` (zero included)."""
    r = G.shape[0]
    acc = np.zeros(G.shape[1], np.uint64)
    out[0] += 1
    total = np.int64(1) << r
    for s in range(1, total):
        b = _ctz(s)
        for k in range(G.shape[1]):
            acc[k] ^= G[b, k]
        if mode == 0:
            out[row_weight(acc)] += 1
        else:
            out[symplectic_weight(acc, n)] += 1


@njit(cache=True, nogil=True)
def error_chunk(Hc, Lc, t, c, sacc, lacc, max_steps, state):
    """Visit up to ``max_steps`` weight-t column subsets looking for a logical error.

    ``Hc``/``Lc`` hold the columns of H and L as packed rows.  Sets
    ``state[2]`` and stops with ``c`` on the hit; ``state[1]`` marks the end.
    """
    m = Hc.shape[0]
    steps = 0
    while steps < max_steps:
        if state[0] == 1:
            o, i_ = rd_next(c, t, m)
            if o < 0:
                state[1] = 1
                return steps
            for k in range(Hc.shape[1]):
                sacc[k] ^= Hc[o, k] ^ Hc[i_, k]
            for k in range(Lc.shape[1]):
                lacc[k] ^= Lc[o, k] ^ Lc[i_, k]
        state[0] = 1
        steps += 1
        zero = True
        for k in range(sacc.shape[0]):
            if sacc[k] != 0:
                zero = False
                break
        if zero:
            for k in range(lacc.shape[0]):
                if lacc[k] != 0:
                    state[2] = 1
                    return steps
    return steps


@njit(cache=True, nogil=True)
def weight_syndromes(Hc, Lc, t, limit):
    """Syndromes, observable flips and supports of every weight-t error.

    Returns empty arrays when more than ``limit`` errors would be produced.
    """
    m = Hc.shape[0]
    total = 1
    for i in range(t):
        total = total * (m - i) // (i + 1)
    if total > limit:
        return (np.zeros((0, Hc.shape[1]), np.uint64), np.zeros((0, Lc.shape[1]), np.uint64),
                np.zeros((0, t), np.int32))
    syn = np.zeros((total, Hc.shape[1]), np.uint64)
    obs = np.zeros((total, Lc.shape[1]), np.uint64)
    sup = np.zeros((total, t), np.int32)
    c = np.zeros(t + 3, np.int64)
    rd_init(c, t, m)
    sacc = np.zeros(Hc.shape[1], np.uint64)
    lacc = np.zeros(Lc.shape[1], np.uint64)
    for j in range(1, t + 1):
        for k in range(Hc.shape[1]):
            sacc[k] ^= Hc[c[j], k]
        for k in range(Lc.shape[1]):
            lacc[k] ^= Lc[c[j], k]
    idx = 0
    while True:
        syn[idx] = sacc
        obs[idx] = lacc
        for j in range(t):
            sup[idx, j] = c[j + 1]
        idx += 1
        o, i_ = rd_next(c, t, m)
        if o < 0:
            break
        for k in range(Hc.shape[1]):
            sacc[k] ^= Hc[o, k] ^ Hc[i_, k]
        for k in range(Lc.shape[1]):
            lacc[k] ^= Lc[o, k] ^ Lc[i_, k]
    return syn, obs, sup

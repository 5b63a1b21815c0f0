import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from qdf import _kernels as _k
from qdf.gf2 import (BitMatrix, BitVector, gray_iterate, hstack, in_row_space, kernel_basis, rank,
                     row_basis, rref_ordered, vstack)

matrices = st.integers(1, 9).flatmap(
    lambda r: st.integers(1, 80).flatmap(lambda c: arrays(np.uint8, (r, c), elements=st.integers(0, 1))))


def test_bitvector_roundtrips():
    v = BitVector.from_string("1011_0001|01")
    assert v.to_string() == "1011000101"
    assert v.support() == [0, 2, 3, 7, 9]
    assert v.weight() == 5
    assert BitVector.from_indices(10, v.support()) == v
    assert (v ^ v).weight() == 0
    assert v.dot(BitVector.from_indices(10, [0, 2])) == 0
    assert v[9] == 1 and v[8] == 0


def test_bitvector_rejects_bad_characters():
    with pytest.raises(ValueError):
        BitVector.from_string("10a1")


def test_padding_bits_stay_zero():
    M = BitMatrix.from_dense(np.ones((3, 70), np.uint8))
    assert int(M.data[0, 1]) == (1 << 6) - 1
    assert list(M.row_weights()) == [70, 70, 70]


def test_from_dense_rejects_non_binary():
    with pytest.raises(ValueError):
        BitMatrix.from_dense([[0, 2]])


def test_zero_row_matrices():
    Z = BitMatrix.zeros(0, 5)
    assert Z.shape == (0, 5)
    assert Z.to_dense().shape == (0, 5)
    assert rank(Z) == 0
    assert kernel_basis(Z).rows == 5


def test_stacking_and_transpose():
    A = BitMatrix.from_strings(["101", "011"])
    B = BitMatrix.from_strings(["111"])
    assert vstack([A, B]).to_strings() == ["101", "011", "111"]
    assert hstack([A, A]).to_strings() == ["101101", "011011"]
    assert A.T.to_strings() == ["10", "01", "11"]
    assert (A @ A.T).to_strings() == ["01", "10"]


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rank_matches_oracle(M):
    assert rank(BitMatrix.from_dense(M)) == oracles.gf2_rank(M)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_kernel_is_annihilated_and_complete(M):
    B = BitMatrix.from_dense(M)
    K = kernel_basis(B)
    assert K.rows == M.shape[1] - oracles.gf2_rank(M)
    assert not ((M.astype(np.int64) @ K.to_dense().T.astype(np.int64)) % 2).any()
    assert rank(K) == K.rows


@settings(max_examples=40, deadline=None)
@given(matrices, st.randoms(use_true_random=False))
def test_rref_respects_column_order(M, rnd):
    cols = list(range(M.shape[1]))
    rnd.shuffle(cols)
    R, piv = rref_ordered(BitMatrix.from_dense(M), cols)
    D = R.to_dense()
    for i, c in enumerate(piv):
        assert D[:, c].sum() == 1 and D[i, c] == 1
    # pivots are the first independent columns in the given order
    seen = []
    for c in cols:
        if oracles.gf2_rank(M[:, seen + [c]]) > len(seen):
            seen.append(c)
    assert list(piv) == seen


def test_rref_rejects_bad_column_lists():
    M = BitMatrix.from_strings(["101"])
    with pytest.raises(ValueError):
        rref_ordered(M, [0, 0])
    with pytest.raises(ValueError):
        rref_ordered(M, [5])


def test_row_basis_and_membership():
    M = BitMatrix.from_strings(["110", "011", "101"])
    B = row_basis(M)
    assert B.rows == 2
    assert in_row_space(M, BitVector.from_string("101"))
    assert not in_row_space(M, BitVector.from_string("100"))


@pytest.mark.parametrize("n", range(1, 9))
def test_revolving_door_visits_every_subset_once(n):
    for t in range(1, n + 1):
        c = np.zeros(t + 3, np.int64)
        _k.rd_init(c, t, n)
        seen = {tuple(c[1 : t + 1])}
        prev = set(c[1 : t + 1])
        while True:
            out, inn = _k.rd_next(c, t, n)
            if out < 0:
                break
            cur = set(c[1 : t + 1])
            assert prev - cur == {out} and cur - prev == {inn}
            seen.add(tuple(sorted(cur)))
            prev = cur
        assert len(seen) == len(list(itertools.combinations(range(n), t)))


def test_gray_iterate_full_span_and_fixed_weight():
    G = BitMatrix.from_strings(["1100", "0110", "0011"])
    got = []
    adds = gray_iterate(G, None, lambda idx, v: got.append(v.to_string()))
    assert sorted(got) == sorted("".join(map(str, v)) for v in oracles.span(G.to_dense()) if any(v))
    assert adds == 7
    pairs = []
    gray_iterate(G, 2, lambda idx, v: pairs.append(tuple(idx)))
    assert sorted(pairs) == [(0, 1), (0, 2), (1, 2)]

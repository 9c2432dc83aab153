from __future__ import annotations

import numpy as np
from hypothesis import given, settings, strategies as st

from steenrod_ext.f2linalg import (
    BitMatrix,
    Echelon,
    kernel_basis,
    left_kernel_basis,
    mat_mul,
    pack_bits,
    rank,
    rref,
    same_row_space,
    solve,
    span_contains,
    unpack_bits,
)


def dense_matrices(max_rows=12, max_cols=150):
    return st.tuples(st.integers(0, max_rows), st.integers(0, max_cols), st.integers(0, 2**32 - 1)).map(
        lambda x: np.random.default_rng(x[2]).integers(0, 2, size=(x[0], x[1]), dtype=np.uint8))


def test_pack_roundtrip_across_word_boundary():
    m = np.zeros((3, 130), dtype=np.uint8)
    m[0, 0] = m[1, 63] = m[1, 64] = m[2, 129] = 1
    assert np.array_equal(unpack_bits(pack_bits(m), 130), m)


def test_identity_and_zero():
    assert rank(BitMatrix.identity(70)) == 70
    assert rank(BitMatrix.zeros(5, 9)) == 0
    assert BitMatrix.zeros(0, 4).shape == (0, 4)


def test_known_rank_and_kernel():
    m = BitMatrix.from_rows([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert rank(m) == 2
    k = kernel_basis(m)
    assert k.to_dense().tolist() == [[1, 1, 1]]


def test_solve_none_when_inconsistent():
    m = BitMatrix.from_rows([[1, 0], [1, 0]])
    assert solve(m, [1, 0]) is None
    assert solve(m, [1, 1]).tolist() == [1, 0]


def test_bitmatrix_is_immutable():
    m = BitMatrix.identity(3)
    try:
        m.words[0, 0] = 0
    except ValueError:
        pass
    else:
        raise AssertionError("words should be read-only")


@settings(max_examples=60, deadline=None)
@given(dense_matrices())
def test_rank_nullity(dense):
    m = BitMatrix.from_dense(dense) if dense.size else BitMatrix.zeros(*dense.shape)
    k = kernel_basis(m)
    assert rank(m) + k.n_rows == m.n_cols
    if k.n_rows:
        assert not mat_mul(dense, k.to_dense().T).any()


@settings(max_examples=60, deadline=None)
@given(dense_matrices())
def test_left_kernel_annihilates(dense):
    m = BitMatrix.from_dense(dense) if dense.size else BitMatrix.zeros(*dense.shape)
    lk = left_kernel_basis(m)
    assert lk.n_rows == m.n_rows - rank(m)
    if lk.n_rows and m.n_cols:
        assert not mat_mul(lk.to_dense(), dense).any()


@settings(max_examples=60, deadline=None)
@given(dense_matrices(), st.integers(0, 2**32 - 1))
def test_solve_recovers_image(dense, seed):
    if not dense.size:
        return
    x = np.random.default_rng(seed).integers(0, 2, size=dense.shape[1], dtype=np.uint8)
    rhs = mat_mul(dense, x.reshape(-1, 1)).reshape(-1)
    m = BitMatrix.from_dense(dense)
    sol = solve(m, rhs)
    assert sol is not None
    assert np.array_equal(mat_mul(dense, sol.reshape(-1, 1)).reshape(-1), rhs)


@settings(max_examples=40, deadline=None)
@given(dense_matrices(max_cols=90))
def test_rref_row_space_and_echelon(dense):
    if not dense.size:
        return
    m = BitMatrix.from_dense(dense)
    r, red, piv = rref(m)
    assert r == rank(m) == len(piv)
    if r:
        assert same_row_space(m, BitMatrix.from_dense(red.to_dense()[:r]))
    ech = Echelon(m.n_cols)
    added = sum(ech.add_many(m.words))
    assert added == r
    for i in range(m.n_rows):
        assert span_contains(m, dense[i])

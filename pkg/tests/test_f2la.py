import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from khtangle import f2la
from khtangle.f2la import BitMatrix, DimensionError
from khtangle.naive import _rank_mod2


@st.composite
def matrices(draw, max_rows=20, max_cols=140):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    seed = draw(st.integers(0, 2**32 - 1))
    density = draw(st.sampled_from([0.05, 0.3, 0.5, 0.9]))
    rng = np.random.default_rng(seed)
    return (rng.random((r, c)) < density).astype(np.uint8)


@given(matrices())
def test_pack_roundtrip(dense):
    assert np.array_equal(BitMatrix.from_dense(dense).to_dense(), dense)


@given(matrices())
def test_rank_matches_dense_oracle(dense):
    assert f2la.rank(BitMatrix.from_dense(dense)) == _rank_mod2(dense)


@given(matrices())
def test_rank_nullity_and_transpose(dense):
    m = BitMatrix.from_dense(dense)
    r = f2la.rank(m)
    assert r + f2la.kernel_basis(m).dim == m.cols
    assert f2la.rank(m.transpose()) == r
    assert f2la.image_basis(m).dim == r


@given(matrices())
def test_kernel_vectors_are_annihilated(dense):
    m = BitMatrix.from_dense(dense)
    k = f2la.kernel_basis(m)
    if k.dim:
        assert not ((dense.astype(int) @ k.vectors().T.astype(int)) % 2).any()


@given(st.integers(0, 12), st.integers(0, 80), st.integers(0, 80), st.integers(0, 2**32 - 1))
def test_multiply_matches_numpy(r, k, c, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 2, (r, k)).astype(np.uint8)
    b = rng.integers(0, 2, (k, c)).astype(np.uint8)
    want = (a.astype(int) @ b.astype(int)) % 2
    got = (BitMatrix.from_dense(a) @ BitMatrix.from_dense(b)).to_dense()
    assert np.array_equal(got, want)


@given(matrices(max_rows=15, max_cols=70), st.integers(0, 2**32 - 1))
def test_solve_consistent_systems(dense, seed):
    m = BitMatrix.from_dense(dense)
    x0 = np.random.default_rng(seed).integers(0, 2, m.cols).astype(np.uint8)
    v = (dense.astype(int) @ x0) % 2
    x = f2la.solve(m, v)
    assert x is not None
    assert np.array_equal((dense.astype(int) @ x) % 2, v)


@settings(max_examples=30)
@given(st.integers(1, 70), st.integers(0, 2**32 - 1))
def test_inverse(n, seed):
    rng = np.random.default_rng(seed)
    while True:
        m = BitMatrix.random(n, n, rng)
        if f2la.rank(m) == n:
            break
    assert m @ f2la.inverse(m) == BitMatrix.identity(n)


def test_singular_and_dimension_errors():
    with pytest.raises(ValueError):
        f2la.inverse(BitMatrix.zeros(3, 3))
    with pytest.raises(DimensionError):
        BitMatrix.zeros(2, 3) @ BitMatrix.zeros(2, 3)
    with pytest.raises(DimensionError):
        f2la.solve(BitMatrix.zeros(2, 3), [1, 0, 1])


def test_inconsistent_system():
    m = BitMatrix.from_dense([[1, 1], [1, 1]])
    assert f2la.solve(m, [1, 0]) is None


@given(matrices(max_cols=30))
def test_extend_to_basis(dense):
    m = BitMatrix.from_dense(dense)
    rows = f2la.image_basis(m.transpose()).basis
    full = f2la.extend_to_basis(rows, m.cols)
    assert full.rows == m.cols and f2la.rank(full) == m.cols
    assert np.array_equal(full.to_dense()[: rows.rows], rows.to_dense())


def test_subspace_equality_ignores_basis_choice():
    a = f2la.image_basis(BitMatrix.from_dense([[1, 0], [0, 1], [1, 1]]))
    b = f2la.image_basis(BitMatrix.from_dense([[1, 1], [1, 0], [0, 1]]))
    assert a == b
    assert a.contains([1, 1, 0])
    assert not a.contains([0, 0, 1])

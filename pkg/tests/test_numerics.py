import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from proxcg.numerics import (DctSubsample, DenseMatrix, Rng, SparseMatrix,
                             dct_matrix, matvec, matvec_t)


def test_identity_dense():
    eye = DenseMatrix(np.eye(2))
    np.testing.assert_array_equal(matvec(eye, [3.0, 4.0]), [3.0, 4.0])
    np.testing.assert_array_equal(matvec_t(eye, [1.0, 2.0]), [1.0, 2.0])


def test_dense_from_flat_row_major():
    A = DenseMatrix([1, 2, 3, 4, 5, 6], rows=2, cols=3)
    np.testing.assert_array_equal(A.todense(), [[1, 2, 3], [4, 5, 6]])
    np.testing.assert_array_equal(A.matvec([1, 0, 0]), [1, 4])


def test_sparse_hand_products():
    S = SparseMatrix.from_dense([[0.0, 2.0], [0.0, 0.0]])
    assert S.nnz == 1
    np.testing.assert_array_equal(S.matvec([1.0, 1.0]), [2.0, 0.0])
    np.testing.assert_array_equal(S.rmatvec([1.0, 0.0]), [0.0, 2.0])


def test_dct_subsample_first_row():
    D = DctSubsample([0], 2)
    np.testing.assert_allclose(D.matvec([1.0, 1.0]), [np.sqrt(2.0)], rtol=1e-15)


@pytest.mark.parametrize("op", [DenseMatrix(np.ones((2, 3))),
                                SparseMatrix.from_dense(np.eye(3)),
                                DctSubsample([1, 2], 4)])
def test_dimension_mismatch(op):
    with pytest.raises(ValueError):
        op.matvec(np.ones(op.cols + 1))
    with pytest.raises(ValueError):
        op.rmatvec(np.ones(op.rows + 1))


def test_sparse_rejects_bad_csr():
    with pytest.raises(ValueError):
        SparseMatrix(2, 2, [0, 2, 1], [0, 1], [1.0, 1.0])
    with pytest.raises(ValueError):
        SparseMatrix(1, 2, [0, 2], [1, 0], [1.0, 1.0])
    with pytest.raises(ValueError):
        SparseMatrix(1, 2, [0, 1], [2], [1.0])


def test_dct_matrix_orthonormal():
    for n in (1, 2, 7, 16):
        D = dct_matrix(n)
        np.testing.assert_allclose(D @ D.T, np.eye(n), atol=1e-12)


def test_dct_subsample_matches_explicit_rows():
    rng = np.random.default_rng(3)
    n = 32
    J = np.sort(rng.permutation(n)[:6])
    op = DctSubsample(J, n)
    M = dct_matrix(n)[J]
    x, y = rng.normal(size=n), rng.normal(size=6)
    np.testing.assert_allclose(op.matvec(x), M @ x, atol=1e-12)
    np.testing.assert_allclose(op.rmatvec(y), M.T @ y, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_adjointness_and_csr_matches_dense(m, n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(m, n)) * (rng.random((m, n)) < 0.5)
    x, y = rng.normal(size=n), rng.normal(size=m)
    for op in (DenseMatrix(a), SparseMatrix.from_dense(a)):
        np.testing.assert_allclose(op.matvec(x), a @ x, atol=1e-12)
        assert abs(y @ op.matvec(x) - op.rmatvec(y) @ x) <= 1e-10 * (1 + abs(y @ (a @ x)))


def test_rng_determinism_and_streams():
    a, b = Rng(11), Rng(11)
    np.testing.assert_array_equal(a.uniform(100), b.uniform(100))
    np.testing.assert_array_equal(a.normal(100), b.normal(100))
    assert not np.array_equal(Rng(11).uniform(10), Rng(11, stream=1).uniform(10))
    assert not np.array_equal(Rng(11).uniform(10), Rng(12).uniform(10))


def test_rng_moments():
    r = Rng(2024)
    assert 0.49 <= r.uniform(10**5).mean() <= 0.51
    assert 0.97 <= r.normal(10**5).var() <= 1.03


def test_rng_uniform_range_and_prefix():
    r = Rng(5)
    u = r.uniform(10**4)
    assert u.min() >= 0.0 and u.max() < 1.0
    p = r.choice_prefix(20, 7)
    assert len(set(p.tolist())) == 7 and p.max() < 20
    with pytest.raises(ValueError):
        Rng(-1)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from polygram import numeric
from polygram.exceptions import NotSymmetric, RankDeficient

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_sym_eig_identity():
    w, V = numeric.sym_eig(np.eye(2))
    np.testing.assert_allclose(w, [1, 1])
    np.testing.assert_allclose(V.T @ V, np.eye(2), atol=1e-12)


def test_sym_eig_diagonal():
    w, V = numeric.sym_eig(np.diag([1.0, 5.0]))
    np.testing.assert_allclose(w, [5, 1])
    np.testing.assert_allclose(np.abs(V), [[0, 1], [1, 0]], atol=1e-14)


def test_sym_eig_2x2_by_hand():
    # characteristic polynomial (2 - l)^2 - 1 has roots 3 and 1
    M = np.array([[2.0, 1.0], [1.0, 2.0]])
    w, V = numeric.sym_eig(M)
    np.testing.assert_allclose(w, [3, 1], atol=1e-14)
    np.testing.assert_allclose(V @ np.diag(w) @ V.T, M, atol=1e-14)
    # sign convention: first significant entry of each eigenvector positive
    assert V[0, 0] > 0 and V[0, 1] > 0


def test_sym_eig_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        numeric.sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))


@settings(max_examples=60, deadline=None)
@given(arrays(float, (5, 5), elements=finite))
def test_sym_eig_reconstruction(G):
    M = G + G.T
    w, V = numeric.sym_eig(M)
    nM = max(np.linalg.norm(M), 1.0)
    assert np.linalg.norm(M - V @ np.diag(w) @ V.T) <= 1e-10 * nM
    assert np.linalg.norm(V.T @ V - np.eye(5)) <= 1e-10
    assert np.all(np.diff(w) <= 0)


def test_nullspace_examples():
    assert numeric.nullspace(np.zeros((2, 3))).shape == (3, 3)
    assert numeric.nullspace(np.eye(3)).shape == (3, 0)
    B = numeric.nullspace(np.array([[-2.0, 2.0]]))
    assert B.shape == (2, 1)
    np.testing.assert_allclose(np.abs(B[:, 0]), [2 ** -0.5, 2 ** -0.5], atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_rank_nullity(m, n, r, seed):
    rng = np.random.default_rng(seed)
    r = min(r, m, n)
    M = rng.normal(size=(m, r)) @ rng.normal(size=(r, n))
    B = numeric.nullspace(M)
    assert numeric.rank(M) + B.shape[1] == n
    assert np.linalg.norm(M @ B) <= 1e-9 * max(np.linalg.norm(M), 1.0)
    np.testing.assert_allclose(B.T @ B, np.eye(B.shape[1]), atol=1e-12)


def test_rank_examples():
    assert numeric.rank(np.zeros((3, 4))) == 0
    assert numeric.rank(np.eye(4)) == 4
    u, v = np.array([1.0, 2.0, 3.0]), np.array([-1.0, 0.5])
    # SVD oracle: an outer product has one nonzero singular value
    s = np.linalg.svd(np.outer(u, v), compute_uv=False)
    assert np.sum(s > 1e-12 * s[0]) == 1
    assert numeric.rank(np.outer(u, v)) == 1


def test_right_pinv_examples():
    np.testing.assert_allclose(numeric.right_pinv([[1.0, 0.0]]), [[1.0], [0.0]])
    np.testing.assert_allclose(numeric.right_pinv([[2.0, 0.0]]), [[0.5], [0.0]])
    M = np.array([[1.0, 0.0, 1.0], [0.0, 2.0, 0.0]])
    Mp = numeric.right_pinv(M)
    np.testing.assert_allclose(M @ Mp, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(M @ Mp @ M, M, atol=1e-15)
    np.testing.assert_allclose(Mp, np.linalg.pinv(M), atol=1e-15)


def test_right_pinv_rank_deficient():
    with pytest.raises(RankDeficient):
        numeric.right_pinv([[1.0, 2.0], [2.0, 4.0]])


def test_random_unitary(rng):
    U = numeric.random_unitary(rng, 4)
    np.testing.assert_allclose(U @ U.conj().T, np.eye(4), atol=1e-13)
    O = numeric.random_unitary(rng, 3, real=True)
    assert np.isrealobj(O) or np.allclose(O.imag, 0)

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from polygram import factor, hrep, numeric
from polygram.exceptions import (
    DegenerateSpectrum, Infeasible, NotRealGramian, NotRepresentable, NotSkew,
    RankDeficientLead, StructureViolation)
from polygram.factor import Verdict
from polygram.hrep import HRep
from polygram.polymat import PolyMatrix, gram


def skew_map(X, A):
    return X.T @ A - A.T @ X


# -- solve_skew_particular ---------------------------------------------------

def test_solve_skew_zero_rhs(rng):
    A = rng.normal(size=(2, 4))
    X = factor.solve_skew_particular(A, np.zeros((4, 4)))
    np.testing.assert_allclose(X, 0, atol=1e-14)


def test_solve_skew_d1_n2_is_feasible():
    # brute force over X = [x1, x2]: X^T A - A^T X = [[0, -x2], [x2, 0]] for A = [1, 0]
    x1, x2, c = sympy.symbols("x1 x2 c")
    Xs = sympy.Matrix([[x1, x2]])
    As = sympy.Matrix([[1, 0]])
    lhs = Xs.T * As - As.T * Xs
    sol = sympy.solve(list(lhs - sympy.Matrix([[0, c], [-c, 0]])), [x1, x2], dict=True)
    assert sol == [{x2: -c}]
    X = factor.solve_skew_particular([[1.0, 0.0]], [[0.0, 3.0], [-3.0, 0.0]])
    np.testing.assert_allclose(X, [[0.0, -3.0]], atol=1e-14)


def test_solve_skew_infeasible():
    # for A = [1, 0, 0] the image only touches the first row and column
    C = np.zeros((3, 3))
    C[1, 2], C[2, 1] = 1.0, -1.0
    with pytest.raises(Infeasible):
        factor.solve_skew_particular([[1.0, 0.0, 0.0]], C)


def test_solve_skew_not_skew():
    with pytest.raises(NotSkew):
        factor.solve_skew_particular([[1.0, 0.0]], np.eye(2))


def test_solve_skew_construct_then_solve(rng):
    for d, N in [(1, 1), (1, 3), (2, 2), (2, 5), (3, 6)]:
        A = rng.normal(size=(d, N))
        X0 = numeric.random_symmetric(rng, d) @ A + rng.normal(size=(d, N))
        C = skew_map(X0, A)
        X = factor.solve_skew_particular(A, C)
        assert np.linalg.norm(skew_map(X, A) - C) <= 1e-9 * (np.linalg.norm(A) * np.linalg.norm(X) + np.linalg.norm(C))


# -- skew_offset_symmetric ---------------------------------------------------

def test_offset_examples(rng):
    A = rng.normal(size=(2, 4))
    X = rng.normal(size=(2, 4))
    np.testing.assert_allclose(factor.skew_offset_symmetric(A, X, X), 0, atol=1e-15)
    W0 = numeric.random_symmetric(rng, 2)
    np.testing.assert_allclose(factor.skew_offset_symmetric(A, X + W0 @ A, X), W0, atol=1e-13)


def test_offset_rejects_non_solutions(rng):
    A = rng.normal(size=(2, 4))
    X = rng.normal(size=(2, 4))
    with pytest.raises(StructureViolation):
        factor.skew_offset_symmetric(A, X, X + rng.normal(size=(2, 4)))
    # nonsymmetric multiplier: X + M A solves a different equation
    M = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(StructureViolation):
        factor.skew_offset_symmetric(A, X + M @ A, X)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_offset_property(d, extra, seed):
    rng = np.random.default_rng(seed)
    N = min(d + extra, 6)
    A = rng.normal(size=(d, N))
    X2 = numeric.random_symmetric(rng, d) @ A + rng.normal(size=(d, N))
    X1 = factor.solve_skew_particular(A, skew_map(X2, A))
    W = factor.skew_offset_symmetric(A, X1, X2)
    assert np.linalg.norm(W - W.T) <= 1e-9 * (np.linalg.norm(W) + 1)
    assert np.linalg.norm(W @ A - (X1 - X2)) <= 1e-9 * (np.linalg.norm(X1 - X2) + 1)


# -- canonicalize_factor -----------------------------------------------------

SCALAR_COMPLEX = PolyMatrix([[[1.0, 0.0]], [[1 + 2j, 0.0]]])


def test_canonicalize_identity_on_canonical():
    cf = factor.canonicalize_factor(SCALAR_COMPLEX)
    np.testing.assert_allclose(cf.U, [[1.0]], atol=1e-15)
    np.testing.assert_allclose(cf.X.coeffs, SCALAR_COMPLEX.coeffs, atol=1e-15)


def test_canonicalize_phase_rotation():
    X = PolyMatrix([[[1j, 0.0]], [[1j - 2, 0.0]]])
    cf = factor.canonicalize_factor(X)
    np.testing.assert_allclose(cf.U, [[-1j]], atol=1e-15)
    np.testing.assert_allclose(cf.X.coeffs, SCALAR_COMPLEX.coeffs, atol=1e-15)
    np.testing.assert_allclose(gram(cf.X).coeffs, gram(X).coeffs, atol=1e-15)


def test_canonicalize_real_canonical_input():
    X = PolyMatrix([np.array([[3.0, 0.0, 1.0], [0.0, 1.0, 0.0]]), np.ones((2, 3))])
    cf = factor.canonicalize_factor(X)
    np.testing.assert_allclose(cf.X.coeffs, X.coeffs, atol=1e-14)


def test_canonicalize_errors():
    with pytest.raises(NotRealGramian):
        factor.canonicalize_factor(PolyMatrix([[[1.0, 1.0]], [[1j, 0.0]]]))
    with pytest.raises(RankDeficientLead):
        factor.canonicalize_factor(PolyMatrix([np.array([[1.0, 0.0], [2.0, 0.0]]), np.eye(2)]))
    with pytest.raises(DegenerateSpectrum):
        factor.canonicalize_factor(PolyMatrix([np.eye(2, 3), np.ones((2, 3))]))


def test_canonicalize_random_rotation(rng):
    h = hrep.sample(3, 5, 2, seed=4)
    X = hrep.to_factor(h)
    U = numeric.random_unitary(rng, 3)
    a = factor.canonicalize_factor(X)
    b = factor.canonicalize_factor(X.left_multiply(U))
    np.testing.assert_allclose(a.X.coeffs, b.X.coeffs, atol=1e-11)
    np.testing.assert_allclose(b.U @ U, a.U, atol=1e-11)
    R0 = b.X[0].real
    G0 = R0 @ R0.T
    assert np.linalg.norm(G0 - np.diag(np.diag(G0))) <= 1e-12 * np.linalg.norm(G0)


# -- recover_hrep ------------------------------------------------------------

def test_recover_real_factor(rng):
    X = PolyMatrix(rng.normal(size=(3, 2, 4)))
    h = factor.recover_hrep(factor.canonicalize_factor(X))
    assert not h.W.any()
    np.testing.assert_allclose(h.R, factor.canonicalize_factor(X).X.real)


def test_recover_scalar_by_hand():
    # W_1 = Q_1 R_0^+ = 2 and W_2 = -(W_1 R_1) R_0^+ = -2
    h = factor.recover_hrep(factor.canonicalize_factor(SCALAR_COMPLEX))
    np.testing.assert_allclose(h.W.ravel(), [2.0, -2.0], atol=1e-15)
    np.testing.assert_allclose(h.R, [[[1, 0]], [[1, 0]]], atol=1e-15)
    assert h.canonical and hrep.validate(h).passed


def test_recover_detects_non_real():
    # Q_0 = 0 but Q_1 is not of the form W_1 R_0 with W_1 symmetric
    X = PolyMatrix([np.array([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
                    np.array([[0.0, 1j, 0.0], [0.0, 0.0, 0.0]])])
    with pytest.raises(NotRepresentable):
        factor.recover_hrep(X)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(0, 3), st.integers(1, 3), st.integers(0, 10**6))
def test_bijection_both_directions(d, extra, P, seed):
    N = d + extra
    h = hrep.sample(d, N, P, seed=seed)
    hc = hrep.canonicalize_hrep(h)
    cf = factor.canonicalize_factor(hrep.to_factor(h))
    back = factor.recover_hrep(cf)
    assert back.distance(hc) <= 1e-7
    assert hrep.to_factor(back).allclose(cf.X, rtol=1e-7)


def test_distinct_w_distinct_factors():
    h = hrep.canonicalize_hrep(hrep.sample(2, 4, 2, seed=21))
    W2 = h.W.copy()
    W2[0] = W2[0] + np.eye(2) * 1e-3
    X1 = hrep.mix(h.W, h.R)
    X2 = hrep.mix(W2, h.R)
    assert np.linalg.norm(X1 - X2) > 1e-4


# -- classify ----------------------------------------------------------------

def test_classify_real_row():
    X = PolyMatrix([[[1.0, 0.0]], [[1.0, 1.0]]])
    c = factor.classify(X)
    assert c.verdict is Verdict.REAL_FACTORABLE and c.w_norm == 0.0
    np.testing.assert_allclose(gram(c.real_factor).coeffs, gram(X).coeffs, atol=1e-15)


def test_classify_scalar_instance():
    c = factor.classify(SCALAR_COMPLEX)
    assert c.verdict is Verdict.COMPLEX_ONLY and c.real_factor is None
    assert c.w_norm == pytest.approx(2 / (1 + np.sqrt(2)))
    # (a + b t)^2 = 1 + 2t + 5t^2 has no real solution
    a, b = sympy.symbols("a b", real=True)
    assert sympy.solve([a**2 - 1, 2 * a * b - 2, b**2 - 5], [a, b], dict=True) == []


def test_classify_invariant_under_rotation(rng):
    for seed, scale in [(1, 1.0), (2, 0.0), (3, 1.0)]:
        X = hrep.to_factor(hrep.sample(2, 4, 2, seed=seed, scale=scale))
        U = numeric.random_unitary(rng, 2)
        assert factor.classify(X).verdict is factor.classify(X.left_multiply(U)).verdict
    assert factor.classify(SCALAR_COMPLEX.left_multiply([[np.exp(0.7j)]])).verdict is Verdict.COMPLEX_ONLY


def test_classification_json():
    d = factor.classify(SCALAR_COMPLEX).to_dict()
    assert set(d) == {"verdict", "w_norm", "residuals", "real_factor"}
    assert d["verdict"] == "ComplexOnly" and d["real_factor"] is None


def test_constant_factor_degree_zero(rng):
    # degree-0: every PSD constant matrix has a real factor
    A = rng.normal(size=(2, 3))
    c = factor.classify(PolyMatrix([np.exp(0.3j) * A]))
    assert c.verdict is Verdict.REAL_FACTORABLE
    np.testing.assert_allclose(gram(c.real_factor).coeffs, [A.T @ A], atol=1e-13)
    h = HRep(np.zeros((0, 2, 2)), [A])
    assert hrep.validate(h).passed

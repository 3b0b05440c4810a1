"""Canonical spectral factors, the recovery map and the real/complex classifier.

The pipeline for a complex factor ``X`` with a real Gramian is

    X --canonicalize_factor--> U X --recover_hrep--> (W, R) --classify--> verdict

where ``U`` is the constant unitary that makes the constant coefficient real
with orthogonal, positively-led rows. The Gramian admits a real spectral
factor exactly when every recovered ``W_k`` vanishes.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from . import numeric
from .exceptions import (
    Infeasible, NotRealGramian, NotRepresentable, NotSkew, RankDeficient,
    RankDeficientLead, StructureViolation, UnitarityFailure)
from .hrep import HRep, _check_gaps, mix
from .polymat import PolyMatrix, gram, is_real
from .tolerances import DEFAULT


def skew_operator(A):
    """Matrix of the linear map ``vec(X) -> vec(X^T A - A^T X)``.

    ``X`` is ``d x N`` and flattened row-major; the result has shape
    ``(N * N, d * N)``.
    """
    d, N = A.shape
    L = np.empty((N * N, d * N))
    E = np.zeros((d, N))
    for j in range(d * N):
        E.flat[j] = 1.0
        L[:, j] = (E.T @ A - A.T @ E).ravel()
        E.flat[j] = 0.0
    return L


def skew_residual(X, A, C):
    return numeric.fro(X.T @ A - A.T @ X - C)


def solve_skew_particular(A, C, tol=DEFAULT.real):
    """One solution ``X`` of ``X^T A - A^T X = C``.

    Solves the vectorized system in the ``d N`` unknowns of ``X`` by least
    squares (minimum-norm solution) and accepts it if the residual is at most
    ``tol * (||A|| ||X|| + ||C||)``. Every other solution differs from the
    returned one by ``W A`` with ``W`` symmetric.

    Raises
    ------
    NotSkew
        If ``C`` is not skew-symmetric.
    RankDeficient
        If ``A`` does not have full row rank.
    Infeasible
        If ``C`` is outside the range of the map.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    d, N = A.shape
    if C.shape != (N, N):
        raise NotSkew(f"C must have shape ({N}, {N}), got {C.shape}")
    if numeric.fro(C + C.T) > tol * numeric.fro(C):
        raise NotSkew(f"C is not skew-symmetric (||C + C^T|| = {numeric.fro(C + C.T):.3e})")
    if numeric.rank(A, DEFAULT.rank) < d:
        raise RankDeficient(f"A of shape {A.shape} does not have full row rank")
    L = skew_operator(A)
    x, *_ = np.linalg.lstsq(L, C.ravel(), rcond=None)
    X = x.reshape(d, N)
    res = skew_residual(X, A, C)
    bound = tol * (numeric.fro(A) * numeric.fro(X) + numeric.fro(C))
    if res > bound:
        raise Infeasible(f"least-squares residual {res:.3e} exceeds {bound:.3e}; "
                         "C is not in the range of X -> X^T A - A^T X")
    return X


def skew_offset_symmetric(A, X1, X2, tol=DEFAULT.real):
    """Symmetric ``W`` with ``X1 - X2 = W A`` for two solutions of the same equation.

    Raises
    ------
    StructureViolation
        If ``X1`` and ``X2`` do not solve the same equation, or the offset
        is not of the form ``W A`` with ``W`` symmetric.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    X1 = np.asarray(X1, dtype=float)
    X2 = np.asarray(X2, dtype=float)
    C1 = X1.T @ A - A.T @ X1
    C2 = X2.T @ A - A.T @ X2
    nA = numeric.fro(A)
    if numeric.fro(C1 - C2) > tol * (nA * (numeric.fro(X1) + numeric.fro(X2)) + 1.0):
        raise StructureViolation("X1 and X2 do not solve the same equation")
    try:
        Ap = numeric.right_pinv(A)
    except RankDeficient as exc:
        raise StructureViolation(str(exc)) from exc
    D = X1 - X2
    W = D @ Ap
    nW = numeric.fro(W)
    asym = numeric.fro(W - W.T)
    if asym > tol * (nW + 1.0):
        raise StructureViolation(f"offset multiplier is not symmetric (residual {asym:.3e})")
    recon = numeric.fro(W @ A - D)
    if recon > tol * (nW * nA + numeric.fro(D) + 1.0):
        raise StructureViolation(f"offset is not in the row space of A (residual {recon:.3e})")
    return 0.5 * (W + W.T)


@dataclass
class CanonicalFactor:
    X: PolyMatrix
    U: np.ndarray
    residuals: dict = field(default_factory=dict)


def canonicalize_factor(X, tol=DEFAULT):
    """Rotate a spectral factor into its unique canonical form.

    The constant coefficient becomes real, with mutually orthogonal rows
    ordered by descending norm and each row's first significant entry
    positive. The Gramian is unchanged.

    Parameters
    ----------
    X : PolyMatrix
        Complex ``d x N`` factor whose Gramian is real.
    tol : Tolerances

    Returns
    -------
    CanonicalFactor
        ``U X`` together with the unitary ``U`` and the check residuals.
    """
    G = gram(X)
    ok, max_imag = is_real(G, tol.real)
    if not ok:
        raise NotRealGramian(f"Gramian has imaginary part {max_imag:.3e}")
    d = X.shape[0]
    A0 = X[0]
    if numeric.rank(A0, tol.rank) < d:
        raise RankDeficientLead(f"A_0 has rank {numeric.rank(A0, tol.rank)} < d = {d}")
    # B_0 = Re(A_0)^T Re(A_0) + Im(A_0)^T Im(A_0); factor the stack instead of
    # B_0 itself so the condition number is not squared
    M = np.vstack([A0.real, A0.imag])
    _, sv, Vh = np.linalg.svd(M, full_matrices=False)
    lam = sv[:d] ** 2
    if lam[-1] <= tol.rank * lam[0]:
        raise RankDeficientLead("degree-0 Gramian block has fewer than d positive eigenvalues")
    _check_gaps(lam, tol.gap)
    R0, signs = numeric.fix_signs(sv[:d, None] * Vh[:d], tol.entry, axis=1)
    # A_0 = K diag(sv) Vh with K unitary whenever B_0 is real
    K = A0 @ (Vh[:d].T / sv[:d])
    U = signs[:, None] * K.conj().T
    # project onto the unitary group; the recovery recursion amplifies any
    # departure from a pure rotation of the input factor
    Pu, _, Pvh = np.linalg.svd(U)
    U = Pu @ Pvh
    unit_res = numeric.fro(U @ U.conj().T - np.eye(d))
    lead_res = numeric.fro(U @ A0 - R0) / (numeric.fro(R0) + 1.0)
    if unit_res > tol.real or lead_res > tol.real:
        raise UnitarityFailure(
            f"rotation check failed: ||U U^H - I|| = {unit_res:.3e}, ||U A_0 - R_0|| = {lead_res:.3e}")
    C = U @ X.coeffs
    C[0] = R0
    residuals = {"unitarity": unit_res, "lead": lead_res, "gram_imag": max_imag}
    return CanonicalFactor(PolyMatrix(C), U, residuals)


def recover_hrep(cf, tol=DEFAULT):
    """Recover ``(W, R)`` from a canonical factor.

    With ``R_p = Re A_p`` and ``Q_p = Im A_p`` the blocks are found in order:

    * ``W_p = (Q_p - sum_{i<p} W_i R_{p-i}) R_0^+`` for ``p = 1..P``;
    * ``W_{P+p} = -(sum_{i=1}^{P} W_{P+p-i} R_i) R_0^+`` for ``p = 1..P``.

    Every step checks that the block is symmetric and that the defining
    equation holds exactly (not only in least squares), which certifies the
    real-Gramian premise as it goes.

    Raises
    ------
    NotRepresentable
        On the first step whose symmetry or residual check fails.
    """
    X = cf.X if isinstance(cf, CanonicalFactor) else cf
    R = X.real.copy()
    Q = X.imag
    P, d = X.degree, X.shape[0]
    R0 = R[0]
    if numeric.fro(Q[0]) > tol.real * (numeric.fro(R0) + 1.0):
        raise NotRepresentable("constant coefficient is not real")
    R0p = numeric.right_pinv(R0, tol.rank)
    nR0 = numeric.fro(R0)
    W = np.zeros((2 * P, d, d))

    def solve_step(k, rhs):
        Wk = rhs @ R0p
        nW = numeric.fro(Wk)
        asym = numeric.fro(Wk - Wk.T)
        if asym > tol.recover * (nW + 1.0):
            raise NotRepresentable(f"W_{k} is not symmetric (residual {asym:.3e})")
        res = numeric.fro(Wk @ R0 - rhs)
        if res > tol.recover * (nW * nR0 + numeric.fro(rhs) + 1.0):
            raise NotRepresentable(f"step for W_{k} leaves residual {res:.3e}")
        W[k - 1] = 0.5 * (Wk + Wk.T)

    for p in range(1, P + 1):
        rhs = Q[p] - sum((W[i - 1] @ R[p - i] for i in range(1, p)), np.zeros((d, R.shape[2])))
        solve_step(p, rhs)
    for p in range(1, P + 1):
        rhs = -sum(W[P + p - i - 1] @ R[i] for i in range(1, P + 1))
        solve_step(P + p, rhs)
    return HRep(W, R, canonical=True)


class Verdict(str, enum.Enum):
    REAL_FACTORABLE = "RealFactorable"
    COMPLEX_ONLY = "ComplexOnly"


@dataclass
class Classification:
    verdict: Verdict
    w_norm: float
    real_factor: PolyMatrix = None
    residuals: dict = field(default_factory=dict)
    hrep: HRep = None

    @property
    def is_real_factorable(self):
        return self.verdict is Verdict.REAL_FACTORABLE

    def to_dict(self):
        return {
            "verdict": self.verdict.value,
            "w_norm": float(self.w_norm),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "real_factor": None if self.real_factor is None else self.real_factor.to_dict(),
        }


def w_norm(h):
    """``max_k ||W_k|| / (1 + ||R||)``; zero for a constant factor."""
    if h.P == 0:
        return 0.0
    return float(max(numeric.fro(Wk) for Wk in h.W) / (1.0 + numeric.fro(h.R)))


def classify(X, tol=DEFAULT):
    """Decide whether the Gramian of ``X`` admits a real spectral factor.

    The verdict depends only on the Gramian: any unitary rotation of ``X``
    gets the same answer. When the Gramian is real-factorable, the real
    parts of the canonical coefficients form a real factor, and its Gramian
    is checked against the input's.
    """
    cf = canonicalize_factor(X, tol)
    h = recover_hrep(cf, tol)
    wn = w_norm(h)
    residuals = dict(cf.residuals)
    residuals["roundtrip"] = float(np.linalg.norm(mix(h.W, h.R) - cf.X.coeffs))
    if wn > tol.classify:
        return Classification(Verdict.COMPLEX_ONLY, wn, None, residuals, h)
    real_factor = PolyMatrix(h.R)
    G = gram(X).coeffs
    Gr = gram(real_factor).coeffs
    res = numeric.fro(Gr - G) / (numeric.fro(G) + 1.0)
    residuals["real_factor_gram"] = res
    if res > tol.real:
        raise StructureViolation(f"real factor reproduces the Gramian only to {res:.3e}")
    return Classification(Verdict.REAL_FACTORABLE, wn, real_factor, residuals, h)


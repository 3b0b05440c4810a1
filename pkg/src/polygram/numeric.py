"""Dense linear-algebra kernels with explicit tolerance contracts.

Thin wrappers around :mod:`numpy.linalg` that fix orderings, sign
conventions and the rank decisions used by the rest of the package.
"""

import numpy as np

from .exceptions import NotSymmetric, RankDeficient
from .tolerances import DEFAULT


def fro(M):
    return float(np.linalg.norm(M))


def fix_signs(V, tol=DEFAULT.entry, axis=0):
    """Flip vectors so that their first entry exceeding ``tol`` is positive.

    Vectors run along ``axis`` (columns for ``axis=0``). ``tol`` is relative
    to each vector's largest magnitude. Returns the flipped copy and the
    applied signs.
    """
    V = np.array(V, dtype=float)
    vecs = V if axis == 0 else V.T
    signs = np.ones(vecs.shape[1])
    for j in range(vecs.shape[1]):
        v = vecs[:, j]
        big = np.flatnonzero(np.abs(v) > tol * max(np.abs(v).max(initial=0.0), np.finfo(float).tiny))
        if big.size and v[big[0]] < 0:
            signs[j] = -1.0
    out = vecs * signs
    return (out if axis == 0 else out.T), signs


def sym_eig(M, tol=DEFAULT.sym):
    """Eigendecomposition of a real symmetric matrix.

    Parameters
    ----------
    M : (n, n) array_like
        Real symmetric matrix; symmetry is checked relative to ``||M||_F``.
    tol : float
        Symmetry tolerance.

    Returns
    -------
    w : (n,) ndarray
        Eigenvalues in descending order.
    V : (n, n) ndarray
        Orthonormal eigenvectors as columns, each with its first significant
        entry positive.

    Raises
    ------
    NotSymmetric
        If ``||M - M^T|| > tol * ||M||``.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {M.shape}")
    asym = fro(M - M.T)
    if asym > tol * fro(M):
        raise NotSymmetric(f"asymmetry {asym:.3e} exceeds {tol:.1e} * ||M||")
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    order = np.argsort(-w, kind="stable")
    V, _ = fix_signs(V[:, order])
    return w[order], V


def rank(M, tol=DEFAULT.rank):
    """Number of singular values above ``tol`` times the largest one."""
    M = np.asarray(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def nullspace(M, tol=DEFAULT.rank):
    """Orthonormal basis (as columns) of the kernel of ``M``.

    The number of columns is ``n - rank(M, tol)``; it may be zero.
    """
    M = np.atleast_2d(np.asarray(M))
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    r = 0 if s.size == 0 or s[0] == 0.0 else int(np.sum(s > tol * s[0]))
    return Vh[r:].conj().T.copy()


def right_pinv(M, tol=DEFAULT.rank):
    """Right inverse ``M^T (M M^T)^{-1}`` of a full-row-rank matrix."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    d = M.shape[0]
    r = rank(M, tol)
    if r < d:
        raise RankDeficient(f"matrix of shape {M.shape} has rank {r} < {d}")
    return np.linalg.solve(M @ M.T, M).T


def random_symmetric(rng, d, scale=1.0):
    """Symmetrized Gaussian matrix ``(G + G^T) / 2`` with ``G_ij ~ N(0, scale^2)``."""
    G = rng.normal(0.0, scale, size=(d, d)) if scale else np.zeros((d, d))
    return 0.5 * (G + G.T)


def random_unitary(rng, d, real=False):
    """Haar-distributed orthogonal or unitary matrix via QR with phase fix."""
    Z = rng.normal(size=(d, d))
    if not real:
        Z = Z + 1j * rng.normal(size=(d, d))
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph

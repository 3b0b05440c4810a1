"""The (W, R) representation of real polynomial Gramians.

A representation holds ``2P`` real symmetric ``d x d`` blocks ``W_1..W_2P``
and ``P + 1`` real ``d x N`` blocks ``R_0..R_P`` subject to the
block-Toeplitz constraint ``W R = 0`` (see :func:`assemble_toeplitz`) and
``rank(R_0) = d``. The spectral factor it encodes is

    A_p = R_p + i * sum_{j=1}^{p} W_j R_{p-j},

and every such factor has a real Gramian.

Storage is 0-indexed: ``W[0]`` holds ``W_1`` and ``W[k - 1]`` holds ``W_k``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import numeric
from .exceptions import (
    DegenerateSpectrum, DimensionError, InvalidHRep, RankDeficient, SamplingFailed)
from .polymat import PolyMatrix
from .tolerances import DEFAULT

MAX_RETRIES = 16
# smallest admissible sigma_min(R_0) / ||R||_F for sampled points; recovery
# amplifies rounding error roughly by this ratio's inverse per degree
MIN_LEAD_RATIO = 1e-2


@dataclass(frozen=True, eq=False)
class HRep:
    W: np.ndarray
    R: np.ndarray
    canonical: bool = False
    seed: object = None

    def __post_init__(self):
        W = np.array(self.W, dtype=float)
        R = np.array(self.R, dtype=float)
        if R.ndim != 3 or R.shape[0] < 1:
            raise DimensionError(f"R must have shape (P+1, d, N), got {R.shape}")
        P, d = R.shape[0] - 1, R.shape[1]
        if W.size == 0 and P == 0:
            W = np.zeros((0, d, d))
        if W.shape != (2 * P, d, d):
            raise DimensionError(f"W must have shape ({2 * P}, {d}, {d}), got {W.shape}")
        W.setflags(write=False)
        R.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "R", R)

    @property
    def d(self):
        return self.R.shape[1]

    @property
    def N(self):
        return self.R.shape[2]

    @property
    def P(self):
        return self.R.shape[0] - 1

    def w(self, k):
        """``W_k`` for ``k`` in ``1..2P``."""
        return self.W[k - 1]

    def flat(self):
        return np.concatenate([self.W.ravel(), self.R.ravel()])

    def distance(self, other):
        """``||theta - theta'|| / (1 + ||theta'||)`` over all parameters."""
        a, b = self.flat(), other.flat()
        if a.shape != b.shape:
            return np.inf
        return float(np.linalg.norm(a - b) / (1.0 + np.linalg.norm(b)))

    def to_dict(self):
        return {
            "d": self.d,
            "N": self.N,
            "P": self.P,
            "W": self.W.tolist(),
            "R": self.R.tolist(),
            "canonical": bool(self.canonical),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            d, N, P = int(data["d"]), int(data["N"]), int(data["P"])
            W = np.asarray(data["W"], dtype=float).reshape(2 * P, d, d)
            R = np.asarray(data["R"], dtype=float).reshape(P + 1, d, N)
        except (KeyError, TypeError, ValueError) as exc:
            raise DimensionError(f"malformed representation record: {exc}") from exc
        return cls(W, R, canonical=bool(data.get("canonical", False)), seed=data.get("seed"))


@dataclass
class ValidationReport:
    symmetry_residuals: list
    constraint_residual: float
    rank_R0: int
    canonical: bool
    passed: bool
    failures: list = field(default_factory=list)

    def to_dict(self):
        return {
            "symmetry_residuals": [float(r) for r in self.symmetry_residuals],
            "constraint_residual": float(self.constraint_residual),
            "rank_R0": int(self.rank_R0),
            "canonical": bool(self.canonical),
            "passed": bool(self.passed),
            "failures": list(self.failures),
        }


def toeplitz_from_blocks(W, P):
    d = W.shape[1] if W.size else 0
    T = np.zeros((P * d, (P + 1) * d), dtype=W.dtype)
    for p in range(1, P + 1):
        for q in range(P + 1):
            T[(p - 1) * d:p * d, q * d:(q + 1) * d] = W[P + p - q - 1]
    return T


def assemble_toeplitz(h):
    """Block-Toeplitz constraint matrix of shape ``(P d, (P + 1) d)``.

    Block ``(p, q)`` with ``p = 1..P`` and ``q = 0..P`` is ``W_{P+p-q}``, so
    the first block row reads ``W_{P+1}, W_P, ..., W_1``.
    """
    return toeplitz_from_blocks(h.W, h.P)


def mixer_from_blocks(W, P, d):
    M = np.eye((P + 1) * d, dtype=complex)
    for p in range(1, P + 1):
        for q in range(p):
            M[p * d:(p + 1) * d, q * d:(q + 1) * d] = 1j * W[p - q - 1]
    return M


def assemble_mixer(h):
    """Unit block lower-triangular matrix with block ``(p, q) = i W_{p-q}`` below the diagonal."""
    return mixer_from_blocks(h.W, h.P, h.d)


def stack(blocks):
    return blocks.reshape(-1, blocks.shape[-1])


def mix(W, R):
    """Complex factor coefficients from blocks, without checking ``W R = 0``."""
    P, d, N = R.shape[0] - 1, R.shape[1], R.shape[2]
    A = R.astype(complex)
    for p in range(1, P + 1):
        Q = np.zeros((d, N))
        for j in range(1, p + 1):
            Q += W[j - 1] @ R[p - j]
        A[p] = R[p] + 1j * Q
    return A


def to_factor(h, tol=DEFAULT):
    """Spectral factor ``sum_p A_p t^p`` encoded by ``h``.

    Raises
    ------
    InvalidHRep
        If a ``W_k`` is not symmetric or ``W R = 0`` fails beyond tolerance.
    """
    report = validate(h, tol)
    bad = [f for f in report.failures if f.startswith(("symmetry", "constraint"))]
    if bad:
        raise InvalidHRep("; ".join(bad))
    return PolyMatrix(mix(h.W, h.R))


def constraint_residual(h):
    """Relative residual ``||W R|| / (||W|| ||R|| + 1)``."""
    if h.P == 0:
        return 0.0
    T = assemble_toeplitz(h)
    Rs = stack(h.R)
    return numeric.fro(T @ Rs) / (numeric.fro(T) * numeric.fro(Rs) + 1.0)


def in_canonical_set(R0, tol=DEFAULT):
    """Rows mutually orthogonal and each row's first significant entry positive."""
    G = R0 @ R0.T
    off = G - np.diag(np.diag(G))
    if numeric.fro(off) > tol.orth * max(numeric.fro(R0) ** 2, np.finfo(float).tiny):
        return False
    _, signs = numeric.fix_signs(R0, tol.entry, axis=1)
    return bool(np.all(signs > 0))


def validate(h, tol=DEFAULT):
    """Check the invariants of ``h`` and report every residual.

    The report passes iff each ``W_k`` is symmetric, ``W R = 0`` holds,
    ``rank(R_0) = d`` and, when ``h.canonical`` is set, ``R_0`` lies in the
    canonical set.
    """
    failures = []
    sym = []
    for k in range(1, 2 * h.P + 1):
        Wk = h.w(k)
        res = numeric.fro(Wk - Wk.T)
        sym.append(res)
        if res > tol.sym * max(numeric.fro(Wk), 1.0):
            failures.append(f"symmetry: W_{k} residual {res:.3e}")
    cons = constraint_residual(h)
    if cons > tol.cons:
        failures.append(f"constraint: ||W R|| relative residual {cons:.3e}")
    r0 = numeric.rank(h.R[0], tol.rank)
    if r0 < h.d:
        failures.append(f"rank: rank(R_0) = {r0} < d = {h.d}")
    canon = r0 == h.d and in_canonical_set(h.R[0], tol)
    if h.canonical and not canon:
        failures.append("canonical: R_0 is flagged canonical but is not in the canonical set")
    return ValidationReport(sym, cons, r0, canon, not failures, failures)


def _check_dims(d, N, P):
    if not (isinstance(d, (int, np.integer)) and isinstance(N, (int, np.integer))
            and isinstance(P, (int, np.integer))):
        raise DimensionError("d, N and P must be integers")
    if d < 1 or N < d or P < 1:
        raise DimensionError(f"need N >= d >= 1 and P >= 1, got d={d}, N={N}, P={P}")


def lead_ratio(h):
    """``sigma_min(R_0) / ||R||_F``, the scale-aware full-rank margin of ``R_0``."""
    nR = numeric.fro(h.R)
    if nR == 0.0:
        return 0.0
    return float(np.linalg.svd(h.R[0], compute_uv=False)[-1] / nR)


def sample(d, N, P, seed=None, scale=1.0, tol=DEFAULT, max_retries=MAX_RETRIES,
           min_lead_ratio=MIN_LEAD_RATIO):
    """Draw a random point of the representation variety.

    Each ``W_k`` is a symmetrized Gaussian with entry scale ``scale``; the
    stacked ``R`` is a Gaussian combination of an orthonormal basis of the
    kernel of the block-Toeplitz matrix, so ``W R = 0`` holds to kernel
    accuracy. Draws are repeated until ``rank(R_0) = d`` and ``R_0`` is not
    negligible next to the rest of ``R`` (``lead_ratio(h) >= min_lead_ratio``).

    Raises
    ------
    DimensionError
        Unless ``N >= d >= 1`` and ``P >= 1``.
    SamplingFailed
        If no valid draw is found within ``max_retries`` attempts.
    """
    _check_dims(d, N, P)
    if scale < 0:
        raise DimensionError(f"scale must be non-negative, got {scale}")
    rng = np.random.default_rng(seed)
    last = None
    for _ in range(max_retries):
        W = np.stack([numeric.random_symmetric(rng, d, scale) for _ in range(2 * P)])
        T = toeplitz_from_blocks(W, P)
        B = numeric.nullspace(T, tol.rank)
        if B.shape[1] < d:
            last = f"kernel dimension {B.shape[1]} < d = {d}"
            continue
        C = rng.normal(size=(B.shape[1], N))
        R = (B @ C).reshape(P + 1, d, N)
        h = HRep(W, R, canonical=False, seed=seed)
        report = validate(h, tol)
        if not report.passed:
            last = "; ".join(report.failures)
        elif lead_ratio(h) < min_lead_ratio:
            last = f"lead ratio {lead_ratio(h):.2e} below {min_lead_ratio:.0e}"
        else:
            return h
    raise SamplingFailed(f"no valid sample for d={d}, N={N}, P={P} after {max_retries} tries ({last})")


def canonical_rotation(R0, tol=DEFAULT):
    """The orthogonal ``U`` placing ``U R_0`` in the canonical set.

    Rows of ``U R_0`` come out ordered by descending norm.
    """
    d = R0.shape[0]
    if numeric.rank(R0, tol.rank) < d:
        raise RankDeficient("R_0 does not have full row rank")
    Us, sv, Vh = np.linalg.svd(R0, full_matrices=False)
    _check_gaps(sv ** 2, tol.gap)
    _, signs = numeric.fix_signs(sv[:, None] * Vh, tol.entry, axis=1)
    return signs[:, None] * Us.T


def _check_gaps(lam, gap):
    if lam.size > 1:
        gaps = -np.diff(lam)
        if gaps.min() <= gap * lam[0]:
            raise DegenerateSpectrum(
                f"eigenvalue gap {gaps.min():.3e} below {gap:.1e} * {lam[0]:.3e}; "
                "the canonical representative is not unique")


def rotate(h, U, canonical=False):
    """``(U W_k U^T, U R_p)`` for an orthogonal ``U``."""
    W = U @ h.W @ U.T if h.P else h.W
    return HRep(W, U @ h.R, canonical=canonical, seed=h.seed)


def canonicalize_hrep(h, tol=DEFAULT):
    """Rotate ``h`` so that ``R_0`` lies in the canonical set.

    Raises
    ------
    DegenerateSpectrum
        If ``R_0 R_0^T`` has (numerically) repeated eigenvalues.
    """
    U = canonical_rotation(h.R[0], tol)
    return rotate(h, U, canonical=True)

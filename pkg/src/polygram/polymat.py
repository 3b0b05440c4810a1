"""Polynomial matrices on the real line and their Gramians.

A polynomial matrix ``X(t) = sum_p A_p t^p`` is stored coefficient-wise as a
complex array of shape ``(P + 1, rows, cols)``. The Hermitian transpose acts
on coefficients only: ``X(t)^H = sum_p A_p^H t^p`` with ``t`` real, so the
Gramian ``X^H X`` has coefficients ``B_k = sum_p A_p^H A_{k-p}``.
"""

import numpy as np

from . import numeric
from .exceptions import DimensionError, NotRealGramian
from .tolerances import DEFAULT

# 21 Chebyshev nodes on [-10, 10] plus both endpoints.
DEFAULT_T_SAMPLES = tuple(
    sorted([-10.0, 10.0] + [10.0 * np.cos((2 * j + 1) * np.pi / 42) for j in range(21)]))


class PolyMatrix:
    """Polynomial matrix with complex coefficient matrices of a common shape.

    Parameters
    ----------
    coeffs : array_like, shape (P + 1, rows, cols)
        ``coeffs[p]`` is the coefficient of ``t**p``. A sequence of 2-D
        arrays is also accepted.
    """

    def __init__(self, coeffs):
        arr = np.array([np.atleast_2d(np.asarray(c)) for c in coeffs]
                       if not isinstance(coeffs, np.ndarray) else coeffs,
                       dtype=complex)
        if arr.ndim != 3 or arr.shape[0] < 1 or arr.shape[1] < 1 or arr.shape[2] < 1:
            raise DimensionError(f"coefficients must have shape (P+1, rows, cols), got {arr.shape}")
        arr.setflags(write=False)
        self._coeffs = arr

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def degree(self):
        return self._coeffs.shape[0] - 1

    @property
    def shape(self):
        return self._coeffs.shape[1:]

    @property
    def real(self):
        return self._coeffs.real

    @property
    def imag(self):
        return self._coeffs.imag

    def __len__(self):
        return self._coeffs.shape[0]

    def __getitem__(self, p):
        return self._coeffs[p]

    def __repr__(self):
        rows, cols = self.shape
        return f"{type(self).__name__}(degree={self.degree}, shape=({rows}, {cols}))"

    def __call__(self, t):
        return evaluate(self, t)

    def left_multiply(self, U):
        """Return ``U X(t)`` for a constant matrix ``U``."""
        return PolyMatrix(np.asarray(U) @ self._coeffs)

    def allclose(self, other, rtol=1e-9):
        if self._coeffs.shape != other.coeffs.shape:
            return False
        diff = numeric.fro(self._coeffs - other.coeffs)
        return diff <= rtol * (1.0 + numeric.fro(other.coeffs))

    def to_dict(self):
        rows, cols = self.shape
        return {
            "rows": int(rows),
            "cols": int(cols),
            "degree": int(self.degree),
            "coeffs_re": [c.real.tolist() for c in self._coeffs],
            "coeffs_im": [c.imag.tolist() for c in self._coeffs],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            re = np.asarray(data["coeffs_re"], dtype=float)
            im = np.asarray(data["coeffs_im"], dtype=float)
            rows, cols, degree = int(data["rows"]), int(data["cols"]), int(data["degree"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DimensionError(f"malformed polynomial matrix record: {exc}") from exc
        expected = (degree + 1, rows, cols)
        if re.shape != expected or im.shape != expected:
            raise DimensionError(
                f"coefficient arrays have shapes {re.shape} and {im.shape}, expected {expected}")
        return cls(re + 1j * im)


class GramPoly(PolyMatrix):
    """Square polynomial matrix whose coefficients are Hermitian."""

    def __init__(self, coeffs, check=True, tol=DEFAULT.sym):
        super().__init__(coeffs)
        rows, cols = self.shape
        if rows != cols:
            raise DimensionError(f"Gramian coefficients must be square, got {self.shape}")
        if check:
            C = self.coeffs
            asym = numeric.fro(C - np.conj(np.swapaxes(C, 1, 2)))
            if asym > tol * max(numeric.fro(C), 1.0):
                raise DimensionError(f"Gramian coefficients are not Hermitian (residual {asym:.3e})")


def evaluate(X, t):
    """Evaluate ``X(t)`` by Horner's rule."""
    C = X.coeffs
    out = C[-1].copy()
    for A in C[-2::-1]:
        out = out * t + A
    return out


def gram(X):
    """Gramian coefficients ``B_k = sum_{p} A_p^H A_{k-p}``, ``k = 0..2P``."""
    C = X.coeffs
    P = X.degree
    N = X.shape[1]
    B = np.zeros((2 * P + 1, N, N), dtype=complex)
    for p in range(P + 1):
        Ah = C[p].conj().T
        for q in range(P + 1):
            B[p + q] += Ah @ C[q]
    return GramPoly(B, check=False)


def is_real(G, tol=DEFAULT.real):
    """Check that all coefficients of ``G`` are real up to ``tol``.

    Returns ``(flag, max_imag)`` where ``max_imag`` is the largest imaginary
    magnitude over all coefficients; ``flag`` compares it against ``tol``
    times the Frobenius norm of the whole coefficient stack.
    """
    C = G.coeffs
    max_imag = float(np.abs(C.imag).max(initial=0.0))
    return max_imag <= tol * numeric.fro(C), max_imag


def relative_imag(G):
    """``max |Im B_k|`` divided by the coefficient norm (0 for the zero polynomial)."""
    scale = numeric.fro(G.coeffs)
    return float(np.abs(G.coeffs.imag).max(initial=0.0) / scale) if scale else 0.0


def psd_profile(G, t_samples=DEFAULT_T_SAMPLES, tol=DEFAULT.rank, real_tol=DEFAULT.real):
    """Sampled positive-semidefiniteness diagnostics of a real Gramian.

    This samples ``G(t)``; it is a diagnostic, not a certificate.

    Returns
    -------
    min_eig : float
        Smallest eigenvalue of ``G(t)`` over the samples.
    max_rank : int
        Largest numerical rank of ``G(t)`` over the samples.
    rank_at_0 : int
        Numerical rank of ``G(0) = B_0``.
    """
    ok, max_imag = is_real(G, real_tol)
    if not ok:
        raise NotRealGramian(f"Gramian has imaginary part {max_imag:.3e}")
    Greal = PolyMatrix(G.coeffs.real)
    min_eig = np.inf
    max_rank = 0
    for t in t_samples:
        Gt = evaluate(Greal, t).real
        Gt = 0.5 * (Gt + Gt.T)
        min_eig = min(min_eig, float(np.linalg.eigvalsh(Gt)[0]))
        max_rank = max(max_rank, numeric.rank(Gt, tol))
    return min_eig, max_rank, numeric.rank(G.coeffs[0].real, tol)

"""Local dimension estimates for the real and complex-only strata.

At a sampled point ``(W, R)`` of the representation variety we compute

* the *chart dimension*: the dimension of the tangent space cut out by the
  linearized constraint ``dW R + W dR = 0`` plus first-order orthogonality
  of the rows of ``R_0`` (the gauge that removes the constant rotation);
* the *image rank*: the rank of the differential of
  ``(W, R) -> coefficients of gram(factor)`` restricted to that tangent
  space, estimated by central finite differences.

Comparing the real stratum (``W = 0``) with the complex-only stratum
(``W != 0``) gives a desk-scale proxy for which of the two fills more of the
space of real polynomial Gramians. The closed-form counts in
:func:`hypothesized_dims` are hypotheses the scan tests, not results.
"""

import csv
import io
import itertools
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import hrep as hr
from . import numeric
from .exceptions import DimensionError, PolygramError
from .polymat import PolyMatrix, gram
from .tolerances import DEFAULT

FD_STEP = 1e-5
JAC_RANK_TOL = 1e-6
IMAG_LEAK_TOL = 1e-6

CSV_HEADER = ["d", "P", "N", "trials", "chart_dim_C", "image_rank_C",
              "chart_dim_R", "image_rank_R", "margin", "agreement", "flags"]


class RankUnstable(PolygramError):
    """Jacobian rank changed when the finite-difference step was halved."""


class StepTooSmall(RankUnstable):
    pass


class StepTooLarge(RankUnstable):
    pass


# -- parametrization -------------------------------------------------------

def _sym_index(d):
    return np.triu_indices(d)


def n_params(d, N, P):
    return 2 * P * d * (d + 1) // 2 + (P + 1) * d * N


def to_params(W, R):
    """Flatten ``(W, R)``: upper triangles of the ``W_k``, then the ``R_p``."""
    d = R.shape[1]
    iu = _sym_index(d)
    return np.concatenate([np.asarray(W)[:, iu[0], iu[1]].ravel(), np.asarray(R).ravel()])


def from_params(theta, d, N, P):
    iu = _sym_index(d)
    m = d * (d + 1) // 2
    W = np.zeros((2 * P, d, d))
    W[:, iu[0], iu[1]] = theta[:2 * P * m].reshape(2 * P, m)
    W = W + np.triu(W, 1).transpose(0, 2, 1)
    R = theta[2 * P * m:].reshape(P + 1, d, N)
    return W, R


def hypothesized_dims(d, N, P):
    """Closed-form ``(chart_dim_C, image_rank_R)`` under a generic-independence hypothesis.

    ``P d (d+1) + d N - d (d-1)/2`` for the complex-only stratum and
    ``(P+1) d N - d (d-1)/2`` for the real one.
    """
    gauge = d * (d - 1) // 2
    return P * d * (d + 1) + d * N - gauge, (P + 1) * d * N - gauge


def ambient_dim(N, P):
    return N * (N + 1) // 2 * (2 * P + 1)


# -- tangent space ---------------------------------------------------------

def _linearized(theta, W0, R0, d, N, P):
    dW, dR = from_params(theta, d, N, P)
    cons = hr.toeplitz_from_blocks(dW, P) @ hr.stack(R0) + hr.toeplitz_from_blocks(W0, P) @ hr.stack(dR)
    S = R0[0] @ dR[0].T
    S = S + S.T
    iu = np.triu_indices(d, 1)
    return np.concatenate([cons.ravel(), S[iu]])


def constraint_matrix(h):
    """Matrix of the linearized constraint and gauge equations at ``h``."""
    d, N, P = h.d, h.N, h.P
    n = n_params(d, N, P)
    e = np.zeros(n)
    cols = []
    for j in range(n):
        e[j] = 1.0
        cols.append(_linearized(e, h.W, h.R, d, N, P))
        e[j] = 0.0
    return np.column_stack(cols)


def tangent_basis(h, tol=DEFAULT):
    """Orthonormal basis (columns) of the gauge-fixed tangent space at ``h``.

    ``h`` must be valid and canonical, so that ``R_0 R_0^T`` is diagonal and
    keeping it diagonal to first order fixes the rotation gauge.
    """
    report = hr.validate(h, tol)
    if not report.passed or not report.canonical:
        raise DimensionError("tangent_basis needs a valid canonical point: "
                             + ("; ".join(report.failures) or "R_0 not in the canonical set"))
    return numeric.nullspace(constraint_matrix(h), tol.rank)


# -- Gramian map -----------------------------------------------------------

def gram_features(W, R):
    """Upper triangles of ``Re B_k`` and strict upper triangles of ``Im B_k``."""
    N = R.shape[2]
    B = gram(PolyMatrix(hr.mix(W, R))).coeffs
    iu = np.triu_indices(N)
    iu1 = np.triu_indices(N, 1)
    return B.real[:, iu[0], iu[1]].ravel(), B.imag[:, iu1[0], iu1[1]].ravel()


def gram_jacobian(h, basis, fd_step=FD_STEP):
    """Central-difference Jacobian of the Gramian map along each basis column.

    Steps leave the variety at second order; only the differential is used.
    Returns the real-part Jacobian and the largest imaginary-part derivative.
    """
    d, N, P = h.d, h.N, h.P
    theta = to_params(h.W, h.R)
    s = fd_step * max(1.0, float(np.linalg.norm(theta)))
    cols = []
    leak = 0.0
    for v in basis.T:
        fp_re, fp_im = gram_features(*from_params(theta + s * v, d, N, P))
        fm_re, fm_im = gram_features(*from_params(theta - s * v, d, N, P))
        cols.append((fp_re - fm_re) / (2 * s))
        leak = max(leak, float(np.abs((fp_im - fm_im) / (2 * s)).max(initial=0.0)))
    J = np.column_stack(cols) if cols else np.zeros((ambient_dim(N, P), 0))
    return J, leak


def gram_map_rank(h, basis, fd_step=FD_STEP, rank_tol=JAC_RANK_TOL, check=True):
    """Rank of the Gramian map's differential on ``span(basis)``.

    With ``check`` the rank is recomputed at ``fd_step / 2`` and a
    :class:`RankUnstable` subclass is raised if the two disagree.
    """
    J, _ = gram_jacobian(h, basis, fd_step)
    r = numeric.rank(J, rank_tol) if J.size else 0
    if check:
        J2, _ = gram_jacobian(h, basis, fd_step / 2)
        r2 = numeric.rank(J2, rank_tol) if J2.size else 0
        if r2 > r:
            raise StepTooSmall(f"rank {r} at step {fd_step:g} but {r2} at {fd_step / 2:g}")
        if r2 < r:
            raise StepTooLarge(f"rank {r} at step {fd_step:g} but {r2} at {fd_step / 2:g}")
    return r


# -- scan ------------------------------------------------------------------

@dataclass
class ScanConfig:
    grid: list
    trials: int = 4
    seed: int = 0
    fd_step: float = FD_STEP
    rank_tol: float = JAC_RANK_TOL
    scale: float = 1.0
    workers: int = 1

    def __post_init__(self):
        self.grid = [tuple(int(x) for x in g) for g in self.grid]
        if self.trials < 1:
            raise DimensionError("trials must be at least 1")
        if not self.fd_step > 0:
            raise DimensionError("fd_step must be positive")
        for d, N, P in self.grid:
            if d < 1 or N < d or P < 1:
                raise DimensionError(f"bad grid triple (d={d}, N={N}, P={P})")

    @classmethod
    def from_ranges(cls, ds, Ps, Ns, **kw):
        grid = [(d, N, P) for d, P, N in itertools.product(ds, Ps, Ns) if N >= d]
        return cls(grid=grid, **kw)

    def to_dict(self):
        return {"grid": [list(g) for g in self.grid], "trials": self.trials, "seed": self.seed,
                "fd_step": self.fd_step, "rank_tol": self.rank_tol, "scale": self.scale}


@dataclass
class TrialResult:
    chart_C: int = None
    rank_C: int = None
    chart_R: int = None
    rank_R: int = None
    flags: list = field(default_factory=list)
    error: str = None

    @property
    def key(self):
        return (self.chart_C, self.rank_C, self.chart_R, self.rank_R)


@dataclass
class ScanRow:
    d: int
    N: int
    P: int
    trials: int
    chart_dim_C: int = None
    image_rank_C: int = None
    chart_dim_R: int = None
    image_rank_R: int = None
    agreement: int = 0
    flags: list = field(default_factory=list)

    @property
    def completed(self):
        return self.agreement > 0

    @property
    def margin(self):
        if self.image_rank_R is None or self.image_rank_C is None:
            return None
        return self.image_rank_R - self.image_rank_C

    def as_csv_row(self):
        def fmt(v):
            return "" if v is None else str(v)
        return [self.d, self.P, self.N, self.trials, fmt(self.chart_dim_C), fmt(self.image_rank_C),
                fmt(self.chart_dim_R), fmt(self.image_rank_R), fmt(self.margin), self.agreement,
                ";".join(self.flags)]


def _stratum(h, fd_step, rank_tol, flags, label):
    basis = tangent_basis(h)
    try:
        r = gram_map_rank(h, basis, fd_step, rank_tol, check=True)
    except RankUnstable as exc:
        flags.append(f"{type(exc).__name__}_{label}")
        r = gram_map_rank(h, basis, fd_step, rank_tol, check=False)
    _, leak = gram_jacobian(h, basis, fd_step)
    if leak > IMAG_LEAK_TOL:
        flags.append(f"imag_leak_{label}")
    return basis.shape[1], r


def run_trial(d, N, P, seed, fd_step=FD_STEP, rank_tol=JAC_RANK_TOL, scale=1.0):
    """Chart dimensions and image ranks of both strata for one seeded draw."""
    out = TrialResult()
    try:
        hC = hr.canonicalize_hrep(hr.sample(d, N, P, seed=seed, scale=scale))
        hR = hr.canonicalize_hrep(hr.sample(d, N, P, seed=seed, scale=0.0))
        out.chart_C, out.rank_C = _stratum(hC, fd_step, rank_tol, out.flags, "C")
        out.chart_R, out.rank_R = _stratum(hR, fd_step, rank_tol, out.flags, "R")
    except PolygramError as exc:
        out.error = f"{type(exc).__name__}: {exc}"
        return out
    amb = ambient_dim(N, P)
    if not (out.rank_C <= out.chart_C and out.rank_R <= out.chart_R
            and max(out.rank_C, out.rank_R) <= amb
            and max(out.chart_C, out.chart_R) <= n_params(d, N, P)):
        out.flags.append("bound_violation")
    return out


def _run_trial_args(args):
    return run_trial(*args)


def _aggregate(d, N, P, results):
    row = ScanRow(d=d, N=N, P=P, trials=len(results))
    ok = [r for r in results if r.error is None]
    n_err = len(results) - len(ok)
    if n_err:
        row.flags.append(f"errors={n_err}")
    if ok:
        counts = Counter(r.key for r in ok)
        # ties broken by the smallest tuple, independent of trial order
        best = max(counts.values())
        modal = min(k for k, c in counts.items() if c == best)
        row.chart_dim_C, row.image_rank_C, row.chart_dim_R, row.image_rank_R = modal
        row.agreement = best
    seen = sorted({f.split("=")[0] for r in ok for f in r.flags})
    row.flags.extend(seen)
    return row


def trial_seed(seed, trial):
    """Per-trial seed: base seed plus trial index, shared across grid triples."""
    return seed + trial


def scan(cfg):
    """Run every grid triple and return rows sorted by ``(d, P, N)``."""
    jobs = [(d, N, P, trial_seed(cfg.seed, t), cfg.fd_step, cfg.rank_tol, cfg.scale)
            for d, N, P in cfg.grid for t in range(cfg.trials)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_trial_args, jobs, chunksize=4))
    else:
        results = [_run_trial_args(j) for j in jobs]
    by_triple = {}
    for job, res in zip(jobs, results):
        by_triple.setdefault(job[:3], []).append(res)
    rows = [_aggregate(d, N, P, by_triple[(d, N, P)]) for d, N, P in by_triple]
    rows.sort(key=lambda r: (r.d, r.P, r.N))
    return rows


def to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.as_csv_row())
    return buf.getvalue()

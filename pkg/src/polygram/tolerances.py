"""Default numerical tolerances.

All tolerances are relative to the Frobenius norm of the operand they are
checked against. ``Tolerances.scaled`` multiplies every entry by one factor,
which is how the command line's global ``--tol`` knob is applied.
"""

import dataclasses
import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    sym: float = 1e-8         # symmetry of input matrices
    orth: float = 1e-10       # orthonormality / orthogonal rows
    recon: float = 1e-10      # eigendecomposition reconstruction
    rank: float = 1e-9        # singular value cut, relative to the largest
    real: float = 1e-9        # imaginary part of a Gramian
    cons: float = 1e-9        # block-Toeplitz constraint W R = 0
    gap: float = 1e-8         # eigenvalue gap for canonical forms
    classify: float = 1e-7    # W = 0 decision threshold
    recover: float = 1e-7     # per-step residuals of the recovery map
    entry: float = 1e-9       # "first non-zero entry" cut, relative to row norm

    def scaled(self, factor):
        if factor <= 0:
            raise ValueError(f"tolerance scale must be positive, got {factor}")
        return dataclasses.replace(
            self, **{f.name: getattr(self, f.name) * factor
                     for f in dataclasses.fields(self)})


DEFAULT = Tolerances()

ENV_VAR = "POLYGRAM_TOL"


def from_environment(scale=None):
    """Defaults scaled by ``scale`` or, if that is None, by ``$POLYGRAM_TOL``."""
    if scale is None:
        raw = os.environ.get(ENV_VAR)
        scale = float(raw) if raw else 1.0
    return DEFAULT.scaled(scale)

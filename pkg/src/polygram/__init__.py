"""Real polynomial Gramians through their block-Toeplitz (W, R) representation."""

__version__ = "0.1.0"

from .exceptions import PolygramError
from .factor import (
    CanonicalFactor, Classification, Verdict, canonicalize_factor, classify, recover_hrep,
    skew_offset_symmetric, solve_skew_particular)
from .hrep import (
    HRep, assemble_mixer, assemble_toeplitz, canonicalize_hrep, sample, to_factor, validate)
from .polymat import GramPoly, PolyMatrix, evaluate, gram, is_real, psd_profile
from .tolerances import DEFAULT, Tolerances

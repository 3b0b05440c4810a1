"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line can map failures
to its documented exit codes without a lookup table of its own.
"""


class PolygramError(Exception):
    exit_code = 1


class DimensionError(PolygramError, ValueError):
    exit_code = 2


class SamplingFailed(PolygramError):
    exit_code = 2


class InvalidHRep(PolygramError):
    exit_code = 3


class NotSymmetric(PolygramError, ValueError):
    exit_code = 5


class RankDeficient(PolygramError):
    exit_code = 5


class RankDeficientLead(RankDeficient):
    """The constant coefficient of a factor does not have full row rank."""


class DegenerateSpectrum(PolygramError):
    """Repeated eigenvalues make the canonical representative non-unique."""
    exit_code = 5


class UnitarityFailure(PolygramError):
    exit_code = 5


class NotRealGramian(PolygramError):
    exit_code = 4


# psd_profile precondition; same condition as NotRealGramian.
NotReal = NotRealGramian


class NotRepresentable(NotRealGramian):
    """A recovery step found a non-symmetric block or a nonzero residual."""


class StructureViolation(PolygramError):
    exit_code = 5


class NotSkew(PolygramError, ValueError):
    exit_code = 5


class Infeasible(PolygramError):
    exit_code = 6

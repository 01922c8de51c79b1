"""Exception hierarchy shared by all modules."""


class NsBoundError(Exception):
    """Base class for every error raised by this package."""


class BadLevel(NsBoundError):
    """The level is not a prime >= 7."""


class BadIndex(NsBoundError):
    """The subgroup index d does not divide (p-1)/2 or is < 3."""


class BadSubgroup(NsBoundError):
    """An explicitly supplied subgroup violates its invariants."""


class DomainError(NsBoundError):
    """An operand left the domain of an operation (log of 0, division
    by an interval containing 0, evaluation point outside the
    fundamental domain, ...)."""


class ZeroElement(NsBoundError):
    """A nonzero field element was required."""


class PrecisionExhausted(NsBoundError):
    """A certified comparison stayed undecided at the precision cap."""


class InternalInconsistency(NsBoundError):
    """Two independent computations of the same quantity disagree.
    Always signals an implementation bug, never bad input."""


class BoundViolation(NsBoundError):
    """A certified interval landed strictly outside a proven bound.
    Always signals an implementation bug, never bad input."""


class IndependenceFailure(NsBoundError):
    """No (d-1)-subset of the unit system certified a nonzero
    log-matrix determinant."""


class TruncationTooSmall(NsBoundError):
    """A formal series was requested with truncation below one full
    power of q."""


class AllOrdersZero(NsBoundError):
    """Every unit translate has vanishing order at the cusp, so no
    combined unit with orders of both signs exists."""

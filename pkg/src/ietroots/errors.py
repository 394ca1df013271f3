"""Exception hierarchy shared by every module of the package."""


class IETError(Exception):
    """Base class for all errors raised by :mod:`ietroots`."""


# exact arithmetic ---------------------------------------------------------

class BasisError(IETError, ValueError):
    pass


class MissingUnit(BasisError):
    pass


class DuplicateRadicand(BasisError):
    pass


class NonPositiveRadicand(BasisError):
    pass


class PerfectSquareRadicand(BasisError):
    pass


class NonSquarefreeRadicand(BasisError):
    pass


class BasisMismatch(IETError, ValueError):
    pass


class PrecisionExhausted(IETError, ArithmeticError):
    """The precision budget ran out before a sign could be certified."""


class UnsupportedDimension(IETError, ValueError):
    pass


# interval exchanges -------------------------------------------------------

class NotABijection(IETError, ValueError):
    pass


class NonPositiveLength(IETError, ValueError):
    pass


class LengthSumMismatch(IETError, ValueError):
    pass


class OutOfDomain(IETError, ValueError):
    pass


class DomainMismatch(IETError, ValueError):
    pass


class IrrationalRescale(IETError, ValueError):
    pass


# dynamics -----------------------------------------------------------------

class BudgetExceeded(IETError):
    """An iteration budget ran out; the answer is inconclusive, not negative."""

    def __init__(self, message, budget="max_iter", partial=None):
        super().__init__(message)
        self.budget = budget
        self.partial = partial


class Cancelled(IETError):
    pass


class PeriodicSeed(IETError):
    pass


class TruncatedChains(IETError):
    pass


class BadInterval(IETError, ValueError):
    pass


class HeightMismatch(IETError, ValueError):
    pass


class LevelsDoNotTile(IETError):
    pass


class NotCandidate(IETError, ValueError):
    pass


class NotMinimal(IETError, ValueError):
    pass


# roots --------------------------------------------------------------------

class EqualHeights(IETError, ValueError):
    pass


class NotARotationBase(IETError, ValueError):
    pass


class NotMinimalBase(IETError, ValueError):
    pass


class NoMinimalityEvidence(IETError, ValueError):
    pass


class DependentParameters(IETError, ValueError):
    pass


class VerificationFailed(IETError):
    """An exact identity that the construction guarantees did not hold."""


# documents ----------------------------------------------------------------

class DocumentError(IETError, ValueError):
    """A JSON document that does not describe a valid object.

    ``pointer`` is an RFC 6901 JSON pointer to the offending field.
    """

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(message)
        self.pointer = pointer

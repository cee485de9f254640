"""Exception hierarchy.

Every error carries a stable ``code`` (its class name) so the CLI can emit a
machine-readable error object.  The three families map to CLI exit codes:
precondition failures (2), exhausted budgets (3) and invariant traps (4).
"""


class HilbertLabError(Exception):
    exit_code = 1

    @property
    def code(self) -> str:
        return type(self).__name__


class PreconditionError(HilbertLabError, ValueError):
    exit_code = 2


class BudgetError(HilbertLabError, RuntimeError):
    exit_code = 3


class InvariantTrap(HilbertLabError, AssertionError):
    exit_code = 4


# projective core
class NonCollinear(PreconditionError):
    pass


class DegenerateConfiguration(PreconditionError):
    pass


class NoCommonChart(PreconditionError):
    pass


# convex domains
class NotInterior(PreconditionError):
    pass


class NotOnBoundary(PreconditionError):
    pass


class OutsideDomain(PreconditionError):
    pass


class OutOfRange(PreconditionError):
    pass


class EmptyAfterRestriction(PreconditionError):
    pass


# simplices
class DependentVertices(PreconditionError):
    pass


class InteriorLeak(PreconditionError):
    pass


class EmptyInterior(PreconditionError):
    pass


class NotInSimplex(PreconditionError):
    pass


class NotInFace(PreconditionError):
    pass


class CrossSegmentInBoundary(PreconditionError):
    pass


class DegenerateHull(PreconditionError):
    pass


class FaceIntersectionUnbounded(PreconditionError):
    pass


class BudgetExceeded(BudgetError):
    pass


# projections
class InKernel(PreconditionError):
    pass


class DirectSumFailure(InvariantTrap):
    pass


class ToleranceNotReached(BudgetError):
    pass


# certification
class EmptyFamily(PreconditionError):
    pass


class NotQuasiGeodesic(PreconditionError):
    pass


# example constructions
class DegenerateInterval(PreconditionError):
    pass


class NotHalfTriangle(PreconditionError):
    pass


class FrameFailure(PreconditionError):
    pass


class NonPreserving(PreconditionError):
    pass


class NotFixingVertices(PreconditionError):
    pass

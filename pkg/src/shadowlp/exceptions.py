"""Exception hierarchy shared by all solver modules."""


class ShadowLPError(Exception):
    """Base class for every error raised by this package."""


class SingularMatrix(ShadowLPError, ArithmeticError):
    pass


class SingularBasis(SingularMatrix):
    """The rows selected by a basis are linearly dependent."""


class DependentRows(SingularMatrix):
    pass


class NotPointed(ShadowLPError, ValueError):
    """Constraint matrix does not have full column rank."""


class NoFeasibleBasis(ShadowLPError):
    pass


class InfeasibleBasis(ShadowLPError, ValueError):
    pass


class InfeasibleStart(InfeasibleBasis):
    """Starting basis is infeasible or not optimal for the start objective."""


class NonIntegralMatrix(ShadowLPError, ValueError):
    pass


class NotPerfectMatching(ShadowLPError, ValueError):
    pass


class UnboundedDirection(ShadowLPError):
    """The objective leaves the support of the normal fan.

    ``point`` is the vertex where the pivot loop stopped and ``ray`` an
    unbounded edge direction of the polyhedron starting there.
    """

    def __init__(self, message, basis=None, point=None, ray=None, lam=None):
        super().__init__(message)
        self.basis = basis
        self.point = point
        self.ray = ray
        self.lam = lam


class Unbounded(ShadowLPError):
    pass


class DegenerateSegment(ShadowLPError):
    """The parametric segment is not in general position."""


class DeltaOverestimated(ShadowLPError):
    pass


class NoLargeCoefficient(DeltaOverestimated):
    pass


class ZeroRow(ShadowLPError, ValueError):
    pass


class BadParams(ShadowLPError, ValueError):
    pass


class RetriesExhausted(ShadowLPError):
    pass

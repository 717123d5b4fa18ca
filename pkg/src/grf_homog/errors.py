"""Exception hierarchy.

Every error raised by the package derives from :class:`GeometryError`, which
is itself a ``ValueError`` so callers that only care about bad input can catch
that.
"""

from __future__ import annotations


class GeometryError(ValueError):
    pass


# lie_core
class DimensionMismatch(GeometryError):
    pass


class AntisymmetryViolation(GeometryError):
    def __init__(self, index, defect):
        self.index = index
        self.defect = defect
        super().__init__(f"structure constants not antisymmetric at {index}: defect {defect:.3e}")


class JacobiViolation(GeometryError):
    def __init__(self, triple, defect):
        self.triple = triple
        self.defect = defect
        super().__init__(f"Jacobi identity fails for basis triple {triple}: defect {defect:.3e}")


class NotReductive(GeometryError):
    def __init__(self, pair, component, value):
        self.pair = pair
        self.component = component
        self.value = value
        super().__init__(
            f"bracket of basis pair {pair} has component {value:.3e} along e{component + 1}, "
            "outside the required subspace"
        )


# forms / curvature
class DegreeOverflow(GeometryError):
    pass


class SingularMetric(GeometryError):
    pass


class NotUnimodular(GeometryError):
    pass


class NonInvariantMetric(GeometryError):
    pass


# brf / flow
class OutOfDomain(GeometryError):
    pass


class MaxIterations(GeometryError):
    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class LeftDomain(GeometryError):
    def __init__(self, message, last_params=None):
        self.last_params = last_params
        super().__init__(message)


class ChartDegenerate(GeometryError):
    pass


class StepUnderflow(GeometryError):
    def __init__(self, message, t=None, y=None):
        self.t = t
        self.y = y
        super().__init__(message)


class DomainExit(GeometryError):
    def __init__(self, message, t=None, y=None):
        self.t = t
        self.y = y
        super().__init__(message)


# catalog
class NotCoprime(GeometryError):
    pass


class BadOrder(GeometryError):
    pass


class NotCompactType(GeometryError):
    pass


class ConditionViolated(GeometryError):
    def __init__(self, condition, defect):
        self.condition = condition
        self.defect = defect
        super().__init__(f"condition {condition}) violated: defect {defect:.3e}")

"""Exception hierarchy shared by all torifan modules."""

from __future__ import annotations


class TorifanError(Exception):
    """Base class for every error raised by this package."""


class DependentGenerators(TorifanError):
    pass


class FanError(TorifanError):
    """Raised when raw fan data violates a structural invariant."""


class NonPrimitiveRay(FanError):
    pass


class DuplicateRay(FanError):
    pass


class BadConeSize(FanError):
    pass


class UnusedRay(FanError):
    pass


class FaceIntersectionViolation(FanError):
    pass


class NotSpanning(FanError):
    pass


class RayAlreadyPresent(FanError):
    pass


class NonPrimitiveImage(FanError):
    pass


class CollapsedCone(FanError):
    pass


class NotComplete(FanError):
    pass


class SumNotLocated(TorifanError):
    """The sum of a primitive collection lies in no cone: the fan is corrupt."""


class NotWeakFano(TorifanError):
    pass


class BadRelationShape(TorifanError):
    pass


class DichotomyViolated(TorifanError):
    pass


class DeformedFanInvalid(TorifanError):
    pass


class NewRayCollision(TorifanError):
    pass


class NotApplicable(TorifanError):
    pass


class UnknownName(TorifanError, KeyError):
    pass

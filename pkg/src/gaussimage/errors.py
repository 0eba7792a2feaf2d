"""Exception types raised across the package."""


class GeometryError(ValueError):
    pass


class EmptyRegion(GeometryError):
    pass


class AntipodalInput(GeometryError):
    pass


class DegeneratePolygon(GeometryError):
    pass


class NotInHemisphere(GeometryError):
    pass


class NotOnBoundary(GeometryError):
    pass


class InvalidBody(GeometryError):
    pass


class HemisphereViolation(GeometryError):
    pass


class PartitionFailure(RuntimeError):
    pass


class HypothesisNotEstablished(RuntimeError):
    """A checker was called without a passing a.e.-equality report."""


class InputError(ValueError):
    pass

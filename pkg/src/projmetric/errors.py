"""Exception hierarchy shared by every module.

All domain errors derive from :class:`GeometryError`; the CLI maps that
base class to exit code 2 and :class:`InvalidSpec` to exit code 3.
"""


class GeometryError(ValueError):
    """Base class for domain errors (bad configuration, point outside, ...)."""


class NotCollinear(GeometryError):
    pass


class DegenerateConfiguration(GeometryError):
    pass


class DegenerateRatio(DegenerateConfiguration):
    pass


class DegeneratePosition(GeometryError):
    pass


class SingularSystem(GeometryError):
    pass


class InvalidLine(GeometryError):
    pass


class InvalidBody(GeometryError):
    pass


class PointOutside(GeometryError):
    pass


class NearBoundary(GeometryError):
    pass


class NotSymmetric(GeometryError):
    pass


class ParameterOutOfRange(GeometryError):
    pass


class NotAProjectiveCenter(GeometryError):
    pass


# conjugate_center / pencil_orbit speak of "centers"; in the Hilbert case the
# two notions coincide, so a single class serves both names.
NotACenter = NotAProjectiveCenter


class DegenerateInput(GeometryError):
    pass


class GridTooSmall(GeometryError):
    pass


class InvalidSpec(Exception):
    """Malformed body specification or run configuration."""

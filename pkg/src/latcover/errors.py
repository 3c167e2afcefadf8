"""Exception hierarchy. Every error carries enough data to be reported as JSON."""


class LatcoverError(Exception):
    """Base class; ``witness`` holds machine-checkable data when available."""

    def __init__(self, message: str = "", witness=None):
        super().__init__(message)
        self.witness = witness


class ZeroVector(LatcoverError, ValueError):
    pass


class PointNotInLattice(LatcoverError, ValueError):
    pass


class NotSublattice(LatcoverError, ValueError):
    pass


class PointOutsidePolytope(LatcoverError, ValueError):
    pass


class NotAVertex(LatcoverError, ValueError):
    pass


class NotPointed(LatcoverError, ValueError):
    pass


class DimensionError(LatcoverError, ValueError):
    """Wrong dimension for an operation (3D-only routines, d >= 5 families)."""


class NotVeryAmple(LatcoverError):
    """Raised with witness ``(vertex, hilbert_element)`` in ambient coordinates."""


class NotUnimodularPyramid(LatcoverError):
    pass


class PointNotOnBoundary(LatcoverError, ValueError):
    pass


class EmptyEllipsoid(LatcoverError, ValueError):
    pass


class NotExtremal(LatcoverError, ValueError):
    pass


class SearchExhausted(LatcoverError):
    """A bounded rational search (peeling, contraction) ran out of halvings."""


class BOutOfRange(LatcoverError, ValueError):
    pass


class ChainStepNotNormal(LatcoverError):
    pass


class VerificationFailed(LatcoverError):
    pass


class TooManyCells(LatcoverError):
    pass


class CenterNotHalfIntegral(LatcoverError, ValueError):
    pass


class PreconditionUnmet(LatcoverError, ValueError):
    pass


class DimensionTooSmall(DimensionError):
    pass

"""Exception hierarchy for the placement toolkit.

Every error a module can raise derives from :class:`PlacerError`, so the CLI
can map the whole family to exit code 1 with a one-line message.
"""

from __future__ import annotations


class PlacerError(Exception):
    """Base error of the package."""


# geometry
class DegenerateHull(PlacerError):
    """Fewer than three points, or all points collinear."""


class ParallelLines(PlacerError):
    pass


class ParallelPlanes(PlacerError):
    pass


class NoIntersection(PlacerError):
    """Line parallel to the plane it should cross."""


class InvalidMesh(PlacerError):
    """Mesh is not watertight or not consistently oriented."""


# statics
class Unsupported(PlacerError):
    """A non-fixed object has no contact at all."""


class NoEquilibrium(PlacerError):
    """Gravity wrench is not in the range of the contact map."""


class Infeasible(PlacerError):
    """No force distribution satisfies equilibrium and friction constraints."""


# robustness
class NotInEquilibrium(PlacerError):
    pass


class NoAxes(PlacerError):
    """Contact set too small or collinear to define toppling axes."""


# sampling
class NoCandidates(PlacerError):
    """All sampling weights are zero."""


# matching
class MatchingError(PlacerError):
    pass


class DegenerateTriangle(MatchingError):
    """Centre of mass lies on the apex line of the construction."""


class TooFarApart(MatchingError):
    """Features cannot host two points at the requested separation."""


# pose
class DegeneratePose(PlacerError):
    pass


class NoContact(PlacerError):
    pass


# io
class SceneError(PlacerError):
    """Malformed scene file, missing mesh or invalid quaternion."""


class UnknownScene(PlacerError):
    pass

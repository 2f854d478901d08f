"""Exception hierarchy.

Every error carries a process exit code used by the CLI:
2 bad input / schema, 3 geometry, 4 divergent minimization, 5 precision.
"""


class GcdegError(Exception):
    exit_code = 2


# -- input / schema ---------------------------------------------------------

class SchemaError(GcdegError):
    exit_code = 2


class UnknownSubcommand(SchemaError):
    pass


class InvalidCartanDatum(SchemaError):
    pass


class UnknownCatalogName(SchemaError):
    pass


class InconsistentInputs(SchemaError):
    pass


class NotDominant(SchemaError):
    pass


class NotDominantPiece(SchemaError):
    pass


class TwoRhoOutsideDomain(SchemaError):
    pass


class ComponentOutsidePolytope(SchemaError):
    pass


class BoxTooTight(SchemaError):
    pass


# -- geometry ---------------------------------------------------------------

class GeometryError(GcdegError):
    exit_code = 3


class Unbounded(GeometryError):
    pass


class Empty(GeometryError):
    pass


class LowerDimensional(GeometryError):
    pass


class DegenerateSimplex(GeometryError):
    pass


# -- minimization -----------------------------------------------------------

class DivergentMinimizer(GcdegError):
    """Coercivity fails: the infimum of h is approached only at infinity."""
    exit_code = 4


class NoFaceAccepted(GcdegError):
    exit_code = 4


class DependentActiveRoots(GcdegError):
    exit_code = 3


# -- numerics ---------------------------------------------------------------

class PrecisionError(GcdegError):
    exit_code = 5


class PrecisionLoss(PrecisionError):
    pass


class DegreeCapExceeded(PrecisionError):
    pass

"""Exception hierarchy.

Every error is a ``ValueError`` so callers that only care about bad input can
catch that. ``exit_code`` is used by the CLI: 3 for bad data, 4 for numerical
degeneracy.
"""


class HyperdistError(ValueError):
    exit_code = 3


class DimensionMismatch(HyperdistError):
    pass


class OrientationMismatch(DimensionMismatch):
    pass


class DegenerateNormal(HyperdistError):
    exit_code = 4


class NonpositiveWeight(HyperdistError):
    pass


class NotFullRank(HyperdistError):
    exit_code = 4


class BadParameter(HyperdistError):
    pass


class EmptyInput(HyperdistError):
    pass


class DegenerateTurn(HyperdistError):
    exit_code = 4


class ParallelLines(HyperdistError):
    exit_code = 4


class MismatchedK(HyperdistError):
    pass


class TooFewPoints(HyperdistError):
    pass


class BadK(HyperdistError):
    pass


class DegenerateX(HyperdistError):
    exit_code = 4

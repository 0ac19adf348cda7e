"""Exception hierarchy shared by all modlyap modules."""


class ModlyapError(Exception):
    """Base class for every error raised by this package."""


class NotInMonoid(ModlyapError):
    """Matrix is not a product of the two nonnegative shear generators."""


class NotHyperbolic(ModlyapError):
    """Matrix has |trace| <= 2, so it has no pair of real fixed points."""


class NotStrict(ModlyapError):
    """Word has a zero exponent (or odd length) where a strict word is required."""


class EqualWords(ModlyapError):
    """Two periodic words describe the same continued fraction."""


class BadRange(ModlyapError):
    """Index range does not select a valid slice of a cycle."""


class NotNeighbors(ModlyapError):
    """Fractions are not adjacent in any row of the tree."""


class NotConsecutive(ModlyapError):
    """Fractions are not consecutive in the requested tree level."""


class InvalidCF(ModlyapError):
    """Continued-fraction quotients violate the input grammar."""


class OutOfRange(ModlyapError):
    """Numeric argument lies outside the documented domain."""


class QuadratureNotConverged(ModlyapError):
    """Doubling the quadrature order moved the result more than tolerated."""


class PathTooLow(ModlyapError):
    """An integration segment dips below the minimum height guard."""


class IdentityFailed(ModlyapError):
    """An exact polynomial division identity does not hold."""


class MonotonicityViolated(ModlyapError):
    """A kernel combination fails to decrease on the scanned grid."""


class BoundViolated(ModlyapError):
    """A strict kernel-sum bound fails on the scanned grid."""


class TriangleViolated(ModlyapError):
    """A weighted triangle inequality between kernel sums fails."""


class ConvexityViolated(ModlyapError):
    """A discrete convexity inequality fails on a level triple."""


class NoSuchA(ModlyapError):
    """No block exponent below the cap produces a small enough ratio."""


class EmptyData(ModlyapError):
    """Input table holds no usable rows."""

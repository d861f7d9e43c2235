"""Exception hierarchy shared by all stovex modules."""


class StovexError(Exception):
    """Base class for all stovex errors."""


class OutOfRangeError(StovexError):
    """A probability parameter lies outside (0, 1)."""


class DegenerateError(StovexError):
    """b1 <= b2, which collapses the liquid region."""


class OutsideLiquidRegionError(StovexError):
    """The requested ratio lies outside the open cone kappa < x/y < 1/kappa."""


class OutOfDomainError(StovexError):
    """Coordinates outside the sampled window."""


class OutsideExactWindowError(StovexError):
    """Observable queried beyond the exactness window of a truncated run."""


class WindowExhaustedError(StovexError):
    """Stepping a truncated state past the point where any particle is exact."""


class TooLargeError(StovexError):
    """Brute-force oracle invoked beyond its state-space guard."""


class NotOnStochasticLineError(StovexError):
    """Weight set violates the quadratic normalizability condition."""


class DenominatorVanishesError(StovexError):
    """A Bethe pairwise denominator is numerically zero."""


class QuadratureNotConvergedError(StovexError):
    """Node doubling moved the result by more than the tolerance."""


class ContourFamilyInfeasibleError(StovexError):
    """No nested disjoint-circle family exists for the given (tau, L)."""


class ZetaOnCutError(StovexError):
    """zeta on the nonnegative real axis, where the q-Laplace kernel is undefined."""


class OnBranchCutError(StovexError):
    """Evaluation point lies on a logarithm branch cut."""


class DivergentParameterError(StovexError):
    """Infinite q-product requested with |q| >= 1."""


class OutOfSupportedRangeError(StovexError):
    """Argument outside the numerically supported range."""

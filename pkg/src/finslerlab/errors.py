"""Exception types shared by the whole library.

Every failure that a caller is expected to branch on is a distinct class.
Numerical failure types carry the offending point and the measured value so
that reports can say exactly where an identity broke.
"""

from __future__ import annotations


class FinslerLabError(Exception):
    """Base class for all library errors."""


class ZeroSection(FinslerLabError):
    """A point's fiber part is (too close to) zero; objects are only defined on the slit bundle."""


class OrderOutOfRange(FinslerLabError):
    """Derivative order outside the supported 1..3 range of the public API."""


class DegreeOutOfRange(FinslerLabError):
    """Form degree incompatible with the requested operation."""


class BadConfig(FinslerLabError):
    """Invalid sampling or run configuration."""


class NotSemibasic(FinslerLabError):
    """Operand fails the semibasic test beyond tolerance."""


class NotSemispray(FinslerLabError):
    """Vector field fails J(S) = C beyond tolerance."""


class NotVertical(FinslerLabError):
    """Vector field has nonzero horizontal components beyond tolerance."""


class NotTorsionFree(FinslerLabError):
    """Semibasic vector 1-form with [J, L] != 0 beyond tolerance."""


class NotConnection(FinslerLabError):
    """Vector 1-form fails the Ehresmann projector laws beyond tolerance."""


class DegenerateDegree(FinslerLabError):
    """Homogeneity degree for which the reconstruction formula is singular (r = -1)."""


class HypothesisFailure(FinslerLabError):
    """A theorem's hypothesis does not hold for the supplied data.

    Distinct from a residual failure: the statement is inapplicable, not violated.
    """

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class ValidationFailure(FinslerLabError):
    """Base for energy-function axiom failures; carries the offending point."""

    def __init__(self, message: str, point=None, value: float | None = None):
        super().__init__(message)
        self.point = point
        self.value = value


class PositivityFailure(ValidationFailure):
    """Energy not strictly positive off the zero section."""


class HomogeneityFailure(ValidationFailure):
    """Energy (or other object) fails its homogeneity requirement."""


class NondegeneracyFailure(ValidationFailure):
    """Fundamental form degenerate or numerically unusable at a point."""

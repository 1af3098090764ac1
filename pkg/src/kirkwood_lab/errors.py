"""Exception hierarchy.

Every error carries a machine-readable ``context`` dict; ``code`` is the
class name and doubles as the error code in CLI output.
"""

from __future__ import annotations

from typing import Any


class KirkwoodLabError(Exception):
    """Base class for all library errors."""

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.context = context

    @property
    def code(self) -> str:
        return type(self).__name__


# --- state/basis construction -------------------------------------------------

class ZeroVector(KirkwoodLabError):
    """All amplitudes are numerically zero; no direction to normalize."""


class DimensionMismatch(KirkwoodLabError):
    """Operands live in different Hilbert-space dimensions."""


class InvalidRank(KirkwoodLabError):
    """Requested mixture rank is outside 1..dim."""


class NotHermitian(KirkwoodLabError):
    """An observable failed the Hermiticity check."""


# --- quasiprobability ---------------------------------------------------------

class ImaginaryResidue(KirkwoodLabError):
    """A marginal retained an imaginary part too large to discard."""


class NearOrthogonalPostSelection(KirkwoodLabError):
    """Pre/post overlap is numerically zero; conditioning is undefined."""


class VanishingOverlap(KirkwoodLabError):
    """A basis-pair overlap in a reconstruction denominator is numerically zero."""


class InvariantViolation(KirkwoodLabError):
    """A computed object failed its own defining invariants."""


class ZeroEvidence(KirkwoodLabError):
    """Bayes update attempted with non-positive evidence."""


# --- curve audit --------------------------------------------------------------

class TooFewPoints(KirkwoodLabError):
    """Fewer than two distinct points remain after duplicate merging."""


class NonMonotoneParameter(KirkwoodLabError):
    """Curve parameter values are not strictly increasing."""


class CurveSelfIntersects(KirkwoodLabError):
    """The curve crosses itself, so no order-preserving map exists."""


class CurveClosed(KirkwoodLabError):
    """The curve closes on itself; there is no place to cut it."""


class DegenerateScale(KirkwoodLabError):
    """The target scale (or the curve itself) has zero extent."""


class QueryOffCurve(KirkwoodLabError):
    """A query point does not lie on the curve within the snap tolerance."""


# --- scenarios ----------------------------------------------------------------

class CollinearPoints(KirkwoodLabError):
    """Circle fit attempted on collinear (or too few) points."""


class ZeroMomentumComponent(KirkwoodLabError):
    """The zero-momentum component of the wavefunction vanishes."""


# --- weak measurement ---------------------------------------------------------

class PostSelectionFailed(KirkwoodLabError):
    """Postselection success probability is numerically zero."""

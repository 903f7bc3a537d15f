"""Exceptions raised by facet-lp.

Every exception derives from FacetError so the command-line client can map all computation errors
to a single exit code. Data validation errors are also ValueErrors and numerical failures are also
ArithmeticErrors.
"""
from typing import Any
from typing import Optional


class FacetError(Exception):
    """Base class for all facet-lp errors."""


class DimensionMismatch(FacetError, ValueError):
    """Array shapes do not agree with each other or with the LP dimensions."""


class NonFiniteData(FacetError, ValueError):
    """LP data contains NaN or infinite entries."""


class RankDeficient(FacetError, ValueError):
    """The constraint matrix does not have full row rank; remove redundant rows first."""


class SingularBasis(FacetError, ArithmeticError):
    """The basis matrix is numerically singular."""


class EnumerationTooLarge(FacetError, ValueError):
    """The number of candidate bases exceeds the enumeration cap."""


class Infeasible(FacetError):
    """The feasible set is empty."""


class AuxiliarySolveFailed(FacetError, ArithmeticError):
    """An auxiliary problem did not converge to tolerance."""


class EmptyFace(FacetError):
    """Facial reduction exposed every coordinate of a system with a nonzero right-hand side."""


class InconsistentRedundantRow(FacetError):
    """A row dropped as linearly dependent contradicts the right-hand side."""


class LemmaViolation(FacetError, ArithmeticError):
    """An exposing certificate exists but no constraint became redundant."""


class NotInFace(FacetError, ValueError):
    """A point has mass on a coordinate that the reduction exposed."""


class NonPositiveInterior(FacetError, ValueError):
    """An interior-point quantity has a nonpositive entry."""


class DegenerateDraw(FacetError, ArithmeticError):
    """Random draws stayed rank deficient after all retries."""


class InvariantViolation(FacetError, AssertionError):
    """A postcondition checked at runtime does not hold."""


class TheoremSuiteFailure(FacetError, AssertionError):
    """At least one instance of the theorem suite failed an assertion."""


class UnsupportedSection(FacetError, ValueError):
    """The MPS text uses a section outside of the supported subset."""


class UnsupportedBound(FacetError, ValueError):
    """The MPS text uses a bound type outside of LO, UP and FR."""


class SchemaVersionUnknown(FacetError, ValueError):
    """The native document declares a schema version this release cannot read."""


class CorruptDocument(FacetError, ValueError):
    """The native document is malformed."""


class ParseError(FacetError, ValueError):
    """MPS text does not follow the grammar.

    Args:
        message (str): description of the problem
        line (int): one-based line number where parsing failed
    """

    def __init__(self, message: str, line: int) -> None:
        """Store the line number next to the message."""
        super().__init__(f"line {line}: {message}")
        self.line = line


class NumericalBreakdown(FacetError, ArithmeticError):
    """The interior-point normal equations could not be factorized even with regularization.

    Args:
        message (str): description of the breakdown
        result (Any): the last interior iterate as an IpmResult
    """

    def __init__(self, message: str, result: Optional[Any] = None) -> None:
        """Attach the last iterate to the exception."""
        super().__init__(message)
        self.result = result

"""Exception hierarchy."""

from __future__ import annotations


class BJError(Exception):
    """Base class for all package errors."""


class NonFinite(BJError, ValueError):
    pass


class NonSquare(BJError, ValueError):
    pass


class NonHermitian(BJError, ValueError):
    pass


class ShapeMismatch(BJError, ValueError):
    pass


class ZeroMatrix(BJError, ValueError):
    pass


class ZeroVector(BJError, ValueError):
    pass


class ZeroElement(BJError, ValueError):
    pass


class NonPositiveGauge(BJError, ValueError):
    pass


class NotMember(BJError, ValueError):
    pass


class DegenerateParams(BJError, ValueError):
    pass


class NotInForm(BJError, ValueError):
    pass


class SizeViolation(BJError, ValueError):
    pass


class GaugeViolation(BJError, ValueError):
    pass


class InvalidShape(BJError, ValueError):
    pass


class NotRankOnePreserving(BJError, ValueError):
    pass


class AmbiguousFit(BJError, ValueError):
    pass


class ConstructionError(BJError, ArithmeticError):
    """An explicit construction failed its own reconstruction check."""


class ParseError(BJError, ValueError):
    pass

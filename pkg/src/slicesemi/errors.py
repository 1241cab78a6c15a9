"""Exception hierarchy shared by every module."""

from __future__ import annotations


class SliceSemiError(Exception):
    """Base class for all library errors."""


class DescriptorMismatch(SliceSemiError, ValueError):
    pass


class WrongAlgebra(SliceSemiError, ValueError):
    pass


class NonAssociative(SliceSemiError, ValueError):
    """Raised when an operation needs an associative algebra (octonions are rejected)."""


class NotInCone(SliceSemiError, ValueError):
    pass


class ZeroElement(SliceSemiError, ZeroDivisionError):
    pass


class NotImaginaryUnit(SliceSemiError, ValueError):
    pass


class OnSphere(SliceSemiError, ArithmeticError):
    """The Cauchy kernel was evaluated on the sphere of its pole."""


class Singular(SliceSemiError, ArithmeticError):
    pass


class NoConvergence(SliceSemiError, ArithmeticError):
    pass


class OnSpectrum(SliceSemiError, ArithmeticError):
    def __init__(self, message: str, alpha=None):
        super().__init__(message)
        self.alpha = alpha


class NotConvergent(SliceSemiError, ArithmeticError):
    pass


class NormConditionViolated(SliceSemiError, ArithmeticError):
    pass


class NotCauchy(SliceSemiError, ArithmeticError):
    def __init__(self, message: str, value=None, achieved: float | None = None):
        super().__init__(message)
        self.value = value
        self.achieved = achieved


class GridTooShort(SliceSemiError, ValueError):
    pass


class SpectrumOutsideCircle(SliceSemiError, ValueError):
    pass


class LoopHitsSpectrum(SliceSemiError, ValueError):
    pass


class NotSectorial(SliceSemiError, ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class TailNotCertifiable(SliceSemiError, ArithmeticError):
    pass


class LambdaInsideKeyhole(SliceSemiError, ValueError):
    pass


class SphereNotEnclosed(SliceSemiError, ValueError):
    pass


class UnknownSuite(SliceSemiError, KeyError):
    pass

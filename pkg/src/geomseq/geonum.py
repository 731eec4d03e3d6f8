"""Arithmetic over the positive reals viewed through their logarithms.

The carrier set is the range of the exponential function, i.e. the positive
reals.  Every number is stored as its natural log, which turns the geometric
operations into ordinary arithmetic on logs:

    addition        value product        log a + log b
    subtraction     value quotient       log a - log b
    multiplication                       log a * log b
    division                             log a / log b

The additive identity is the value 1 (log 0) and the multiplicative identity
is the value e (log 1).  Values are only materialised at I/O boundaries;
sequences whose logs grow like k**m would overflow any direct representation
long before the analysis becomes interesting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable

__all__ = [
    "GEO_MINUS_ONE",
    "GEO_ONE",
    "GEO_ZERO",
    "GeoDomainError",
    "GeoNum",
    "GeoRangeError",
    "PreconditionError",
    "geo_abs",
    "geo_add",
    "geo_div",
    "geo_int_pow",
    "geo_mul",
    "geo_sub",
    "geo_sum",
]


class GeoDomainError(ValueError):
    """An operand lies outside the domain of a geometric operation."""


class GeoRangeError(OverflowError):
    """A geometric operation overflowed the log representation."""


class PreconditionError(ValueError):
    """An analysis precondition or standing hypothesis is not met."""


#: default tolerance for log-level closeness checks
LOG_EQ_TOL = 1e-12


@total_ordering
@dataclass(frozen=True)
class GeoNum:
    """A positive real stored by its natural logarithm.

    Construction validates that the log is finite; ``from_value`` additionally
    validates that the value is a finite positive real.  Comparison is by
    comparison of logs, which induces the usual total order on values.
    """

    log: float

    def __post_init__(self) -> None:
        log = float(self.log)
        if not math.isfinite(log):
            raise GeoDomainError(f"log must be finite, got {self.log!r}")
        object.__setattr__(self, "log", log)

    @classmethod
    def from_value(cls, value: float) -> "GeoNum":
        """Build from the represented value, which must be a finite positive real."""
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise GeoDomainError(f"value must be a finite positive real, got {value!r}")
        return cls(math.log(value))

    @property
    def value(self) -> float:
        """The represented positive real.

        Raises
        ------
        GeoRangeError
            If exp(log) overflows a double.  Use ``log`` directly for large
            magnitudes.
        """
        try:
            v = math.exp(self.log)
        except OverflowError as exc:
            raise GeoRangeError(f"value overflow for log {self.log!r}") from exc
        return v

    def isclose(self, other: "GeoNum", tol: float = LOG_EQ_TOL) -> bool:
        """Closeness at the log level within an absolute tolerance."""
        return abs(self.log - other.log) <= tol

    def __lt__(self, other: "GeoNum") -> bool:
        if not isinstance(other, GeoNum):
            return NotImplemented
        return self.log < other.log

    def __repr__(self) -> str:
        return f"GeoNum(log={self.log!r})"


#: additive identity, the value 1
GEO_ZERO = GeoNum(0.0)
#: multiplicative identity, the value e
GEO_ONE = GeoNum(1.0)
#: additive inverse of GEO_ONE, the value 1/e
GEO_MINUS_ONE = GeoNum(-1.0)


def _checked(log: float) -> GeoNum:
    if not math.isfinite(log):
        raise GeoRangeError("log overflow in geometric operation")
    return GeoNum(log)


def geo_add(a: GeoNum, b: GeoNum) -> GeoNum:
    """Geometric sum: the value product, log a + log b."""
    return _checked(a.log + b.log)


def geo_sub(a: GeoNum, b: GeoNum) -> GeoNum:
    """Geometric difference: the value quotient, log a - log b."""
    return _checked(a.log - b.log)


def geo_mul(a: GeoNum, b: GeoNum) -> GeoNum:
    """Geometric product: log a * log b."""
    return _checked(a.log * b.log)


def geo_div(a: GeoNum, b: GeoNum) -> GeoNum:
    """Geometric quotient: log a / log b.

    Raises
    ------
    GeoDomainError
        If ``b`` is the geometric zero (value 1, log 0).
    """
    if b.log == 0.0:
        raise GeoDomainError("division by the geometric zero (value 1)")
    return _checked(a.log / b.log)


def geo_abs(a: GeoNum) -> GeoNum:
    """Geometric absolute value: |log a| at the log level."""
    return GeoNum(abs(a.log))


def geo_int_pow(a: GeoNum, n: int) -> GeoNum:
    """n-fold geometric product of ``a`` with itself, n >= 0.

    ``n == 0`` returns the multiplicative identity (value e).  The log is
    accumulated by a left fold so the result matches an explicit chain of
    ``geo_mul`` calls bit for bit.
    """
    if not isinstance(n, int) or n < 0:
        raise GeoDomainError(f"exponent must be a nonnegative integer, got {n!r}")
    if n == 0:
        return GEO_ONE
    acc = a.log
    for _ in range(n - 1):
        acc *= a.log
        if not math.isfinite(acc):
            raise GeoRangeError(f"log overflow in geo_int_pow at exponent {n}")
    return _checked(acc)


def geo_sum(xs: Iterable[GeoNum]) -> GeoNum:
    """Geometric sum of a finite collection; empty input gives the geometric zero.

    Logs are accumulated with ``math.fsum`` (compensated summation), so the
    result is correctly rounded regardless of ordering or cancellation.
    """
    return _checked(math.fsum(x.log for x in xs))

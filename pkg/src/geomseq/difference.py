"""The m-th order geometric difference operator.

At the log level the first-order difference is d_i = log x_i - log x_{i+1}
(the geometric quotient x_i / x_{i+1}), so the first difference of a
log-increasing sequence has all logs negative.  Higher orders are defined by
recursion on that rule; the equivalent closed form is the alternating
binomial combination

    log(D^m x)_k = sum_{v=0..m} (-1)^v C(m, v) log x_{k+v}

with the v = 0 coefficient equal to +1.  A length-N input yields a length
N - m output, both 1-indexed.
"""

from __future__ import annotations

import math

import numpy as np

from .geonum import GeoRangeError
from .sequences import GeoSeq

__all__ = ["MAX_BINOMIAL_ORDER", "binomial_diff_logs", "diff_binomial", "diff_recursive"]

#: binomial coefficients stay exactly representable as doubles up to this order
MAX_BINOMIAL_ORDER = 60

#: test-only fault hook: when True the recursive path negates its output so
#: that oracle suites can prove they detect a broken operator
_FAULT_NEGATE = False


def _check_order(m: int, n_terms: int) -> None:
    if not isinstance(m, int) or m < 0:
        raise ValueError(f"difference order must be a nonnegative integer, got {m!r}")
    if m >= n_terms:
        raise ValueError(f"difference order {m} needs at least {m + 1} terms, got {n_terms}")


def recursive_diff_logs(logs: np.ndarray, m: int) -> np.ndarray:
    """m applications of d_i = l_i - l_{i+1} to a log vector."""
    out = np.asarray(logs, dtype=np.float64)
    _check_order(m, out.size)
    for _ in range(m):
        out = out[:-1] - out[1:]
    if _FAULT_NEGATE:
        out = -out
    return out


def binomial_diff_logs(logs: np.ndarray, m: int) -> np.ndarray:
    """Closed-form m-th difference of a log vector via exact binomials."""
    logs = np.asarray(logs, dtype=np.float64)
    _check_order(m, logs.size)
    if m > MAX_BINOMIAL_ORDER:
        raise GeoRangeError(
            f"binomial coefficients overflow doubles beyond order {MAX_BINOMIAL_ORDER}, got {m}"
        )
    n_out = logs.size - m
    if m == 0:
        return logs.copy()
    out = np.zeros(n_out)
    for v in range(m + 1):
        coeff = float((-1) ** v * math.comb(m, v))
        out += coeff * logs[v : v + n_out]
    return out


def diff_recursive(x: GeoSeq, m: int) -> GeoSeq:
    """m-th geometric difference by repeated first differences."""
    _check_order(m, len(x))
    return GeoSeq(logs=recursive_diff_logs(x.logs, m), source=f"diff^{m}[recursive]({x.source})")


def diff_binomial(x: GeoSeq, m: int) -> GeoSeq:
    """m-th geometric difference by the alternating binomial closed form.

    Raises
    ------
    GeoRangeError
        For m > 60, where C(m, v) is no longer exactly a double.
    """
    _check_order(m, len(x))
    return GeoSeq(logs=binomial_diff_logs(x.logs, m), source=f"diff^{m}[binomial]({x.source})")

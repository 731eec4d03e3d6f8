"""Head transforms, growth lemmas, and alpha-dual boundedness tests.

The head transform u pins the first m coordinates to the geometric zero
(value 1); spaces built on u-transformed sequences are insensitive to those
coordinates, and every test here is expected to give identical verdicts for
x and u(x).  The alpha-dual test asks whether sum_k (lambda_k)**m |log a_k|
converges, using the shared dyadic-checkpoint tail protocol.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .convergence import Verdict, _window_means, sup_stabilized, tail_converged
from .difference import binomial_diff_logs
from .geonum import PreconditionError
from .sequences import GeoSeq, LambdaSeq, PSeq

__all__ = [
    "DualMembership",
    "GrowthReport",
    "UEquivalenceReport",
    "VLambdaResult",
    "alpha_dual_membership",
    "alpha_dual_u_equivalence",
    "canonical_growth_sequence",
    "lemma_growth_check",
    "pairing_sum",
    "u_transform",
    "vlambda_membership",
]


def u_transform(x: GeoSeq, m: int) -> GeoSeq:
    """Replace the first m coordinates by the geometric zero (value 1)."""
    if not isinstance(m, int) or m < 0:
        raise ValueError(f"m must be a nonnegative integer, got {m!r}")
    if m >= len(x):
        raise ValueError(f"u transform with m={m} needs more than {m} terms, got {len(x)}")
    logs = x.logs.copy()
    logs[:m] = 0.0
    return GeoSeq(logs=logs, source=f"u[{m}]({x.source})")


@dataclass(frozen=True)
class VLambdaResult:
    variant: str                  # "sup" | "p"
    verdict: Verdict
    sup_log: float | None = None
    partial_log: float | None = None
    details: dict = field(default_factory=dict)


def vlambda_membership(
    x: GeoSeq,
    m: int,
    lam: LambdaSeq,
    variant: str = "sup",
    p: PSeq | None = None,
    tol: float = 1e-2,
    tail_fraction: float = 0.2,
) -> VLambdaResult:
    """Membership in the window-mean spaces used on the dual side.

    ``variant="sup"`` asks whether s_n = |window mean of the m-th difference
    logs| stays bounded (running-sup stabilisation).  ``variant="p"`` asks
    whether the series sum_n s_n**p_n of those mean magnitudes converges
    (dyadic-checkpoint tail increments); the magnitudes are taken before the
    exponent because fractional p_n would be undefined on signed means.
    """
    if variant not in ("sup", "p"):
        raise ValueError(f"variant must be 'sup' or 'p', got {variant!r}")
    if m >= len(x):
        raise ValueError(f"difference order {m} needs more than {m} terms, got {len(x)}")
    d = binomial_diff_logs(x.logs, m)
    means = np.abs(_window_means(d, lam))
    if variant == "sup":
        verdict, diag = sup_stabilized(means, tol)
        return VLambdaResult(variant="sup", verdict=verdict, sup_log=float(means.max()), details=diag)
    if p is not None and not p.is_constant_one:
        if len(p) < means.size:
            raise ValueError(f"p sequence length {len(p)} shorter than the {means.size} window means")
        terms = means ** p.values[: means.size]
    else:
        terms = means
    partials = np.cumsum(terms)
    verdict, diag = tail_converged(partials, tol)
    return VLambdaResult(
        variant="p", verdict=verdict, partial_log=float(partials[-1]), details=diag
    )


@dataclass(frozen=True)
class GrowthReport:
    """The two Abel-type growth bounds used on the dual side.

    ``sup_diff_ratio`` is sup_k |(m-1)-th difference log|_k / lambda_k and
    ``sup_raw_ratio`` is sup_k |log x_k| / (lambda_k)**m; each comes with a
    flag telling whether the ratio is still trending upward near the end of
    the truncation.
    """

    sup_diff_ratio: float
    sup_raw_ratio: float
    trending_up_diff: bool
    trending_up_raw: bool


def _trending_up(values: np.ndarray, tol: float) -> bool:
    n = values.size
    if n < 8:
        return False
    q3 = float(values[n // 2 : 3 * n // 4].max())
    q4 = float(values[3 * n // 4 :].max())
    return q4 > q3 * (1.0 + tol) + tol


def lemma_growth_check(
    x: GeoSeq,
    m: int,
    lam: LambdaSeq,
    tol: float = 1e-2,
    tail_fraction: float = 0.2,
) -> GrowthReport:
    """Evaluate the growth bounds implied by window-mean boundedness.

    The precondition is that u(x) passes the sup-variant membership test at
    order m; the report then carries both sups so a caller can confirm they
    are finite (and not still growing) on the truncation.

    Raises
    ------
    PreconditionError
        When u(x) fails the sup-variant membership gate.
    """
    if m < 1:
        raise ValueError("the growth bounds need m >= 1")
    xu = u_transform(x, m)
    gate = vlambda_membership(xu, m, lam, "sup", tol=tol, tail_fraction=tail_fraction)
    if gate.verdict is not Verdict.YES:
        raise PreconditionError(
            f"u(x) not accepted by the sup-variant membership test (verdict {gate.verdict.value})"
        )
    d_prev = np.abs(binomial_diff_logs(xu.logs, m - 1))
    k_diff = min(d_prev.size, len(lam))
    diff_ratios = d_prev[:k_diff] / lam.values[:k_diff]
    k_raw = min(len(xu), len(lam))
    raw_ratios = np.abs(xu.logs[:k_raw]) / lam.values[:k_raw] ** m
    return GrowthReport(
        sup_diff_ratio=float(diff_ratios.max()),
        sup_raw_ratio=float(raw_ratios.max()),
        trending_up_diff=_trending_up(diff_ratios, tol),
        trending_up_raw=_trending_up(raw_ratios, tol),
    )


@dataclass(frozen=True)
class DualMembership:
    verdict: Verdict
    partial_log: float
    details: dict = field(default_factory=dict)


def alpha_dual_membership(
    a: GeoSeq,
    lam: LambdaSeq,
    m: int,
    tol: float = 1e-2,
) -> DualMembership:
    """Test sum_k (lambda_k)**m |log a_k| for convergence on the truncation."""
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m!r}")
    n = min(len(a), len(lam))
    terms = lam.values[:n] ** m * np.abs(a.logs[:n])
    partials = np.cumsum(terms)
    verdict, diag = tail_converged(partials, tol)
    return DualMembership(verdict=verdict, partial_log=float(partials[-1]), details=diag)


def pairing_sum(a: GeoSeq, x: GeoSeq, n: int | None = None) -> np.ndarray:
    """Partial sums of |log a_k * log x_k|, the absolute geometric pairing."""
    cap = min(len(a), len(x))
    if n is not None:
        if not 1 <= n <= cap:
            raise ValueError(f"n must lie in 1..{cap}, got {n}")
        cap = n
    return np.cumsum(np.abs(a.logs[:cap] * x.logs[:cap]))


def canonical_growth_sequence(lam: LambdaSeq, m: int) -> GeoSeq:
    """The canonical dual test sequence: value 1 up to m, then e**((lambda_k)**m)."""
    if not isinstance(m, int) or m < 0:
        raise ValueError(f"m must be a nonnegative integer, got {m!r}")
    if len(lam) <= m:
        raise ValueError(f"lambda length {len(lam)} must exceed m={m}")
    logs = lam.values**m
    logs[:m] = 0.0
    return GeoSeq(logs=logs, source=f"canonical-growth(m={m},lambda={lam.source})")


@dataclass(frozen=True)
class UEquivalenceReport:
    n_checked: int
    flips: tuple[str, ...]


def alpha_dual_u_equivalence(
    a: GeoSeq,
    lam: LambdaSeq,
    m: int,
    x_family: Sequence[GeoSeq],
    tol: float = 1e-2,
) -> UEquivalenceReport:
    """Pairing verdicts for a against x and against u(x) must agree.

    The pairing differs only in the first m terms, a fixed finite head, so
    convergence of one implies convergence of the other.
    """
    flips = []
    for x in x_family:
        px = pairing_sum(a, x)
        pu = pairing_sum(a, u_transform(x, m))
        vx, _ = tail_converged(px, tol)
        vu, _ = tail_converged(pu, tol)
        if vx is not vu:
            flips.append(f"{x.source}: pairing verdict {vx.value} vs u-transformed {vu.value}")
    return UEquivalenceReport(n_checked=len(x_family), flips=tuple(flips))

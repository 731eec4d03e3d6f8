"""Mean-based and statistical convergence analyses on finite truncations.

All verdicts are truncation-conditional: a "yes" means the finite evidence is
consistent with membership at the supplied tolerance, not a proof about the
full sequence.  The shared protocol is

* limits are estimated from the trailing ``tail_fraction`` of a series
  (median of the tail logs) and verdicts need at least 8 tail points,
* "tends to the geometric 1" means every tail log is within ``tol`` of 0,
* "bounded" means the running sup stops growing between the half point and
  the end of the truncation (relative stabilisation), and
* "series converges" means the dyadic-checkpoint tail increment of the
  partial sums drops below ``tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .difference import binomial_diff_logs
from .geonum import GEO_ZERO, GeoNum, PreconditionError
from .sequences import GeoSeq, LambdaSeq

__all__ = [
    "MIN_TAIL_POINTS",
    "DensityCurve",
    "LimitEstimate",
    "MeanSeries",
    "SpaceMembership",
    "StatResult",
    "SubsetCheck",
    "Verdict",
    "check_s_subset_slambda",
    "delta_norm",
    "estimate_limit",
    "mean_series",
    "space_membership",
    "stat_convergence",
    "stat_density_curve",
    "sup_stabilized",
    "tail_converged",
    "tends_to_zero",
]

#: a tail shorter than this cannot support a verdict
MIN_TAIL_POINTS = 8

#: membership space tokens accepted by :func:`space_membership`
SPACES = ("C1", "absC1", "Vlambda", "absVlambda", "linf")


class Verdict(str, Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class MeanSeries:
    """Window means of the m-th difference deviations, one value per n."""

    logs: np.ndarray
    kind: str            # "signed" | "absolute"
    window: str          # "cesaro" | "window"

    def __len__(self) -> int:
        return int(self.logs.size)

    def value(self, n: int) -> GeoNum:
        if not 1 <= n <= len(self):
            raise IndexError(f"index {n} outside 1..{len(self)}")
        return GeoNum(float(self.logs[n - 1]))


@dataclass(frozen=True)
class LimitEstimate:
    limit: GeoNum
    converged: Verdict
    residual: float
    tail_points: int


@dataclass(frozen=True, eq=False)
class DensityCurve:
    """Exceedance density n -> |{k in window : deviation >= eps}| / normalizer."""

    eps_log: float
    window: str
    densities: np.ndarray

    def __len__(self) -> int:
        return int(self.densities.size)

    def at(self, n: int) -> float:
        if not 1 <= n <= len(self):
            raise IndexError(f"index {n} outside 1..{len(self)}")
        return float(self.densities[n - 1])

    def tail_max(self, tail_fraction: float = 0.2) -> float:
        t = _tail_length(len(self), tail_fraction)
        return float(self.densities[len(self) - t :].max())


@dataclass(frozen=True)
class SpaceMembership:
    space: str
    verdict: Verdict
    limit: GeoNum | None
    residual: float | None
    sup_log: float | None = None
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class StatResult:
    window: str
    verdict: Verdict
    limit: GeoNum
    per_eps: tuple[dict, ...]


@dataclass(frozen=True)
class SubsetCheck:
    """Outcome of auditing the Cesaro-statistical to lambda-statistical implication."""

    n_sequences: int
    n_premise_holds: int
    violations: tuple[str, ...]
    min_ratio_observed: float


# ---------------------------------------------------------------------------
# shared tail protocols
# ---------------------------------------------------------------------------


def _tail_length(n: int, tail_fraction: float) -> int:
    if not 0 < tail_fraction <= 1:
        raise ValueError(f"tail_fraction must lie in (0, 1], got {tail_fraction!r}")
    return max(1, math.ceil(n * tail_fraction))


def estimate_limit(series_logs: np.ndarray, tol: float, tail_fraction: float = 0.2) -> LimitEstimate:
    """Estimate a geometric limit as the median of the trailing series logs.

    The verdict is yes when every tail point is within ``tol`` of the
    estimate, no otherwise, and inconclusive when fewer than
    ``MIN_TAIL_POINTS`` tail points are available.
    """
    logs = np.asarray(series_logs, dtype=np.float64)
    t = _tail_length(logs.size, tail_fraction)
    tail = logs[logs.size - t :]
    limit_log = float(np.median(tail))
    residual = float(np.max(np.abs(tail - limit_log)))
    if t < MIN_TAIL_POINTS:
        verdict = Verdict.INCONCLUSIVE
    elif residual <= tol:
        verdict = Verdict.YES
    else:
        verdict = Verdict.NO
    return LimitEstimate(limit=GeoNum(limit_log), converged=verdict, residual=residual, tail_points=t)


def tends_to_zero(series_logs: np.ndarray, tol: float, tail_fraction: float = 0.2) -> tuple[Verdict, float]:
    """Does the series tend to the geometric 1 (log 0)?  Returns (verdict, tail max |log|)."""
    logs = np.asarray(series_logs, dtype=np.float64)
    t = _tail_length(logs.size, tail_fraction)
    resid = float(np.max(np.abs(logs[logs.size - t :])))
    if t < MIN_TAIL_POINTS:
        return Verdict.INCONCLUSIVE, resid
    return (Verdict.YES if resid <= tol else Verdict.NO), resid


def sup_stabilized(values: np.ndarray, tol: float) -> tuple[Verdict, dict]:
    """Boundedness on a truncation: the running sup must stop growing.

    Compares the sup over the first half with the sup over the whole
    truncation; the increment must stay below ``tol`` relative to the sup's
    own magnitude.  The fully relative form keeps the verdict invariant
    under rescaling the values, so a series that is still growing cannot be
    flattened into acceptance by dividing it through by a large constant.
    """
    vals = np.asarray(values, dtype=np.float64)
    n = vals.size
    if n < MIN_TAIL_POINTS:
        return Verdict.INCONCLUSIVE, {"sup": float(vals.max()) if n else math.nan, "increment": math.nan}
    sup_half = float(vals[: n // 2].max())
    sup_full = float(vals.max())
    increment = sup_full - sup_half
    scale = abs(sup_full)
    ok = increment <= tol * scale if scale > 0.0 else increment <= 0.0
    return (Verdict.YES if ok else Verdict.NO), {
        "sup": sup_full,
        "sup_half": sup_half,
        "increment": increment,
    }


def tail_converged(partial_sums: np.ndarray, tol: float) -> tuple[Verdict, dict]:
    """Series convergence on a truncation via dyadic-checkpoint tail increments.

    The partial sums are inspected at N/4, N/2 and N; the final increment
    S(N) - S(N/2) must drop below ``tol``.  Both increments are reported so
    a caller can see whether the tail is still shrinking.
    """
    ps = np.asarray(partial_sums, dtype=np.float64)
    n = ps.size
    if n < MIN_TAIL_POINTS:
        return Verdict.INCONCLUSIVE, {"increment": math.nan, "prev_increment": math.nan}
    s_full = float(ps[-1])
    s_half = float(ps[n // 2 - 1])
    s_quarter = float(ps[n // 4 - 1])
    inc = s_full - s_half
    prev = s_half - s_quarter
    verdict = Verdict.YES if inc <= tol else Verdict.NO
    return verdict, {"increment": inc, "prev_increment": prev, "partial": s_full}


# ---------------------------------------------------------------------------
# window means
# ---------------------------------------------------------------------------


def _window_means(summand: np.ndarray, lam: LambdaSeq | None) -> np.ndarray:
    """Window means (1/lambda_n) sum_{k in I_n} s_k for n = 1..n_max.

    ``lam=None`` selects the Cesaro windows I_n = {1..n} with lambda_n = n.
    The admissible range is capped by both the summand and lambda lengths.
    """
    s = np.asarray(summand, dtype=np.float64)
    prefix = np.concatenate(([0.0], np.cumsum(s)))
    if lam is None:
        ns = np.arange(1, s.size + 1, dtype=np.float64)
        return prefix[1:] / ns
    n_max = min(s.size, len(lam))
    starts = lam.window_starts(n_max)
    ns = np.arange(1, n_max + 1)
    sums = prefix[ns] - prefix[starts - 1]
    return sums / lam.values[:n_max]


def mean_series(
    x: GeoSeq,
    m: int,
    lam: LambdaSeq | None = None,
    center: GeoNum = GEO_ZERO,
    kind: str = "signed",
) -> MeanSeries:
    """Window means of the deviations of the m-th difference from ``center``.

    ``kind="signed"`` averages d_k - log(center); ``kind="absolute"``
    averages |d_k - log(center)|.
    """
    if kind not in ("signed", "absolute"):
        raise ValueError(f"kind must be 'signed' or 'absolute', got {kind!r}")
    dev = binomial_diff_logs(x.logs, _checked_order(x, m)) - center.log
    if kind == "absolute":
        dev = np.abs(dev)
    return MeanSeries(
        logs=_window_means(dev, lam),
        kind=kind,
        window="cesaro" if lam is None else "window",
    )


def _checked_order(x: GeoSeq, m: int) -> int:
    if not isinstance(m, int) or m < 0:
        raise ValueError(f"difference order must be a nonnegative integer, got {m!r}")
    if m >= len(x):
        raise ValueError(f"difference order {m} needs more than {m} terms, got {len(x)}")
    return m


def _tail_median(values: np.ndarray, tail_fraction: float) -> float:
    t = _tail_length(values.size, tail_fraction)
    return float(np.median(values[values.size - t :]))


# ---------------------------------------------------------------------------
# space membership and norms
# ---------------------------------------------------------------------------


def space_membership(
    x: GeoSeq,
    m: int,
    space: str,
    lam: LambdaSeq | None = None,
    tol: float = 1e-2,
    tail_fraction: float = 0.2,
) -> SpaceMembership:
    """Truncation-conditional membership of ``x`` in one of the five base spaces.

    Tokens: ``C1`` and ``absC1`` (Cesaro signed/absolute means), ``Vlambda``
    and ``absVlambda`` (generalised de la Vallee-Poussin means, requiring
    ``lam``), and ``linf`` (bounded difference logs).

    The two-stage procedure first estimates the geometric limit L, then tests
    that the defining mean series tends to the geometric 1: for the signed
    spaces L is the limit of the signed means themselves, for the absolute
    spaces it is the absolute-residual minimiser (median of the trailing
    difference logs).
    """
    if space not in SPACES:
        raise ValueError(f"unknown space {space!r}; expected one of {SPACES}")
    d = binomial_diff_logs(x.logs, _checked_order(x, m))

    if space == "linf":
        verdict, diag = sup_stabilized(np.abs(d), tol)
        return SpaceMembership(
            space=space,
            verdict=verdict,
            limit=None,
            residual=None,
            sup_log=float(np.max(np.abs(d))),
            details=diag,
        )

    if space in ("Vlambda", "absVlambda"):
        if lam is None:
            raise ValueError(f"space {space} requires a lambda sequence")
        use_lam = lam
    else:
        use_lam = None
    window_name = "cesaro" if use_lam is None else "window"

    if space in ("C1", "Vlambda"):
        means = _window_means(d, use_lam)
        est = estimate_limit(means, tol, tail_fraction)
        return SpaceMembership(
            space=space,
            verdict=est.converged,
            limit=est.limit,
            residual=est.residual,
            details={"window": window_name, "tail_points": est.tail_points},
        )

    limit_log = _tail_median(d, tail_fraction)
    means = _window_means(np.abs(d - limit_log), use_lam)
    verdict, resid = tends_to_zero(means, tol, tail_fraction)
    return SpaceMembership(
        space=space,
        verdict=verdict,
        limit=GeoNum(limit_log),
        residual=resid,
        details={"window": window_name},
    )


def delta_norm(
    x: GeoSeq,
    m: int,
    lam: LambdaSeq | None = None,
    variant: str = "signed",
) -> GeoNum:
    """The difference-space norm at the log level.

    log of the norm = sum_{i=1..m} |log x_i|  +  sup_n (mean magnitude),
    where the mean magnitude is |window mean of d| for the signed variant and
    the window mean of |d| for the absolute variant; ``lam=None`` selects the
    Cesaro windows.
    """
    if variant not in ("signed", "absolute"):
        raise ValueError(f"variant must be 'signed' or 'absolute', got {variant!r}")
    _checked_order(x, m)
    head = math.fsum(abs(float(v)) for v in x.logs[:m])
    d = binomial_diff_logs(x.logs, m)
    if variant == "absolute":
        sup_part = float(_window_means(np.abs(d), lam).max())
    else:
        sup_part = float(np.abs(_window_means(d, lam)).max())
    return GeoNum(head + sup_part)


# ---------------------------------------------------------------------------
# statistical convergence
# ---------------------------------------------------------------------------


def stat_density_curve(
    x: GeoSeq,
    m: int,
    limit: GeoNum,
    eps_log: float,
    lam: LambdaSeq | None = None,
) -> DensityCurve:
    """Exceedance density curve for the threshold ``eps_log`` (compared with >=).

    The count of window indices whose deviation |d_k - log L| reaches the
    threshold is divided by lambda_n (by n for the Cesaro windows).
    """
    if not eps_log > 0:
        raise ValueError(f"eps_log must be positive, got {eps_log!r}")
    d = binomial_diff_logs(x.logs, _checked_order(x, m))
    flags = (np.abs(d - limit.log) >= eps_log).astype(np.float64)
    dens = _window_means(flags, lam)
    return DensityCurve(
        eps_log=float(eps_log),
        window="cesaro" if lam is None else "window",
        densities=dens,
    )


def _stat_limit(d: np.ndarray, eps_logs: Sequence[float], tail_fraction: float) -> GeoNum:
    """Median of the trailing difference logs, restricted to the low-deviation majority."""
    t = _tail_length(d.size, tail_fraction)
    tail = d[d.size - t :]
    med = float(np.median(tail))
    if eps_logs:
        keep = tail[np.abs(tail - med) < min(eps_logs)]
        if keep.size:
            med = float(np.median(keep))
    return GeoNum(med)


def stat_convergence(
    x: GeoSeq,
    m: int,
    lam: LambdaSeq | None = None,
    eps_logs: Sequence[float] = (0.1, 0.5, 1.0),
    tol: float = 1e-2,
    tail_fraction: float = 0.2,
) -> StatResult:
    """Statistical convergence verdict over a grid of thresholds.

    Membership requires the tail of every density curve to stay at or below
    ``tol``.  ``lam=None`` gives the Cesaro (natural density) variant, a
    lambda sequence gives the windowed variant.
    """
    if not eps_logs:
        raise ValueError("eps_logs must contain at least one threshold")
    d = binomial_diff_logs(x.logs, _checked_order(x, m))
    limit = _stat_limit(d, eps_logs, tail_fraction)
    per_eps = []
    verdicts = []
    for eps in eps_logs:
        curve = stat_density_curve(x, m, limit, eps, lam)
        t = _tail_length(len(curve), tail_fraction)
        tail_max = curve.tail_max(tail_fraction)
        if t < MIN_TAIL_POINTS:
            v = Verdict.INCONCLUSIVE
        else:
            v = Verdict.YES if tail_max <= tol else Verdict.NO
        verdicts.append(v)
        per_eps.append(
            {
                "eps_log": float(eps),
                "tail_max_density": tail_max,
                "final_density": float(curve.densities[-1]),
                "verdict": v.value,
            }
        )
    if any(v is Verdict.NO for v in verdicts):
        overall = Verdict.NO
    elif any(v is Verdict.INCONCLUSIVE for v in verdicts):
        overall = Verdict.INCONCLUSIVE
    else:
        overall = Verdict.YES
    return StatResult(
        window="cesaro" if lam is None else "window",
        verdict=overall,
        limit=limit,
        per_eps=tuple(per_eps),
    )


def check_s_subset_slambda(
    xs: Sequence[GeoSeq],
    m: int,
    lam: LambdaSeq,
    eps_logs: Sequence[float] = (0.1, 0.5, 1.0),
    tol: float = 1e-2,
    tail_fraction: float = 0.2,
    min_ratio: float = 0.05,
) -> SubsetCheck:
    """Audit the implication "statistically convergent implies lambda-statistically convergent".

    The implication needs liminf lambda_n / n > 0; on a truncation this is
    checked as min over the trailing fraction of lambda_n / n >= ``min_ratio``.

    Raises
    ------
    PreconditionError
        When the truncated hypothesis fails, with the observed ratio.
    """
    n = len(lam)
    ns = np.arange(1, n + 1, dtype=np.float64)
    ratios = lam.values / ns
    t = _tail_length(n, tail_fraction)
    observed = float(ratios[n - t :].min())
    if observed < min_ratio:
        raise PreconditionError(
            f"liminf lambda_n/n hypothesis not satisfied on the truncation: "
            f"min tail ratio {observed:.6g} < required {min_ratio:.6g}"
        )
    violations = []
    premise_holds = 0
    for x in xs:
        s = stat_convergence(x, m, None, eps_logs, tol, tail_fraction)
        if s.verdict is not Verdict.YES:
            continue
        premise_holds += 1
        sl = stat_convergence(x, m, lam, eps_logs, tol, tail_fraction)
        if sl.verdict is Verdict.NO:
            violations.append(
                f"{x.source}: Cesaro-statistical yes but lambda-statistical no "
                f"(limit log {s.limit.log:.6g})"
            )
    return SubsetCheck(
        n_sequences=len(xs),
        n_premise_holds=premise_holds,
        violations=tuple(violations),
        min_ratio_observed=observed,
    )

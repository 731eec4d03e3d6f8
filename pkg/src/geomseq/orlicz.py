"""Orlicz-modular sequence spaces and their paranorm.

An Orlicz function M is convex, non-decreasing, vanishes at 0 and grows to
infinity.  It is transported to geometric values by acting on logs: the
modular term for deviation d_k (a log magnitude) is

    [ M( d_k / log rho ) ] ** p_k

and the modular series takes window means of those terms.  Everything below
works on plain log arrays; ``rho`` enters only through its log, which must be
positive (rho > 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .convergence import (
    MeanSeries,
    Verdict,
    _checked_order,
    _tail_length,
    _window_means,
    sup_stabilized,
    tends_to_zero,
)
from .difference import binomial_diff_logs
from .geonum import GeoDomainError, GeoNum, PreconditionError
from .sequences import GeoSeq, LambdaSeq, PSeq

__all__ = [
    "RHO_LOG_GRID",
    "Delta2Report",
    "ModularParams",
    "OrliczFn",
    "OrliczMembership",
    "ParanormResult",
    "SolidityReport",
    "delta2_probe",
    "geo_orlicz_apply",
    "modular_series",
    "paranorm_g",
    "solidity_check",
    "space_membership_orlicz",
]

#: dyadic search grid for log rho, 2**-20 .. 2**20
RHO_LOG_GRID = tuple(2.0**j for j in range(-20, 21))

#: Orlicz membership variant tokens: convergence to L, convergence to the
#: geometric 1, and boundedness
ORLICZ_VARIANTS = ("L", "0", "inf")


@dataclass(frozen=True, eq=False)
class OrliczFn:
    """A validated Orlicz function, one of three families.

    * ``power``: M(t) = t**q with q >= 1,
    * ``expm1``: M(t) = e**t - 1,
    * ``pwl``: convex piecewise-linear interpolation through knots starting
      at (0, 0), extrapolated by the final slope.
    """

    family: str
    q: float = 1.0
    knots: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        if self.family == "power":
            if not (isinstance(self.q, (int, float)) and math.isfinite(self.q) and self.q >= 1):
                raise ValueError(f"power family needs q >= 1, got {self.q!r}")
        elif self.family == "expm1":
            pass
        elif self.family == "pwl":
            kn = tuple((float(t), float(v)) for t, v in self.knots)
            if len(kn) < 2:
                raise ValueError("pwl family needs at least two knots")
            if kn[0] != (0.0, 0.0):
                raise ValueError("pwl knots must start at (0, 0)")
            ts = [t for t, _ in kn]
            vs = [v for _, v in kn]
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError("pwl knot abscissae must be strictly increasing")
            slopes = [(vb - va) / (tb - ta) for (ta, va), (tb, vb) in zip(kn, kn[1:])]
            if any(s < 0 for s in slopes):
                raise ValueError("pwl must be non-decreasing")
            if any(b < a - 1e-12 for a, b in zip(slopes, slopes[1:])):
                raise ValueError("pwl slopes must be non-decreasing (convexity)")
            if slopes[-1] <= 0:
                raise ValueError("pwl final slope must be positive so that M grows to infinity")
            object.__setattr__(self, "knots", kn)
        else:
            raise ValueError(f"unknown Orlicz family {self.family!r}")
        self._self_check()

    def _self_check(self) -> None:
        # Finite-difference convexity and monotonicity on a coarse grid; the
        # three families satisfy this by construction, so this is a guard
        # against future families and bad knot data rather than a proof.
        grid = np.linspace(0.0, 4.0, 33)
        vals = self(grid)
        if abs(float(vals[0])) > 1e-12:
            raise ValueError("Orlicz function must vanish at 0")
        if np.any(np.diff(vals) < -1e-12):
            raise ValueError("Orlicz function must be non-decreasing")
        second = np.diff(vals, 2)
        if np.any(second < -1e-9):
            raise ValueError("Orlicz function must be convex")

    @classmethod
    def power(cls, q: float) -> "OrliczFn":
        return cls(family="power", q=float(q))

    @classmethod
    def exp_minus_one(cls) -> "OrliczFn":
        return cls(family="expm1")

    @classmethod
    def piecewise_linear(cls, knots: Sequence[Sequence[float]]) -> "OrliczFn":
        return cls(family="pwl", knots=tuple((float(t), float(v)) for t, v in knots))

    @classmethod
    def from_spec(cls, spec: dict) -> "OrliczFn":
        """Build from the JSON descriptor used by the CLI and the service."""
        fam = spec.get("family")
        if fam == "power":
            return cls.power(spec.get("q", 1.0))
        if fam == "expm1":
            return cls.exp_minus_one()
        if fam == "pwl":
            return cls.piecewise_linear(spec.get("knots", ()))
        raise ValueError(f"unknown Orlicz family {fam!r}")

    def to_spec(self) -> dict:
        if self.family == "power":
            return {"family": "power", "q": self.q}
        if self.family == "expm1":
            return {"family": "expm1"}
        return {"family": "pwl", "knots": [list(k) for k in self.knots]}

    def __call__(self, t):
        arr = np.asarray(t, dtype=np.float64)
        if np.any(arr < 0):
            raise GeoDomainError("Orlicz functions are evaluated on t >= 0")
        if self.family == "power":
            out = arr**self.q
        elif self.family == "expm1":
            out = np.expm1(arr)
        else:
            ts = np.array([k[0] for k in self.knots])
            vs = np.array([k[1] for k in self.knots])
            out = np.interp(arr, ts, vs)
            beyond = arr > ts[-1]
            if np.any(beyond):
                slope = (vs[-1] - vs[-2]) / (ts[-1] - ts[-2])
                out = np.where(beyond, vs[-1] + slope * (arr - ts[-1]), out)
        if np.ndim(t) == 0:
            return float(out)
        return out


def geo_orlicz_apply(M: OrliczFn, a: GeoNum) -> GeoNum:
    """Apply the transported Orlicz function: result log = M(log a), log a >= 0."""
    if a.log < 0:
        raise GeoDomainError("transported Orlicz application needs log a >= 0 (value >= 1)")
    return GeoNum(float(M(a.log)))


@dataclass(frozen=True, eq=False)
class ModularParams:
    """Bundle of modular parameters: order, windows, M, exponents, rho, center."""

    m: int
    M: OrliczFn
    rho: GeoNum
    lam: LambdaSeq | None = None
    p: PSeq | None = None
    L: GeoNum | None = None

    def __post_init__(self) -> None:
        if not self.rho.log > 0:
            raise GeoDomainError(f"rho must exceed 1 (log rho > 0), got log {self.rho.log!r}")


def _p_values(p: PSeq | None, n: int) -> np.ndarray | None:
    """Exponent array aligned to n deviation terms; None signals p identically 1."""
    if p is None or p.is_constant_one:
        return None
    if len(p) < n:
        raise ValueError(f"p sequence length {len(p)} is shorter than the {n} difference terms")
    return p.values[:n]


def _modular_term_logs(dev: np.ndarray, M: OrliczFn, p_vals: np.ndarray | None, log_rho: float) -> np.ndarray:
    terms = M(dev / log_rho)
    if p_vals is not None:
        terms = terms**p_vals
    return terms


def _deviations(x: GeoSeq, m: int, L: GeoNum | None) -> np.ndarray:
    d = binomial_diff_logs(x.logs, _checked_order(x, m))
    if L is not None:
        d = d - L.log
    return np.abs(d)


def modular_series(x: GeoSeq, params: ModularParams) -> MeanSeries:
    """Window means of the modular terms [M(|d_k - log L| / log rho)]**p_k."""
    dev = _deviations(x, params.m, params.L)
    p_vals = _p_values(params.p, dev.size)
    terms = _modular_term_logs(dev, params.M, p_vals, params.rho.log)
    return MeanSeries(
        logs=_window_means(terms, params.lam),
        kind="modular",
        window="cesaro" if params.lam is None else "window",
    )


@dataclass(frozen=True)
class OrliczMembership:
    variant: str
    verdict: Verdict
    witness_log_rho: float | None
    limit: GeoNum | None
    sup_log_unit_rho: float | None
    details: dict = field(default_factory=dict)


def _series_for(dev: np.ndarray, M: OrliczFn, p_vals, lam, log_rho: float) -> np.ndarray:
    with np.errstate(over="ignore"):
        terms = _modular_term_logs(dev, M, p_vals, log_rho)
    return _window_means(terms, lam)


def space_membership_orlicz(
    x: GeoSeq,
    m: int,
    M: OrliczFn,
    variant: str,
    lam: LambdaSeq | None = None,
    p: PSeq | None = None,
    tol: float = 1e-2,
    tail_fraction: float = 0.2,
) -> OrliczMembership:
    """Membership in one of the three Orlicz-modular spaces, searching rho.

    Variants: ``"L"`` (modular tends to the geometric 1 around an estimated
    limit L), ``"0"`` (the same around the geometric 1) and ``"inf"``
    (modular series bounded).  The witness is the smallest grid rho whose
    series passes; ``sup_log_unit_rho`` always reports the series sup at the
    reference rho = e (log rho 1) so results at different orders stay
    comparable.
    """
    if variant not in ORLICZ_VARIANTS:
        raise ValueError(f"unknown Orlicz variant {variant!r}; expected one of {ORLICZ_VARIANTS}")
    if variant == "L":
        d = binomial_diff_logs(x.logs, _checked_order(x, m))
        t = _tail_length(d.size, tail_fraction)
        limit = GeoNum(float(np.median(d[d.size - t :])))
    else:
        limit = None
    dev = _deviations(x, m, limit)
    p_vals = _p_values(p, dev.size)

    unit_series = _series_for(dev, M, p_vals, lam, 1.0)
    unit_sup = float(unit_series.max())
    overflow = not math.isfinite(unit_sup)

    witness = None
    details: dict = {}
    for log_rho in RHO_LOG_GRID:
        series = _series_for(dev, M, p_vals, lam, log_rho)
        if not np.all(np.isfinite(series)):
            continue
        if variant == "inf":
            verdict, diag = sup_stabilized(series, tol)
        else:
            verdict, resid = tends_to_zero(series, tol, tail_fraction)
            diag = {"tail_residual": resid}
        if verdict is Verdict.YES:
            witness = log_rho
            details = diag
            break
        if verdict is Verdict.INCONCLUSIVE:
            details = {"note": "series too short for a verdict", **diag}
            return OrliczMembership(
                variant=variant,
                verdict=Verdict.INCONCLUSIVE,
                witness_log_rho=None,
                limit=limit,
                sup_log_unit_rho=None if overflow else unit_sup,
                details=details,
            )
        details = diag
    if witness is None:
        details = {**details, "note": "no rho found in grid", "grid_max_log_rho": RHO_LOG_GRID[-1]}
        verdict = Verdict.NO
    else:
        verdict = Verdict.YES
    return OrliczMembership(
        variant=variant,
        verdict=verdict,
        witness_log_rho=witness,
        limit=limit,
        sup_log_unit_rho=None if overflow else unit_sup,
        details=details,
    )


# ---------------------------------------------------------------------------
# paranorm
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParanormResult:
    """Outcome of the paranorm computation.

    ``attained`` is False when no grid rho is feasible; ``ambiguous_p`` marks
    a non-constant exponent sequence, for which only the feasible boundary
    ``inf_log_rho`` is reported and ``value`` stays None.
    """

    value: GeoNum | None
    attained: bool
    inf_log_rho: float | None
    H: float
    ambiguous_p: bool
    evaluations: int


def paranorm_g(
    x: GeoSeq,
    m: int,
    M: OrliczFn,
    lam: LambdaSeq | None = None,
    p: PSeq | None = None,
    tol_rho: float = 1e-6,
) -> ParanormResult:
    """Luxemburg-style paranorm by bisection over log rho.

    Feasibility of rho means sup_n (series_n) ** (1/H) <= 1, which for the
    nonnegative series is just sup_n series_n <= 1.  The grid supplies the
    bracket; bisection narrows the feasible boundary to within ``tol_rho``
    and the paranorm log is (inf log rho) ** (pbar / H) for constant
    exponents pbar.
    """
    if tol_rho <= 0:
        raise ValueError(f"tol_rho must be positive, got {tol_rho!r}")
    dev = _deviations(x, m, None)
    p_vals = _p_values(p, dev.size)
    H = p.H if p is not None else 1.0
    pbar = p.constant_value if p is not None else 1.0
    evals = 0

    if float(dev.max()) == 0.0:
        value = GeoNum(0.0) if pbar is not None else None
        return ParanormResult(
            value=value, attained=True, inf_log_rho=0.0, H=H, ambiguous_p=pbar is None, evaluations=0
        )

    def feasible(log_rho: float) -> bool:
        nonlocal evals
        evals += 1
        series = _series_for(dev, M, p_vals, lam, log_rho)
        return bool(np.all(np.isfinite(series)) and float(series.max()) <= 1.0)

    hi = None
    lo = 0.0
    for log_rho in RHO_LOG_GRID:
        if feasible(log_rho):
            hi = log_rho
            break
        lo = log_rho
    if hi is None:
        return ParanormResult(
            value=None, attained=False, inf_log_rho=None, H=H, ambiguous_p=pbar is None, evaluations=evals
        )
    while hi - lo > tol_rho:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    value = GeoNum(hi ** (pbar / H)) if pbar is not None else None
    return ParanormResult(
        value=value, attained=True, inf_log_rho=hi, H=H, ambiguous_p=pbar is None, evaluations=evals
    )


# ---------------------------------------------------------------------------
# growth condition probe and solidity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Delta2Report:
    """sup M(2t)/M(t) on a probe grid plus a refinement-stability flag."""

    sup_ratio: float
    sup_refined: float
    satisfied: bool


def delta2_probe(M: OrliczFn, t_max: float = 8.0, n_points: int = 64) -> Delta2Report:
    """Probe the doubling growth condition sup_t M(2t)/M(t) < infinity.

    The sup is taken on a positive grid and again on a grid twice as long and
    twice as dense; the condition counts as satisfied when refinement leaves
    the sup essentially unchanged.

    Raises
    ------
    ValueError
        If M vanishes at a positive grid point (the ratio is undefined).
    """

    def sup_on(t_hi: float, n: int) -> float:
        t = np.linspace(t_hi / n, t_hi, n)
        base = M(t)
        if np.any(base == 0.0):
            raise ValueError("M(t) = 0 at positive t: doubling ratio undefined")
        with np.errstate(over="ignore"):
            ratio = M(2.0 * t) / base
        return float(np.max(ratio))

    sup1 = sup_on(t_max, n_points)
    sup2 = sup_on(2.0 * t_max, 2 * n_points)
    satisfied = math.isfinite(sup2) and sup2 <= sup1 * 1.01
    return Delta2Report(sup_ratio=sup1, sup_refined=sup2, satisfied=satisfied)


@dataclass(frozen=True)
class SolidityReport:
    verdict: Verdict
    witness_log_rho: float
    max_term_excess: float
    violation: str | None


def solidity_check(
    x: GeoSeq,
    scalar_logs: Sequence[float],
    m: int,
    M: OrliczFn,
    lam: LambdaSeq | None = None,
    p: PSeq | None = None,
    tol: float = 1e-2,
    tail_fraction: float = 0.2,
    cap: float = 1.0,
) -> SolidityReport:
    """Coordinatewise-scalar stability of the "tends to 1" Orlicz space.

    The scalars act on the deviation logs of the difference image (the
    modular only sees |d_k|, so scaling each deviation by |log alpha_k| <= cap
    can only shrink the modular terms).  Membership is re-tested with the
    witness rho of ``x`` itself; any flip is reported as a violation.

    Raises
    ------
    PreconditionError
        If ``x`` is not accepted into the 0-variant space, or a scalar
        exceeds the cap.
    """
    alphas = np.asarray(list(scalar_logs), dtype=np.float64)
    if np.any(np.abs(alphas) > cap + 1e-12):
        idx = int(np.flatnonzero(np.abs(alphas) > cap + 1e-12)[0]) + 1
        raise PreconditionError(f"|log alpha| exceeds cap {cap} first at index {idx}")
    base = space_membership_orlicz(x, m, M, "0", lam=lam, p=p, tol=tol, tail_fraction=tail_fraction)
    if base.verdict is not Verdict.YES:
        raise PreconditionError("x is not accepted into the 0-variant space on this truncation")
    dev = _deviations(x, m, None)
    if alphas.size < dev.size:
        raise ValueError(f"need at least {dev.size} scalars, got {alphas.size}")
    dev_scaled = np.abs(alphas[: dev.size]) * dev
    p_vals = _p_values(p, dev.size)
    log_rho = base.witness_log_rho
    series_x = _series_for(dev, M, p_vals, lam, log_rho)
    series_y = _series_for(dev_scaled, M, p_vals, lam, log_rho)
    verdict, resid = tends_to_zero(series_y, tol, tail_fraction)
    excess = float(np.max(series_y - series_x))
    violation = None
    if verdict is not Verdict.YES:
        violation = f"scaled sequence left the space at witness log rho {log_rho!r} (tail residual {resid:.6g})"
    return SolidityReport(
        verdict=verdict,
        witness_log_rho=log_rho,
        max_term_excess=excess,
        violation=violation,
    )

"""Analysis orchestration and deterministic report serialization.

A report is a plain nested dict of JSON-safe values.  ``canonical_json``
serializes it with sorted keys and floats printed at 17 significant digits,
which round-trips doubles exactly; two runs over the same inputs therefore
produce byte-identical files.  Reports carry no timestamps or environment
data, only inputs, parameters and results.
"""

from __future__ import annotations

import math

import numpy as np

from .convergence import (
    SpaceMembership,
    delta_norm,
    space_membership,
    stat_convergence,
    stat_density_curve,
)
from .duals import alpha_dual_membership, vlambda_membership
from .orlicz import OrliczFn, delta2_probe, paranorm_g, space_membership_orlicz
from .sequences import GeoSeq, LambdaSeq, PSeq

__all__ = ["REPORT_SCHEMA_VERSION", "ALL_SPACES", "build_analysis", "canonical_json"]

REPORT_SCHEMA_VERSION = 1

#: analysis tokens accepted by --spaces; "orlicz" needs an Orlicz spec
ALL_SPACES = ("C1", "absC1", "Vlambda", "absVlambda", "linf", "S", "Slambda", "orlicz", "duals")

#: number of log-spaced sample points kept per density curve in the report
_CURVE_SAMPLES = 32


def canonical_json(obj, indent: int = 0) -> str:
    """Serialize to JSON with sorted keys and 17-significant-digit floats.

    Raises
    ------
    ValueError
        On non-finite floats or unsupported types; reports must stay
        JSON-portable.
    """
    pad = " " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"non-finite float {obj!r} cannot enter a report")
        return format(obj, ".17g")
    if isinstance(obj, str):
        out = ['"']
        for ch in obj:
            if ch in ('"', "\\"):
                out.append("\\" + ch)
            elif ord(ch) < 0x20:
                out.append(f"\\u{ord(ch):04x}")
            else:
                out.append(ch)
        out.append('"')
        return "".join(out)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [canonical_json(v, indent + 2) for v in obj]
        inner = ",\n".join(" " * (indent + 2) + it for it in items)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        keys = sorted(obj)
        items = []
        for k in keys:
            if not isinstance(k, str):
                raise ValueError(f"report keys must be strings, got {k!r}")
            items.append(
                " " * (indent + 2) + canonical_json(k) + ": " + canonical_json(obj[k], indent + 2)
            )
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise ValueError(f"unsupported report value type {type(obj).__name__}")


def _f(v) -> float:
    return float(v)


def _membership_dict(r: SpaceMembership) -> dict:
    out = {
        "verdict": r.verdict.value,
        "limit_log": None if r.limit is None else _f(r.limit.log),
        "residual": None if r.residual is None else _f(r.residual),
    }
    if r.sup_log is not None:
        out["sup_log"] = _f(r.sup_log)
    return out


def _sample_curve(densities: np.ndarray) -> list:
    n = densities.size
    if n <= _CURVE_SAMPLES:
        idx = np.arange(1, n + 1)
    else:
        idx = np.unique(np.geomspace(1, n, _CURVE_SAMPLES).astype(np.int64))
    return [[int(i), _f(densities[i - 1])] for i in idx]


def build_analysis(
    x: GeoSeq,
    m: int,
    lam: LambdaSeq,
    spaces: tuple[str, ...] = ALL_SPACES,
    eps_logs: tuple[float, ...] = (0.1, 0.5, 1.0),
    tol: float = 1e-2,
    tail_fraction: float = 0.2,
    orlicz: OrliczFn | None = None,
    p: PSeq | None = None,
    tol_rho: float = 1e-6,
    descriptor: str = "",
) -> dict:
    """Run the requested analyses and assemble the report dict.

    ``lam`` drives the windowed spaces; the Cesaro spaces always use prefix
    windows.  ``spaces`` selects sections; unknown tokens raise ValueError.
    The "orlicz" section needs ``orlicz``; exponents default to p identically
    1.
    """
    unknown = [s for s in spaces if s not in ALL_SPACES]
    if unknown:
        raise ValueError(f"unknown space tokens {unknown}; expected among {ALL_SPACES}")
    if "orlicz" in spaces and orlicz is None:
        raise ValueError("the 'orlicz' section requires an Orlicz function spec")

    report: dict = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "input": {
            "descriptor": descriptor or x.source,
            "n_terms": len(x),
            "source": x.source,
        },
        "parameters": {
            "m": m,
            "lambda": {
                "source": lam.source,
                "n_terms": len(lam),
                "unbounded": lam.unbounded,
            },
            "spaces": sorted(spaces),
            "eps_logs": [_f(e) for e in eps_logs],
            "tol": _f(tol),
            "tail_fraction": _f(tail_fraction),
            "tol_rho": _f(tol_rho),
            "orlicz": None if orlicz is None else orlicz.to_spec(),
            "p": {"source": p.source, "H": _f(p.H)} if p is not None else {"source": "const:1", "H": 1.0},
        },
        "flags": {
            "truncation_conditional": True,
            "lambda_unbounded_declared": lam.unbounded,
            "window_clipped": bool(lam.any_clipped(min(len(lam), max(1, len(x) - m)))),
        },
    }

    space_results: dict = {}
    for token in ("C1", "absC1", "linf"):
        if token in spaces:
            space_results[token] = _membership_dict(
                space_membership(x, m, token, None, tol, tail_fraction)
            )
    for token in ("Vlambda", "absVlambda"):
        if token in spaces:
            space_results[token] = _membership_dict(
                space_membership(x, m, token, lam, tol, tail_fraction)
            )

    curves = []
    for token, use_lam in (("S", None), ("Slambda", lam)):
        if token not in spaces:
            continue
        res = stat_convergence(x, m, use_lam, eps_logs, tol, tail_fraction)
        space_results[token] = {
            "verdict": res.verdict.value,
            "limit_log": _f(res.limit.log),
            "per_eps": [
                {
                    "eps_log": _f(d["eps_log"]),
                    "final_density": _f(d["final_density"]),
                    "tail_max_density": _f(d["tail_max_density"]),
                    "verdict": d["verdict"],
                }
                for d in res.per_eps
            ],
        }
        for eps in eps_logs:
            curve = stat_density_curve(x, m, res.limit, eps, use_lam)
            curves.append(
                {
                    "window": curve.window,
                    "eps_log": _f(eps),
                    "points": _sample_curve(curve.densities),
                }
            )
    if curves:
        report["density_curves"] = curves
    if space_results:
        report["spaces"] = space_results

    report["norms"] = {
        "cesaro_signed": _f(delta_norm(x, m, None, "signed").log),
        "cesaro_absolute": _f(delta_norm(x, m, None, "absolute").log),
        "window_signed": _f(delta_norm(x, m, lam, "signed").log),
        "window_absolute": _f(delta_norm(x, m, lam, "absolute").log),
    }

    if "orlicz" in spaces:
        memberships = {}
        for variant in ("L", "0", "inf"):
            r = space_membership_orlicz(x, m, orlicz, variant, lam, p, tol, tail_fraction)
            memberships[variant] = {
                "verdict": r.verdict.value,
                "witness_log_rho": None if r.witness_log_rho is None else _f(r.witness_log_rho),
                "limit_log": None if r.limit is None else _f(r.limit.log),
                "sup_log_unit_rho": None if r.sup_log_unit_rho is None else _f(r.sup_log_unit_rho),
            }
        pn = paranorm_g(x, m, orlicz, lam, p, tol_rho)
        d2 = delta2_probe(orlicz)
        report["orlicz"] = {
            "membership": memberships,
            "paranorm": {
                "attained": pn.attained,
                "value_log": None if pn.value is None else _f(pn.value.log),
                "inf_log_rho": None if pn.inf_log_rho is None else _f(pn.inf_log_rho),
                "H": _f(pn.H),
                "ambiguous_p": pn.ambiguous_p,
            },
            "delta2": {
                "sup_ratio": _f(d2.sup_ratio),
                "sup_refined": _f(d2.sup_refined) if math.isfinite(d2.sup_refined) else None,
                "satisfied": d2.satisfied,
            },
        }

    if "duals" in spaces:
        sup_res = vlambda_membership(x, m, lam, "sup", None, tol, tail_fraction)
        p_res = vlambda_membership(x, m, lam, "p", p, tol, tail_fraction)
        alpha = alpha_dual_membership(x, lam, m, tol)
        report["duals"] = {
            "vlambda_sup": {
                "verdict": sup_res.verdict.value,
                "sup_log": _f(sup_res.sup_log),
            },
            "vlambda_p": {
                "verdict": p_res.verdict.value,
                "partial_log": _f(p_res.partial_log),
            },
            "alpha_dual_as_coefficients": {
                "verdict": alpha.verdict.value,
                "partial_log": _f(alpha.partial_log),
            },
        }

    return report

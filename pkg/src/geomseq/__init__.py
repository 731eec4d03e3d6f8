"""Computational toolkit for geometric (multiplicative) difference sequence spaces.

The package works over the positive reals equipped with geometric arithmetic:
every number is carried as its natural logarithm, so the exponential map is an
isomorphism onto ordinary arithmetic.  On top of that base layer it provides
the m-th order geometric difference operator, Cesaro and de la Vallee-Poussin
mean analyses, statistical convergence densities, Orlicz-modular spaces with a
paranorm, and alpha-dual boundedness tests, all evaluated on explicit finite
truncations.
"""

from __future__ import annotations

from .geonum import (
    GEO_MINUS_ONE,
    GEO_ONE,
    GEO_ZERO,
    GeoDomainError,
    GeoNum,
    GeoRangeError,
    PreconditionError,
    geo_abs,
    geo_add,
    geo_div,
    geo_int_pow,
    geo_mul,
    geo_sub,
    geo_sum,
)
from .sequences import (
    GeoSeq,
    LambdaSeq,
    PSeq,
    SequenceFormatError,
    generate,
    ingest_lambda,
    ingest_pseq,
    ingest_sequence,
    seq_add,
    seq_scale,
    window,
    write_sequence,
)
from .difference import diff_binomial, diff_recursive
from .convergence import (
    DensityCurve,
    LimitEstimate,
    MeanSeries,
    SpaceMembership,
    Verdict,
    check_s_subset_slambda,
    delta_norm,
    estimate_limit,
    mean_series,
    space_membership,
    stat_convergence,
    stat_density_curve,
    sup_stabilized,
    tail_converged,
    tends_to_zero,
)
from .orlicz import (
    RHO_LOG_GRID,
    Delta2Report,
    OrliczFn,
    OrliczMembership,
    ParanormResult,
    delta2_probe,
    geo_orlicz_apply,
    modular_series,
    paranorm_g,
    solidity_check,
    space_membership_orlicz,
)
from .duals import (
    alpha_dual_membership,
    alpha_dual_u_equivalence,
    canonical_growth_sequence,
    lemma_growth_check,
    pairing_sum,
    u_transform,
    vlambda_membership,
)
from .report import REPORT_SCHEMA_VERSION, build_analysis, canonical_json

__version__ = "0.1.0"

__all__ = [
    "GEO_MINUS_ONE",
    "GEO_ONE",
    "GEO_ZERO",
    "GeoDomainError",
    "GeoNum",
    "GeoRangeError",
    "GeoSeq",
    "LambdaSeq",
    "PSeq",
    "PreconditionError",
    "SequenceFormatError",
    "Verdict",
    "DensityCurve",
    "LimitEstimate",
    "MeanSeries",
    "SpaceMembership",
    "OrliczFn",
    "OrliczMembership",
    "ParanormResult",
    "Delta2Report",
    "RHO_LOG_GRID",
    "REPORT_SCHEMA_VERSION",
    "alpha_dual_membership",
    "alpha_dual_u_equivalence",
    "build_analysis",
    "canonical_growth_sequence",
    "canonical_json",
    "check_s_subset_slambda",
    "delta2_probe",
    "delta_norm",
    "diff_binomial",
    "diff_recursive",
    "estimate_limit",
    "generate",
    "geo_abs",
    "geo_add",
    "geo_div",
    "geo_int_pow",
    "geo_mul",
    "geo_orlicz_apply",
    "geo_sub",
    "geo_sum",
    "ingest_lambda",
    "ingest_pseq",
    "ingest_sequence",
    "lemma_growth_check",
    "mean_series",
    "modular_series",
    "pairing_sum",
    "paranorm_g",
    "seq_add",
    "seq_scale",
    "solidity_check",
    "space_membership",
    "space_membership_orlicz",
    "stat_convergence",
    "stat_density_curve",
    "sup_stabilized",
    "tail_converged",
    "tends_to_zero",
    "u_transform",
    "vlambda_membership",
    "window",
    "write_sequence",
]

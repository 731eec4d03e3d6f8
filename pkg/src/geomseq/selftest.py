"""Seeded invariant suites runnable offline via the CLI or the service.

Each suite re-derives a handful of structural facts (isomorphism to ordinary
arithmetic, operator identities, reduction laws, closed forms) on randomly
sampled inputs.  A fixed seed reproduces the exact pass/fail trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import convergence, difference, duals, geonum, orlicz, sequences
from .convergence import Verdict

__all__ = ["SuiteOutcome", "SUITE_NAMES", "run_suites"]


@dataclass
class SuiteOutcome:
    name: str
    passed: int = 0
    failed: int = 0
    failures: list[str] = field(default_factory=list)

    def check(self, cond: bool, message: str) -> None:
        if cond:
            self.passed += 1
        else:
            self.failed += 1
            self.failures.append(message)


def _rand_geonum(rng: np.random.Generator, scale: float = 5.0) -> geonum.GeoNum:
    return geonum.GeoNum(float(rng.uniform(-scale, scale)))


def _suite_geocore(seed: int) -> SuiteOutcome:
    out = SuiteOutcome("geocore")
    rng = np.random.default_rng(seed)
    for _ in range(2000):
        a, b = _rand_geonum(rng), _rand_geonum(rng)
        out.check(abs(geonum.geo_add(a, b).log - (a.log + b.log)) <= 1e-12, "add vs log sum")
        out.check(abs(geonum.geo_sub(a, b).log - (a.log - b.log)) <= 1e-12, "sub vs log difference")
        out.check(abs(geonum.geo_mul(a, b).log - (a.log * b.log)) <= 1e-12, "mul vs log product")
        if abs(b.log) > 1e-9:
            out.check(abs(geonum.geo_div(a, b).log - (a.log / b.log)) <= 1e-12, "div vs log quotient")
        out.check(geonum.geo_abs(a).log == abs(a.log), "abs vs |log|")
    for _ in range(200):
        a, b, c = _rand_geonum(rng), _rand_geonum(rng), _rand_geonum(rng)
        out.check(geonum.geo_add(a, geonum.GEO_ZERO).log == a.log, "additive identity")
        out.check(geonum.geo_mul(a, geonum.GEO_ONE).log == a.log, "multiplicative identity")
        lhs = geonum.geo_mul(a, geonum.geo_add(b, c)).log
        rhs = geonum.geo_add(geonum.geo_mul(a, b), geonum.geo_mul(a, c)).log
        out.check(abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs)), "distributivity")
        for n in range(0, 9):
            acc = geonum.GEO_ONE
            try:
                for _i in range(n):
                    acc = geonum.geo_mul(acc, a)
                expect = acc.log
            except geonum.GeoRangeError:
                continue
            out.check(geonum.geo_int_pow(a, n).log == expect, f"int_pow({n}) exact fold")
    for _ in range(20):
        logs = rng.uniform(-10, 10, size=1000)
        terms = [geonum.GeoNum(float(v)) for v in logs]
        total = geonum.geo_sum(terms).log
        # pairwise-fold oracle
        work = list(map(float, logs))
        while len(work) > 1:
            work = [work[i] + work[i + 1] for i in range(0, len(work) - 1, 2)] + (
                [work[-1]] if len(work) % 2 else []
            )
        out.check(abs(total - work[0]) <= 1e-12 * max(1.0, abs(total)), "geo_sum vs pairwise fold")
    out.check(geonum.geo_sum([]).log == 0.0, "empty geo_sum is the geometric zero")
    try:
        geonum.geo_div(geonum.GEO_ONE, geonum.GEO_ZERO)
        out.check(False, "division by geometric zero must raise")
    except geonum.GeoDomainError:
        out.check(True, "")
    return out


def _suite_seqmodel(seed: int) -> SuiteOutcome:
    out = SuiteOutcome("seqmodel")
    rng = np.random.default_rng(seed + 1)
    for _ in range(50):
        n = int(rng.integers(2, 200))
        steps = rng.uniform(0.0, 1.0, size=n - 1)
        lam = sequences.LambdaSeq(values=np.concatenate(([1.0], 1.0 + np.cumsum(steps))))
        for nn in (1, n // 2 + 1, n):
            w = lam.window(nn)
            out.check(w.stop - 1 == nn, "window ends at n")
            out.check(w.start >= 1, "window start clipped to 1")
            out.check(len(w) <= lam.at(nn) + 1.0 + 1e-6, "window size bounded by lambda_n + 1")
    for bad in (
        np.array([2.0, 3.0]),
        np.array([1.0, 3.0]),
        np.array([1.0, 2.0, 1.5]),
    ):
        try:
            sequences.LambdaSeq(values=bad)
            out.check(False, f"lambda validation must reject {bad!r}")
        except ValueError:
            out.check(True, "")
    seq = sequences.generate("log-polynomial", 5, m=2)
    out.check(list(seq.logs) == [1.0, 4.0, 9.0, 16.0, 25.0], "log-polynomial m=2 logs")
    spikes = sequences.generate("sparse-spike", 100, indices="squares")
    out.check(int(np.sum(spikes.logs == 1.0)) == 10, "ten square spikes below 100")
    osc = sequences.generate("log-oscillatory", 64, m=3)
    d = difference.binomial_diff_logs(osc.logs, 3)
    signs = np.where(np.arange(1, d.size + 1) % 2 == 0, 1.0, -1.0)
    out.check(bool(np.allclose(d, signs, atol=1e-12)), "oscillatory family has (-1)^k difference logs")
    import io

    buf = io.StringIO()
    rand_seq = sequences.GeoSeq(logs=rng.uniform(-5, 5, size=40))
    sequences.write_sequence(rand_seq, buf, fmt="log")
    buf.seek(0)
    back = sequences.ingest_sequence(buf)
    out.check(bool(np.array_equal(back.logs, rand_seq.logs)), "log-format roundtrip is bit exact")
    return out


def _suite_diffops(seed: int) -> SuiteOutcome:
    out = SuiteOutcome("diffops")
    rng = np.random.default_rng(seed + 2)
    for _ in range(200):
        m = int(rng.integers(0, 8))
        n = int(rng.integers(m + 2, m + 60))
        x = sequences.GeoSeq(logs=rng.uniform(-5, 5, size=n))
        db = difference.diff_binomial(x, m)
        dr = difference.diff_recursive(x, m)
        out.check(len(db) == n - m, "binomial output length")
        out.check(len(dr) == n - m, "recursive output length")
        out.check(float(np.max(np.abs(db.logs - dr.logs))) <= 1e-10, "binomial = recursive")
    for m in range(1, 5):
        x = sequences.generate("log-polynomial", 200, m=m)
        d = difference.diff_recursive(x, m)
        target = (-1.0) ** m * math.factorial(m)
        out.check(float(np.max(np.abs(d.logs - target))) <= 1e-9, f"power family collapses at order {m}")
    for _ in range(50):
        m = int(rng.integers(0, 5))
        n = int(rng.integers(m + 2, m + 40))
        x = sequences.GeoSeq(logs=rng.uniform(-3, 3, size=n))
        y = sequences.GeoSeq(logs=rng.uniform(-3, 3, size=n))
        alpha, beta = _rand_geonum(rng, 2.0), _rand_geonum(rng, 2.0)
        combo = sequences.seq_add(sequences.seq_scale(alpha, x), sequences.seq_scale(beta, y))
        lhs = difference.diff_recursive(combo, m).logs
        rhs = alpha.log * difference.diff_recursive(x, m).logs + beta.log * difference.diff_recursive(y, m).logs
        out.check(float(np.max(np.abs(lhs - rhs))) <= 1e-10, "linearity of the difference")
        if m >= 1:
            dm = difference.diff_recursive(x, m).logs
            dm1 = difference.diff_recursive(x, m - 1).logs
            prefix = np.array([math.fsum(dm[:k]) for k in range(1, dm.size + 1)])
            expect = dm1[0] - dm1[1 : dm.size + 1]
            out.check(float(np.max(np.abs(prefix - expect))) <= 1e-10, "telescoping identity")
    xinc = sequences.GeoSeq(logs=np.arange(1.0, 21.0))
    out.check(bool(np.all(difference.diff_recursive(xinc, 1).logs < 0)), "sign convention on increasing logs")
    return out


def _suite_convergence(seed: int) -> SuiteOutcome:
    out = SuiteOutcome("convergence")
    rng = np.random.default_rng(seed + 3)
    n = 2000
    lam_n = sequences.LambdaSeq.cesaro(n)
    for _ in range(20):
        x = sequences.GeoSeq(logs=rng.uniform(-2, 2, size=n))
        m = int(rng.integers(0, 3))
        for base, windowed in (("C1", "Vlambda"), ("absC1", "absVlambda")):
            rb = convergence.space_membership(x, m, base, None, 1e-2)
            rw = convergence.space_membership(x, m, windowed, lam_n, 1e-2)
            out.check(rb.verdict is rw.verdict, f"lambda=n reduces {windowed} to {base}")
    const = sequences.generate("geometric-constant", n, log=0.7)
    for space in ("C1", "absC1", "Vlambda", "absVlambda", "linf"):
        r = convergence.space_membership(const, 1, space, lam_n, 1e-2)
        out.check(r.verdict is Verdict.YES, f"constant sequence in {space}")
    osc = sequences.generate("log-oscillatory", n, m=1)
    r_signed = convergence.space_membership(osc, 1, "C1", None, 1e-2)
    r_abs = convergence.space_membership(osc, 1, "absC1", None, 1e-2)
    out.check(r_signed.verdict is Verdict.YES, "oscillatory is Cesaro-summable")
    out.check(abs(r_signed.limit.log) <= 1e-2, "oscillatory Cesaro limit is the geometric 1")
    out.check(r_abs.verdict is Verdict.NO, "oscillatory fails the absolute space")
    series = 1.0 / np.arange(1, 10**4 + 1)
    est = convergence.estimate_limit(series, 1e-2, 0.2)
    out.check(est.converged is Verdict.YES and abs(est.limit.log) <= 1e-3, "1/n series converges to 0")
    spikes = sequences.generate("sparse-spike", 10**4, indices="squares")
    curve_small = convergence.stat_density_curve(spikes, 0, geonum.GEO_ZERO, 0.5)
    curve_big = convergence.stat_density_curve(spikes, 0, geonum.GEO_ZERO, 1.0)
    out.check(bool(np.all(curve_big.densities <= curve_small.densities + 1e-15)), "densities antitone in eps")
    out.check(abs(curve_small.at(100) - 0.10) <= 1e-12, "square spikes density at n=100")
    for _ in range(60):
        nn = int(rng.integers(30, 120))
        m = int(rng.integers(0, 3))
        x = sequences.GeoSeq(logs=rng.uniform(-3, 3, size=nn))
        y = sequences.GeoSeq(logs=rng.uniform(-3, 3, size=nn))
        alpha = _rand_geonum(rng, 2.0)
        lam = sequences.LambdaSeq.ceiling_half(nn)
        variant = ("signed", "absolute")[int(rng.integers(0, 2))]
        use_lam = lam if rng.integers(0, 2) else None
        nx = convergence.delta_norm(x, m, use_lam, variant).log
        ny = convergence.delta_norm(y, m, use_lam, variant).log
        nxy = convergence.delta_norm(sequences.seq_add(x, y), m, use_lam, variant).log
        nax = convergence.delta_norm(sequences.seq_scale(alpha, x), m, use_lam, variant).log
        out.check(nx >= 0.0, "norm nonnegative at the log level")
        out.check(nxy <= nx + ny + 1e-10, "norm triangle inequality")
        out.check(abs(nax - abs(alpha.log) * nx) <= 1e-10, "norm absolute homogeneity")
    allone = sequences.generate("geometric-constant", 50, log=0.0)
    out.check(convergence.delta_norm(allone, 1, None, "absolute").log == 0.0, "all-1 sequence has norm 1")
    return out


def _suite_orlicz(seed: int) -> SuiteOutcome:
    out = SuiteOutcome("orlicz")
    rng = np.random.default_rng(seed + 4)
    M1 = orlicz.OrliczFn.power(1.0)
    M2 = orlicz.OrliczFn.power(2.0)
    for c in (0.5, 1.0, 2.0):
        x = sequences.GeoSeq(logs=-c * np.arange(0.0, 200.0))
        pn = orlicz.paranorm_g(x, 1, M1, None, None, 1e-6)
        out.check(pn.attained and abs(pn.value.log - c) <= 1e-6, f"paranorm closed form at c={c}")
    for _ in range(40):
        nn = int(rng.integers(30, 100))
        x = sequences.GeoSeq(logs=rng.uniform(-2, 2, size=nn))
        y = sequences.GeoSeq(logs=rng.uniform(-2, 2, size=nn))
        M = (M1, M2)[int(rng.integers(0, 2))]
        gx = orlicz.paranorm_g(x, 1, M, None, None, 1e-9).value.log
        gy = orlicz.paranorm_g(y, 1, M, None, None, 1e-9).value.log
        gxy = orlicz.paranorm_g(sequences.seq_add(x, y), 1, M, None, None, 1e-9).value.log
        out.check(gxy <= gx + gy + 1e-8, "paranorm subadditive")
        dev = np.abs(difference.binomial_diff_logs(x.logs, 1))
        s_small = orlicz._series_for(dev, M, None, None, 0.5)
        s_big = orlicz._series_for(dev, M, None, None, 2.0)
        out.check(bool(np.all(s_big <= s_small + 1e-12)), "modular series antitone in rho")
    d2p = orlicz.delta2_probe(M2)
    out.check(d2p.satisfied and abs(d2p.sup_ratio - 4.0) <= 1e-9, "doubling holds for t^2 with ratio 4")
    d2e = orlicz.delta2_probe(orlicz.OrliczFn.exp_minus_one())
    out.check(not d2e.satisfied, "doubling fails for e^t - 1")
    decay = sequences.GeoSeq(logs=np.cumsum(-1.0 / np.arange(1.0, 402.0) ** 2))
    alt = np.where(np.arange(1, 401) % 2 == 0, 1.0, -1.0)
    rep = orlicz.solidity_check(decay, alt, 1, M1, None, None, 1e-2)
    out.check(rep.verdict is Verdict.YES, "sign-flipping scalars preserve membership")
    out.check(rep.max_term_excess <= 1e-12, "scaled modular never exceeds the original")
    return out


def _suite_duals(seed: int) -> SuiteOutcome:
    out = SuiteOutcome("duals")
    rng = np.random.default_rng(seed + 5)
    n = 3000
    for lam in (sequences.LambdaSeq.cesaro(n), sequences.LambdaSeq.ceiling_half(n)):
        for m in (1, 2):
            xc = duals.canonical_growth_sequence(lam, m)
            r = duals.vlambda_membership(xc, m, lam, "sup", None, 1e-2)
            out.check(r.verdict is Verdict.YES, f"canonical sequence accepted (m={m}, {lam.source})")
    lam_n = sequences.LambdaSeq.cesaro(n)
    ks = np.arange(1.0, n + 1.0)
    member = sequences.GeoSeq(logs=1.0 / (lam_n.values**1 * ks**2))
    non_member = sequences.GeoSeq(logs=1.0 / lam_n.values**1)
    out.check(
        duals.alpha_dual_membership(member, lam_n, 1, 1e-2).verdict is Verdict.YES,
        "fast-decay coefficients accepted",
    )
    out.check(
        duals.alpha_dual_membership(non_member, lam_n, 1, 1e-2).verdict is Verdict.NO,
        "slow-decay coefficients rejected",
    )
    xc = duals.canonical_growth_sequence(lam_n, 1)
    for _ in range(20):
        scale = float(rng.uniform(0.1, 3.0))
        a = sequences.GeoSeq(logs=scale / (lam_n.values * ks**2))
        dual_sum = float(np.sum(lam_n.values * np.abs(a.logs)))
        growth = float(np.max(np.abs(xc.logs) / lam_n.values))
        pairing = duals.pairing_sum(a, xc)
        out.check(float(pairing[-1]) <= growth * dual_sum + 1e-9, "pairing bounded by sup * dual sum")
        rep = duals.alpha_dual_u_equivalence(a, lam_n, 1, [xc, member, non_member], 1e-2)
        out.check(not rep.flips, "u transform never flips pairing verdicts")
    xg = duals.u_transform(sequences.GeoSeq(logs=np.arange(1.0, n + 1.0)), 1)
    g = duals.lemma_growth_check(xg, 1, lam_n, 1e-2)
    out.check(abs(g.sup_raw_ratio - 1.0) <= 1e-12, "growth bound for u(e^k) is exactly 1")
    out.check(not g.trending_up_raw, "growth ratio not trending upward")
    return out


SUITE_NAMES = ("geocore", "seqmodel", "diffops", "convergence", "orlicz", "duals")

_SUITES = {
    "geocore": _suite_geocore,
    "seqmodel": _suite_seqmodel,
    "diffops": _suite_diffops,
    "convergence": _suite_convergence,
    "orlicz": _suite_orlicz,
    "duals": _suite_duals,
}


def run_suites(seed: int = 0, only: list[str] | None = None) -> list[SuiteOutcome]:
    """Run the selected suites (all by default) with a deterministic seed."""
    names = list(only) if only else list(SUITE_NAMES)
    unknown = [n for n in names if n not in _SUITES]
    if unknown:
        raise ValueError(f"unknown suites {unknown}; expected among {SUITE_NAMES}")
    return [_SUITES[name](seed) for name in names]

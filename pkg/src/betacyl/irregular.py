"""Density traces -log_beta |I_n(x)| / n and extremely irregular points.

For an admissible prefix w of length n whose longest suffix matching the
expansion of 1 has length m, the cylinder length is beta^-n T^m(1), so

    d_n = 1 + (-log_beta T^m(1)) / n,   with  beta^-(t_m+1) <= T^m(1) <= beta^-t_m.

The trace therefore needs one certified logarithm per distinct m.  Exact
bases detect T^m(1) = 1 and T^m(1) = beta^-j exactly; otherwise d_n is an
interval from outward-rounded logarithms.

The constructor concatenates a seed, a zero block making it full, and
blocks e*_1..e*_{m_k} 0^(t_{m_k}+1).  Each block is a full word, so the
whole prefix is admissible, and at n_k (the end of the e*-part of block k)
the cylinder is as short as the zero run after m_k allows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from mpmath.ctx_iv import MPIntervalContext
from mpmath.libmp import to_rational

from .errors import DomainError, EmptyTail, NotAdmissible, ScheduleInfeasible, SpikeCheckFailed
from .expansion import (
    ZERO_RUN_BUDGET,
    DigitStream,
    Word,
    _IntervalOrbit,
    _one_cache,
    check_alphabet,
    expansion_of_one,
    format_word,
    one_orbit_enclosure,
    word_value_enclosure,
    zero_runs,
)
from .language import _matcher
from .reals import Beta, BetaNumber, Enclosure
from .report import enclosure_pair

_IV = MPIntervalContext()
_IV.prec = 192
_LOG_BITS = 160


def _iv_bounds(x) -> tuple[Fraction, Fraction]:
    lo, hi = x._mpi_
    return Fraction(*map(int, to_rational(lo))), Fraction(*map(int, to_rational(hi)))


def _context(bits: int) -> MPIntervalContext:
    if bits <= _LOG_BITS:
        return _IV
    ctx = MPIntervalContext()
    ctx.prec = bits + 32
    return ctx


def _ln_dyadic(a_lo: int, a_hi: int, e: int, bits: int = _LOG_BITS):
    """Interval containing ln(y) for y in [a_lo 2^e, a_hi 2^e], a_lo > 0."""
    ctx = _context(bits)
    sh = max(0, a_hi.bit_length() - bits)
    a_lo, a_hi, e = a_lo >> sh, -((-a_hi) >> sh), e + sh
    if a_lo <= 0:
        raise ArithmeticError("nonpositive lower bound")
    return ctx.log(ctx.mpf([a_lo, a_hi])) + e * ctx.log(2)


def _ln_fraction(lo: Fraction, hi: Fraction, bits: int = _LOG_BITS):
    """Interval containing ln(y) for y in [lo, hi], lo > 0."""
    e = min(lo.numerator.bit_length() - lo.denominator.bit_length(), 0) - bits
    a_lo = (lo.numerator << -e) // lo.denominator
    a_hi = -((-(hi.numerator << -e)) // hi.denominator)
    return _ln_dyadic(a_lo, a_hi, e, bits)


def _ln_beta(beta: Beta, bits: int = _LOG_BITS):
    if beta.rational is not None:
        r = beta.rational
        return _ln_fraction(r, r, bits)
    p = min(beta.budget, bits + 32)
    k = beta.floor_scaled(p)
    return _ln_dyadic(k, k + 1, -p, bits)


# --------------------------------------------------------------------------
# traces


@dataclass
class DensityRecord:
    n: int
    d_lo: Fraction
    d_hi: Fraction
    k_star: int
    t_aux: int
    gamma: int
    full: bool
    exact: bool

    @property
    def d(self) -> Enclosure:
        return Enclosure(self.d_lo, self.d_hi)

    def row(self) -> dict:
        return {"n": self.n, "d_lo": self.d_lo, "d_hi": self.d_hi, "k_star": self.k_star,
                "t_aux": self.t_aux, "gamma": self.gamma, "full": int(self.full)}


@dataclass
class DensityTrace:
    beta: str
    source: str
    records: list[DensityRecord]

    @property
    def N(self) -> int:
        return len(self.records)

    def at(self, n: int) -> DensityRecord:
        return self.records[n - 1]


class _OrbitLogs:
    """Per-m data for T^m(1): fullness, exact exponent j, and ln bounds."""

    def __init__(self, beta: Beta):
        self.beta = beta
        self.ln_beta = _ln_beta(beta)
        self._cache: dict[int, tuple] = {}

    def get(self, m: int, t: int) -> tuple[bool, int | None, object]:
        hit = self._cache.get(m)
        if hit is None:
            hit = self._cache[m] = self._compute(m, t)
        return hit

    def _compute(self, m: int, t: int):
        beta = self.beta
        if m == 0:
            return True, 0, None
        point = _one_cache(beta, m + 1)["orbit"]
        if beta.exact:
            y: BetaNumber = point[m]
            if (y - 1).is_zero():
                return True, 0, None
            for j in (t, t + 1):
                if (y - beta.power(-j)).is_zero():
                    return False, j, None
            bits = int((t + 1) * math.log2(beta.approx()) + 1) + _LOG_BITS
            enc = y.enclosure(bits)
            return False, None, -_ln_fraction(enc.lo, enc.hi)
        orb: _IntervalOrbit = point
        lo, hi, sh = orb.lo[m], orb.hi[m], orb.shift[m]
        ln = _ln_dyadic(lo, hi, sh - orb.prec)
        return False, None, -ln


def _word_of(source, N: int) -> tuple[Word, str]:
    if isinstance(source, DigitStream):
        return source.prefix(N), source.origin
    word = tuple(source)
    if len(word) < N:
        raise ValueError(f"source has {len(word)} digits, fewer than N={N}")
    return word[:N], f"word of length {len(word)}"


def density_trace(beta: Beta, source, N: int, run_budget: int = ZERO_RUN_BUDGET) -> DensityTrace:
    """Records (n, d_n, k*_n, t_{n-k*_n}, Gamma_n, full) for n = 1..N."""
    if N < 1:
        raise ValueError("N must be positive")
    word, origin = _word_of(source, N)
    word = check_alphabet(beta, word)
    states = _matcher(beta, N).states(word)
    ts = zero_runs(beta, N, run_budget)
    logs = _OrbitLogs(beta)
    records = []
    gamma = 0
    for n, m in enumerate(states, start=1):
        gamma = max(gamma, ts[n - 1])
        t = ts[m - 1] if m else 0
        full, j, neg_ln = logs.get(m, t)
        if full:
            d_lo = d_hi = Fraction(1)
            exact = True
        elif j is not None:
            d_lo = d_hi = Fraction(n + j, n)
            exact = True
        else:
            d = 1 + neg_ln / (n * logs.ln_beta)
            d_lo, d_hi = _iv_bounds(d)
            d_lo = max(d_lo, Fraction(1))
            exact = False
        records.append(DensityRecord(n, d_lo, d_hi, n - m, t, gamma, full, exact))
    return DensityTrace(beta.spec, origin, records)


def refine_record(beta: Beta, rec: DensityRecord, bits: int) -> DensityRecord:
    """Recompute an inexact d_n with logarithms good to about 2^-bits."""
    if rec.exact:
        return rec
    m = rec.n - rec.k_star
    y = one_orbit_enclosure(beta, m, bits + 32)
    d = 1 - _ln_fraction(y.lo, y.hi, bits) / (rec.n * _ln_beta(beta, bits))
    lo, hi = _iv_bounds(d)
    lo, hi = max(lo, rec.d_lo), min(hi, rec.d_hi)
    return DensityRecord(rec.n, lo, hi, rec.k_star, rec.t_aux, rec.gamma, rec.full, False)


def _inside(rec: DensityRecord, lower: Fraction, upper: Fraction) -> bool | None:
    """Certified membership of d_n in [lower, upper]; None when undecided."""
    if lower <= rec.d_lo and rec.d_hi <= upper:
        return True
    if rec.d_hi < lower or rec.d_lo > upper:
        return False
    return None


@dataclass
class DensitySummary:
    """Finite-N estimates over the tail n >= tail_start; none of these are limits."""

    tail_start: int
    N: int
    lower: Enclosure
    upper: Enclosure
    tau_hat: Fraction
    upper_minus_one_plus_tau: float
    tau_bracket: str
    coverage: bool
    max_gap: float
    gap_tol: float
    note: str = "finite-N estimates of liminf/limsup; not limits"

    def as_dict(self) -> dict:
        return {"tail_start": self.tail_start, "N": self.N,
                "lower_density": enclosure_pair(self.lower),
                "upper_density": enclosure_pair(self.upper),
                "lower_density_approx": float(self.lower.mid),
                "upper_density_approx": float(self.upper.mid),
                "tau_hat": str(self.tau_hat), "tau_hat_approx": float(self.tau_hat),
                "upper_minus_one_plus_tau": self.upper_minus_one_plus_tau,
                "upper_vs_tau_bracket": self.tau_bracket,
                "coverage": self.coverage, "max_gap": self.max_gap, "gap_tol": self.gap_tol,
                "note": self.note}


def _bracket_verdict(upper: Enclosure, low_b: Fraction, high_b: Fraction) -> str:
    if low_b <= upper.lo and upper.hi <= high_b:
        return "holds"
    if low_b > upper.hi or upper.lo > high_b:
        return "violated"
    return "undecided"


def density_summary(trace: DensityTrace, tail_start: int, gap_tol: float = 0.2,
                    beta: Beta | None = None) -> DensitySummary:
    """Extremes, tau-hat and coverage of the trace over n >= tail_start.

    With ``beta`` given, records whose enclosures straddle the bracket for
    the upper density are refined until the bracket is decided or the
    budget runs out.
    """
    if gap_tol <= 0:
        raise ValueError("gap_tol must be positive")
    tail = [r for r in trace.records if r.n >= tail_start]
    if not tail:
        raise EmptyTail(f"no records with n >= {tail_start} (trace has N={trace.N})")
    tau_hat = max(Fraction(r.t_aux, r.n) for r in tail)
    # the upper density sits between max (n+t)/n and max (n+t+1)/n
    low_b = max(Fraction(r.n + r.t_aux, r.n) for r in tail)
    high_b = max(Fraction(r.n + r.t_aux + 1, r.n) for r in tail)
    upper = Enclosure(max(r.d_lo for r in tail), max(r.d_hi for r in tail))
    bracket = _bracket_verdict(upper, low_b, high_b)
    bits = 2 * _LOG_BITS
    while bracket == "undecided" and beta is not None and bits <= beta.budget:
        tail = [refine_record(beta, r, bits)
                if not r.exact and (r.d_hi > high_b or r.d_lo < low_b <= r.d_hi) else r
                for r in tail]
        upper = Enclosure(max(r.d_lo for r in tail), max(r.d_hi for r in tail))
        bracket = _bracket_verdict(upper, low_b, high_b)
        bits *= 2
    lower = Enclosure(min(r.d_lo for r in tail), min(r.d_hi for r in tail))
    mids = sorted({float(r.d.mid) for r in tail})
    top = float(upper.mid)
    first_gap = mids[0] - 1.0
    max_gap = max((b - a for a, b in zip(mids, mids[1:])), default=0.0)
    coverage = first_gap <= gap_tol and max_gap <= 2 * gap_tol and top - mids[-1] <= gap_tol
    return DensitySummary(tail_start, trace.N, lower, upper, tau_hat,
                          top - (1 + float(tau_hat)), bracket, coverage, max_gap, gap_tol)


def spectrum_dim(lam, delta):
    """(lambda + 1 - delta) / (delta * lambda) for 1 < delta <= 1 + lambda."""
    exact = all(isinstance(v, (int, Fraction)) for v in (lam, delta))
    if not exact:
        lam, delta = float(lam), float(delta)
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    if not 1 < delta <= 1 + lam:
        raise DomainError(f"delta must lie in (1, 1 + lambda] = (1, {1 + lam}], got {delta}")
    return (lam + 1 - delta) / (delta * lam)


# --------------------------------------------------------------------------
# construction


@dataclass
class ConstructionSchedule:
    beta: str
    seed: Word
    gamma_seed: int
    r: int
    search_cap: int
    growth: int
    lambda_hat: Fraction
    lambda_hat_at: int
    m: list[int] = field(default_factory=list)
    t: list[int] = field(default_factory=list)
    h: list[int] = field(default_factory=list)
    windows: list[tuple[int, int]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ell(self) -> int:
        return len(self.seed)

    @property
    def K(self) -> int:
        return len(self.m)

    @property
    def n(self) -> list[int]:
        return [h + m for h, m in zip(self.h, self.m)]

    @property
    def ratios(self) -> list[Fraction]:
        return [Fraction(t, m) for t, m in zip(self.t, self.m)]

    @property
    def full_positions(self) -> list[int]:
        """Ends of the seed block and of every constructed block."""
        return [self.h[0]] + [h + m + t + 1 for h, m, t in zip(self.h, self.m, self.t)]

    @property
    def length(self) -> int:
        return self.full_positions[-1]

    def as_dict(self) -> dict:
        return {"beta": self.beta, "seed": format_word(self.seed), "ell": self.ell,
                "gamma_seed": self.gamma_seed, "K": self.K, "r": self.r,
                "search_cap": self.search_cap, "growth": self.growth,
                "lambda_hat": str(self.lambda_hat), "lambda_hat_approx": float(self.lambda_hat),
                "lambda_hat_at": self.lambda_hat_at,
                "blocks": [{"k": k + 1, "h": self.h[k], "window": list(self.windows[k]),
                            "m": self.m[k], "t_m": self.t[k], "n": self.n[k],
                            "ratio": str(self.ratios[k]), "ratio_approx": float(self.ratios[k])}
                           for k in range(self.K)],
                "full_positions": self.full_positions, "length": self.length,
                "warnings": self.warnings}


def schedule(beta: Beta, seed: Sequence[int], K: int, r: int = 10, search_cap: int = 400,
             growth: int = 2, depth_cap: int = 1 << 16,
             run_budget: int = 1 << 16) -> ConstructionSchedule:
    """Choose m_1..m_K maximizing t_m/m in windows [r h_k, max(search_cap, growth r h_k)].

    lambda_hat = max_{m <= search_cap} t_m/m is the target ratio.  The window
    always starts at r*h_k so that h_k/m_k <= 1/r; it is infeasible only when
    r*h_k exceeds ``depth_cap``.
    """
    seed = check_alphabet(beta, seed)
    if not seed:
        raise ValueError("seed must be nonempty")
    if K < 1 or r < 1 or growth < 1 or search_cap < 1:
        raise ValueError("K, r, growth and search_cap must be positive")
    if _matcher(beta, len(seed)).run(seed) is None:
        raise NotAdmissible("seed is not admissible", word=format_word(seed))
    ts_cap = zero_runs(beta, search_cap, run_budget)
    ratios = [Fraction(t, m) for m, t in enumerate(ts_cap, start=1)]
    lam = max(ratios)
    lam_at = ratios.index(lam) + 1
    ell = len(seed)
    gamma_seed = max(zero_runs(beta, ell, run_budget))
    sched = ConstructionSchedule(beta.spec, seed, gamma_seed, r, search_cap, growth, lam, lam_at)
    if lam == 0:
        sched.warnings.append("lambda_hat = 0: every t_m vanishes, so the construction degenerates "
                              "and no density spikes are possible (positive lambda is required)")
    h = ell + gamma_seed + 1
    for _ in range(K):
        lo = r * h
        if lo > depth_cap:
            raise ScheduleInfeasible(f"r*h_k = {lo} exceeds the depth cap {depth_cap}")
        hi = max(search_cap, growth * lo)
        ts = zero_runs(beta, hi, run_budget)
        best = max(range(lo, hi + 1), key=lambda m: (Fraction(ts[m - 1], m), -m))
        sched.h.append(h)
        sched.m.append(best)
        sched.t.append(ts[best - 1])
        sched.windows.append((lo, hi))
        h = h + best + ts[best - 1] + 1
    return sched


class ConstructedPoint(DigitStream):
    """Digit stream of the right endpoint of I(u): u followed by the expansion of 1."""

    def __init__(self, beta: Beta, word: Word, sched: ConstructionSchedule):
        self.word = word
        self.schedule = sched
        L = len(word)

        def fill(n: int) -> Word:
            if n <= L:
                return word[:n]
            return word + expansion_of_one(beta, n - L)

        super().__init__(fill, f"constructed point (seed {format_word(sched.seed)}, K={sched.K})")


def build_irregular(beta: Beta, sched: ConstructionSchedule,
                    bits: int = 64) -> tuple[ConstructedPoint, Enclosure]:
    """The point y whose digits are seed, 0^(Gamma+1), then the blocks, then e*."""
    ones = expansion_of_one(beta, max(sched.m))
    parts = [sched.seed, (0,) * (sched.gamma_seed + 1)]
    for m, t in zip(sched.m, sched.t):
        parts.append(ones[:m] + (0,) * (t + 1))
    word = tuple(d for part in parts for d in part)
    _matcher(beta, len(word)).states(word)  # raises if any prefix is inadmissible
    stream = ConstructedPoint(beta, word, sched)
    L = len(word)
    tail = word_value_enclosure(beta, (0,) * (L - 1) + (1,), bits + 8)
    enc = word_value_enclosure(beta, word, bits + 8) + tail
    return stream, enc


def seed_distance_ok(beta: Beta, sched: ConstructionSchedule, value: Enclosure) -> bool:
    """Certify |value(seed) - y| <= beta^-ell."""
    ell = sched.ell
    seed = word_value_enclosure(beta, sched.seed, 96)
    radius = word_value_enclosure(beta, (0,) * (ell - 1) + (1,), 96)
    return value.hi - seed.lo <= radius.lo and seed.hi - value.lo <= radius.lo


@dataclass
class SpikeReport:
    spikes: list[dict]
    full_positions: list[dict]
    lambda_hat: Fraction
    skipped: bool
    reason: str = ""

    @property
    def ok(self) -> bool:
        return all(s["ok"] for s in self.spikes) and all(f["ok"] for f in self.full_positions)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "skipped": self.skipped, "reason": self.reason,
                "lambda_hat": str(self.lambda_hat), "one_plus_lambda_hat": 1 + float(self.lambda_hat),
                "spikes": self.spikes, "full_positions": self.full_positions}


def _log2_width(rec: DensityRecord) -> int | None:
    w = rec.d_hi - rec.d_lo
    if w == 0:
        return None
    return w.numerator.bit_length() - w.denominator.bit_length()


def verify_spike(beta: Beta, sched: ConstructionSchedule, trace: DensityTrace,
                 raise_on_failure: bool = True) -> SpikeReport:
    """Check (n_k + t)/n_k <= d_{n_k} <= (n_k + t + 1)/n_k and d = 1 at full positions."""
    need = sched.length
    if trace.N < need:
        raise ValueError(f"trace has N={trace.N}, needs at least {need}")
    spikes, fulls = [], []
    for k, (nk, t) in enumerate(zip(sched.n, sched.t), start=1):
        rec = trace.at(nk)
        lower, upper = Fraction(nk + t, nk), Fraction(nk + t + 1, nk)
        ok = _inside(rec, lower, upper)
        bits = 2 * _LOG_BITS
        while ok is None and bits <= beta.budget:
            rec = refine_record(beta, rec, bits)
            ok = _inside(rec, lower, upper)
            bits *= 2
        ok = bool(ok)
        spikes.append({"k": k, "n": nk, "t_m": t, "lower": str(lower), "upper": str(upper),
                       "d_approx": float(rec.d.mid), "d_width_log2": _log2_width(rec),
                       "ok": ok})
        if not ok and raise_on_failure:
            raise SpikeCheckFailed(f"d_{nk} = [{float(rec.d_lo)}, {float(rec.d_hi)}] outside "
                                   f"[{float(lower)}, {float(upper)}]", k=k)
    for pos in sched.full_positions:
        rec = trace.at(pos)
        ok = rec.full and rec.exact and rec.d_lo == rec.d_hi == 1
        fulls.append({"n": pos, "d": str(rec.d_lo) if rec.exact else None, "ok": ok})
        if not ok and raise_on_failure:
            raise SpikeCheckFailed(f"position {pos} is not full with d = 1 exactly", k=None)
    skipped = sched.lambda_hat == 0
    reason = "lambda_hat = 0: spikes are vacuous (positive lambda required)" if skipped else ""
    return SpikeReport(spikes, fulls, sched.lambda_hat, skipped, reason)

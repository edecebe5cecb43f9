"""Property-suite runner behind ``betacyl verify``."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .config import RunConfig
from .errors import BetaError
from .expansion import (
    digits,
    expansion_of_one,
    format_word,
    one_stream,
    word_value,
    zero_runs,
)
from .irregular import build_irregular, density_trace, schedule, seed_distance_ok, verify_spike
from .language import (
    cylinder,
    enumerate_words,
    fullness_laws_check,
    is_admissible,
    k_star,
    length_from_kstar,
    partition_oracle,
)
from .reals import Beta, certified_sign, make_beta

SERIES_SUM_TOL = Fraction(1, 10 ** 12)
SAMPLE_POINTS = (Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(5, 7))


@dataclass
class CheckResult:
    name: str
    beta: str
    status: str  # pass, fail or skipped
    detail: str = ""
    counterexample: dict | None = None
    seconds: float = 0.0

    def as_dict(self, timings: bool = False) -> dict:
        out = {"check": self.name, "beta": self.beta, "status": self.status, "detail": self.detail,
               "counterexample": self.counterexample}
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


@dataclass
class VerifyReport:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.status != "fail" for r in self.results)

    def counts(self) -> dict[str, int]:
        out = {"pass": 0, "fail": 0, "skipped": 0}
        for r in self.results:
            out[r.status] += 1
        return out


class _Fail(Exception):
    def __init__(self, detail: str, **counterexample):
        super().__init__(detail)
        self.counterexample = counterexample


def _length(beta: Beta, w, fault: str | None):
    if fault == "kstar":
        k = k_star(beta, w)
        return length_from_kstar(beta, len(w), k + 1 if k < len(w) else k - 1)
    return cylinder(beta, w).length


def check_partition(beta: Beta, cfg: RunConfig, fault: str | None = None) -> str:
    """Cylinder lengths from k* agree with the gaps between sorted left endpoints."""
    total = 0
    for n in range(1, cfg.verify_n + 1):
        for entry in partition_oracle(beta, n, cfg.enum_cap):
            mine = _length(beta, entry.word, fault)
            if beta.exact:
                same = (mine - entry.length).is_zero()
            else:
                same = mine.enclosure(80).intersects(entry.length.enclosure(80))
            if not same:
                raise _Fail("k* length differs from the partition oracle",
                            word=format_word(entry.word), n=n)
            total += 1
    return f"{total} words agree"


def check_partition_sum(beta: Beta, cfg: RunConfig) -> str:
    for n in range(1, cfg.verify_n + 1):
        words = enumerate_words(beta, n, cfg.enum_cap).words
        total = sum((cylinder(beta, w).length for w in words), beta.zero)
        if beta.exact:
            if not (total - 1).is_zero():
                raise _Fail("lengths do not sum to 1", n=n)
        else:
            enc = total.enclosure(60)
            if not (enc.lo >= 1 - SERIES_SUM_TOL and enc.hi <= 1 + SERIES_SUM_TOL):
                raise _Fail(f"sum {float(enc.mid)} is not within 1e-12 of 1", n=n)
    return f"n <= {cfg.verify_n}"


def check_length_bounds(beta: Beta, cfg: RunConfig) -> str:
    """beta^-(n+Gamma_n+1) <= |I(w)| <= beta^-n for every admissible w."""
    ts = zero_runs(beta, max(cfg.bounds_n, cfg.bounds_m), cfg.run_budget)
    count = 0
    for n in range(1, cfg.bounds_n + 1):
        gamma = max(ts[:n])
        low, high = beta.power(-(n + gamma + 1)), beta.power(-n)
        for w in enumerate_words(beta, n, cfg.enum_cap).words:
            length = cylinder(beta, w).length
            if certified_sign(length - low) < 0 or certified_sign(high - length) < 0:
                raise _Fail("cylinder length outside its bounds", word=format_word(w), n=n)
            count += 1
    for m in range(1, cfg.bounds_m + 1):
        w = expansion_of_one(beta, m)
        t = ts[m - 1]
        length = cylinder(beta, w).length
        if (certified_sign(length - beta.power(-(m + t + 1))) < 0
                or certified_sign(beta.power(-(m + t)) - length) < 0):
            raise _Fail("prefix of the expansion of 1 outside its bounds", word=format_word(w), n=m)
    return f"{count} words, {cfg.bounds_m} prefixes"


def check_fullness_laws(beta: Beta, cfg: RunConfig) -> str:
    rep = fullness_laws_check(beta, cfg.fullness_n, cfg.fullness_m)
    if not rep.ok:
        v = rep.violations[0]
        raise _Fail(f"{len(rep.violations)} violations, first {v['law']}: {v['detail']}", word=v["word"])
    return f"checked {sum(rep.checked.values())}, beyond depth {rep.beyond_depth}, undecided {rep.undecided}"


def check_round_trip(beta: Beta, cfg: RunConfig) -> str:
    """Digits reconstruct their point to within beta^-n and are admissible."""
    for x in SAMPLE_POINTS:
        for n in range(1, 13):
            w = digits(beta, x, n)
            if not is_admissible(beta, w):
                raise _Fail("digits are not admissible", word=format_word(w), x=str(x), n=n)
            gap = x - word_value(beta, w)
            if certified_sign(gap) <= 0 or certified_sign(beta.power(-n) - gap) < 0:
                raise _Fail("digits do not reconstruct the point", word=format_word(w), x=str(x), n=n)
    source = beta.one_source
    if source is not None:
        n = 30
        if expansion_of_one(beta, n) != source.prefix(n):
            raise _Fail("expansion of 1 differs from the defining sequence", n=n)
    return f"{len(SAMPLE_POINTS)} points, n <= 12"


def construction_budget(cfg: RunConfig) -> int:
    """Working bits for constructed points: their length scales with depth_cap."""
    return max(cfg.budget, cfg.depth_cap)


def check_spikes(beta: Beta, cfg: RunConfig) -> tuple[str, str]:
    if beta.budget < construction_budget(cfg):
        beta = make_beta(beta.spec, budget=construction_budget(cfg))
    sched = schedule(beta, (1,), cfg.K, cfg.r, cfg.search_cap, cfg.growth, cfg.depth_cap)
    if sched.lambda_hat == 0:
        return "skipped", "lambda_hat = 0: spike checks need positive lambda"
    stream, value = build_irregular(beta, sched)
    trace = density_trace(beta, stream, sched.length, run_budget=max(cfg.run_budget, 2 * sched.length))
    report = verify_spike(beta, sched, trace, raise_on_failure=False)
    if not report.ok:
        bad = next((s for s in report.spikes if not s["ok"]), None)
        raise _Fail("spike bracket or full position failed", k=bad["k"] if bad else None)
    if not seed_distance_ok(beta, sched, value):
        raise _Fail("constructed point is farther than beta^-ell from its seed")
    return "pass", f"K={sched.K}, m={sched.m}, lambda_hat={sched.lambda_hat}"


CHECKS: dict[str, Callable] = {
    "fullness_laws": check_fullness_laws,
    "length_bounds": check_length_bounds,
    "partition_oracle": check_partition,
    "partition_sum": check_partition_sum,
    "round_trip": check_round_trip,
    "spikes": check_spikes,
}


def _run_one(name: str, spec: str, beta: Beta, cfg: RunConfig, fault: str | None) -> CheckResult:
    start = time.perf_counter()
    try:
        if name == "partition_oracle":
            status, detail = "pass", check_partition(beta, cfg, fault)
        elif name == "spikes":
            status, detail = check_spikes(beta, cfg)
        else:
            status, detail = "pass", CHECKS[name](beta, cfg)
        result = CheckResult(name, spec, status, detail)
    except _Fail as exc:
        result = CheckResult(name, spec, "fail", str(exc), exc.counterexample | {"beta": spec})
    except BetaError as exc:
        result = CheckResult(name, spec, "fail", f"{exc.code}: {exc}", {"beta": spec, **exc.details()})
    result.seconds = time.perf_counter() - start
    return result


def verify_suite(specs: list[str], cfg: RunConfig | None = None, fault: str | None = None,
                 checks: list[str] | None = None) -> VerifyReport:
    """Run every check on every base; results sorted by check name, then spec."""
    if not specs:
        raise ValueError("at least one beta spec is required")
    cfg = cfg or RunConfig()
    names = sorted(checks or CHECKS)
    report = VerifyReport()
    for spec in sorted(set(specs)):
        try:
            beta = make_beta(spec, budget=cfg.budget)
        except BetaError as exc:
            for name in names:
                report.results.append(CheckResult(name, spec, "fail", f"{exc.code}: {exc}", {"beta": spec}))
            continue
        for name in names:
            report.results.append(_run_one(name, spec, beta, cfg, fault))
    report.results.sort(key=lambda r: (r.name, r.beta))
    return report

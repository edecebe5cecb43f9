"""The eight acceptance criteria, each at its stated tolerance.

Each test records one PASS/FAIL line; conftest prints them in the terminal
summary.  Run alone with ``pytest tests/test_acceptance.py -v``.
"""

from __future__ import annotations

import contextlib
import time
from fractions import Fraction

from betacyl.config import RunConfig
from betacyl.expansion import (
    DigitSource,
    beta_from_one_expansion,
    expansion_of_one,
    point_stream,
    zero_runs,
)
from betacyl.irregular import (
    build_irregular,
    density_trace,
    schedule,
    seed_distance_ok,
    spectrum_dim,
    verify_spike,
)
from betacyl.language import (
    Fullness,
    _matcher,
    cylinder,
    enumerate_words,
    fullness_laws_check,
    partition_oracle,
)
from betacyl.reals import certified_sign, make_beta, refine
from betacyl.verify import verify_suite

from conftest import ACCEPTANCE, ALL_SPECS, DOUBLING, GOLDEN, TRIBONACCI, TWO

SERIES_TOL = Fraction(1, 10 ** 12)
EPS16 = Fraction(1, 1 << 16)
LABELS = {TWO: "two", GOLDEN: "golden", TRIBONACCI: "tribonacci", DOUBLING: "doubling-runs"}


@contextlib.contextmanager
def criterion(k: int, notes: list[str]):
    try:
        yield
    except BaseException as exc:
        ACCEPTANCE[k] = (False, f"{type(exc).__name__}: {exc}"[:200])
        print(f"criterion {k}: FAIL {exc}")
        raise
    ACCEPTANCE[k] = (True, "; ".join(notes))
    print(f"criterion {k}: PASS {'; '.join(notes)}")


def test_1_oracle_equivalence():
    notes: list[str] = []
    with criterion(1, notes):
        start = time.perf_counter()
        total = 0
        for spec in ALL_SPECS:
            beta = make_beta(spec, budget=1 << 16)
            for n in range(1, 9):
                for entry in partition_oracle(beta, n):
                    mine = cylinder(beta, entry.word).length
                    if beta.exact:
                        assert (mine - entry.length).is_zero(), (spec, entry.word)
                    else:
                        assert mine.enclosure(80).intersects(entry.length.enclosure(80)), (spec, entry.word)
                    total += 1
        elapsed = time.perf_counter() - start
        notes.append(f"{total} words over 4 bases in {elapsed:.1f}s")
        assert elapsed < 60, f"took {elapsed:.1f}s"


def test_2_partition_completeness(bases):
    notes: list[str] = []
    with criterion(2, notes):
        for spec, beta in bases.items():
            for n in range(1, 9):
                words = enumerate_words(beta, n).words
                total = sum((cylinder(beta, w).length for w in words), beta.zero)
                if beta.exact:
                    assert (total - 1).is_zero(), (spec, n)
                else:
                    enc = total.enclosure(60)
                    assert 1 - SERIES_TOL <= enc.lo and enc.hi <= 1 + SERIES_TOL, (spec, n, float(enc.mid))
        notes.append("exact sum 1 on three bases, within 1e-12 on the series base, n <= 8")


def test_3_length_bounds(bases):
    notes: list[str] = []
    with criterion(3, notes):
        words = prefixes = 0
        for spec, beta in bases.items():
            ts = zero_runs(beta, 12)
            for n in range(1, 11):
                gamma = max(ts[:n])
                low, high = beta.power(-(n + gamma + 1)), beta.power(-n)
                for w in enumerate_words(beta, n).words:
                    length = cylinder(beta, w).length
                    assert certified_sign(length - low) >= 0, (spec, w)
                    assert certified_sign(high - length) >= 0, (spec, w)
                    words += 1
            for m in range(1, 13):
                length = cylinder(beta, expansion_of_one(beta, m)).length
                t = ts[m - 1]
                assert certified_sign(length - beta.power(-(m + t + 1))) >= 0, (spec, m)
                assert certified_sign(beta.power(-(m + t)) - length) >= 0, (spec, m)
                prefixes += 1
        notes.append(f"{words} words (n <= 10) and {prefixes} prefixes (m <= 12), zero violations")


def test_4_fullness_laws(bases, golden):
    notes: list[str] = []
    with criterion(4, notes):
        for spec, beta in bases.items():
            rep = fullness_laws_check(beta, n_max=6, m_max=4)
            assert rep.ok, (spec, rep.violations[:3])
            notes.append(f"{LABELS[spec]}: {sum(rep.checked.values())} checks, "
                         f"undecided {rep.undecided}")
        counts = [enumerate_words(golden, n).count for n in range(1, 6)]
        assert counts == [2, 3, 5, 8, 13], counts
        notes.append("golden counts 2,3,5,8,13")


def test_5_round_trips(golden):
    notes: list[str] = []
    with criterion(5, notes):
        sources = {"1^inf": DigitSource.periodic((1,)), "(1,0)^inf": DigitSource.periodic((1, 0)),
                   "doubling-runs": DigitSource.doubling_runs()}
        built = {}
        for name, src in sources.items():
            beta = beta_from_one_expansion(src, EPS16, budget=1 << 16)
            built[name] = beta
            for n in range(1, 31):
                assert expansion_of_one(beta, n) == src.prefix(n), (name, n)
            assert refine(beta, EPS16).width <= EPS16, name
        assert built["1^inf"].rational == 2
        from_seq = built["(1,0)^inf"]
        assert from_seq.minpoly == golden.minpoly
        assert refine(from_seq, EPS16) == refine(golden, EPS16)
        assert from_seq.enclosure_bits(256).intersects(golden.enclosure_bits(256))
        notes.append("three sequences reproduced to n = 30, widths <= 2^-16, golden matches poly root")


def test_6_constructed_irregular_point(doubling):
    notes: list[str] = []
    with criterion(6, notes):
        start = time.perf_counter()
        cfg = RunConfig()
        sched = schedule(doubling, (1,), K=2, r=10, search_cap=400, growth=cfg.growth, depth_cap=cfg.depth_cap)
        stream, value = build_irregular(doubling, sched)
        # (a) the automaton rejects at the first inadmissible digit, so this covers every prefix
        _matcher(doubling, sched.length + 64).states(stream.prefix(sched.length + 64))
        trace = density_trace(doubling, stream, sched.length, run_budget=2 * sched.length)
        report = verify_spike(doubling, sched, trace, raise_on_failure=False)
        # (b) spike brackets
        assert report.spikes and all(s["ok"] for s in report.spikes), report.spikes
        # (c) d_n = 1 exactly at block ends
        assert all(f["ok"] and f["d"] == "1" for f in report.full_positions), report.full_positions
        # (d) close to the seed
        assert seed_distance_ok(doubling, sched, value)
        elapsed = time.perf_counter() - start
        notes.append(f"lambda_hat={sched.lambda_hat}, m={sched.m}, n_k={sched.n}, "
                     f"d(n_k)~{[round(s['d_approx'], 6) for s in report.spikes]}, {elapsed:.0f}s")
        assert elapsed < 300, f"took {elapsed:.0f}s"


def test_7_degenerate_base(two):
    notes: list[str] = []
    with criterion(7, notes):
        ts = zero_runs(two, 500)
        assert ts == [0] * 500
        for n in range(1, 9):
            assert all(cylinder(two, w).fullness is Fullness.FULL for w in enumerate_words(two, n).words)
        for x in (Fraction(1, 3), Fraction(5, 7), Fraction(1)):
            trace = density_trace(two, point_stream(two, x), 200)
            assert all(r.gamma == 0 and r.d_lo == r.d_hi == 1 for r in trace.records)
        report = verify_suite([TWO], RunConfig(r=2, search_cap=50), checks=["spikes"])
        (res,) = report.results
        assert res.status == "skipped" and "lambda_hat = 0" in res.detail, res
        notes.append(f"t = Gamma = 0 to n = 500, all cylinders full, d == 1; spikes: {res.detail}")


def test_8_spectrum():
    notes: list[str] = []
    with criterion(8, notes):
        for lam in (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(3)):
            assert abs(spectrum_dim(lam, 1 + lam)) <= 1e-12
            assert abs(spectrum_dim(float(lam), 1 + float(lam))) <= 1e-12
        assert abs(spectrum_dim(1, Fraction(3, 2)) - Fraction(1, 3)) <= 1e-12
        assert abs(spectrum_dim(1.0, 1.5) - 1 / 3) <= 1e-12
        notes.append("0 at delta = 1 + lambda, 1/3 at (1, 1.5)")

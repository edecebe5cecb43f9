from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest

from betacyl.errors import DomainError, EmptyTail, NotAdmissible, ScheduleInfeasible
from betacyl.expansion import point_stream
from betacyl.irregular import (
    build_irregular,
    density_summary,
    density_trace,
    schedule,
    seed_distance_ok,
    spectrum_dim,
    verify_spike,
)
from betacyl.language import is_admissible, partition_oracle


def test_spectrum_values():
    assert spectrum_dim(1, Fraction(3, 2)) == Fraction(1, 3)
    assert spectrum_dim(Fraction(1, 2), Fraction(3, 2)) == 0
    assert abs(spectrum_dim(1.0, 1.5) - 1 / 3) < 1e-15
    for bad in ((1, 1), (1, 3), (0, Fraction(1, 2))):
        with pytest.raises(DomainError):
            spectrum_dim(*bad)


def test_golden_trace_matches_partition_lengths(golden):
    """d_n from k* against -log of the partition-oracle length, via mpmath."""
    x = Fraction(5, 7)
    trace = density_trace(golden, point_stream(golden, x), 8)
    w = point_stream(golden, x).prefix(8)
    with mpmath.workdps(50):
        ln_beta = mpmath.log((1 + mpmath.sqrt(5)) / 2)
        for n in range(1, 9):
            entry = next(e for e in partition_oracle(golden, n) if e.word == w[:n])
            enc = entry.length.enclosure(120)
            length = mpmath.mpf(enc.lo.numerator) / enc.lo.denominator
            d = -mpmath.log(length) / (n * ln_beta)
            rec = trace.at(n)
            assert float(rec.d_lo) - 1e-12 <= d <= float(rec.d_hi) + 1e-12


def test_golden_first_density(golden):
    trace = density_trace(golden, point_stream(golden, Fraction(1)), 4)
    assert trace.at(1).d_lo == trace.at(1).d_hi == 2


def test_base_two_trace_is_flat(two):
    trace = density_trace(two, point_stream(two, Fraction(2, 7)), 50)
    assert all(r.full and r.d_lo == r.d_hi == 1 for r in trace.records)
    summary = density_summary(trace, 10)
    assert summary.tau_hat == 0 and summary.tau_bracket == "holds"


def test_summary_needs_tail(two):
    trace = density_trace(two, point_stream(two, Fraction(1, 3)), 5)
    with pytest.raises(EmptyTail):
        density_summary(trace, 6)


def test_schedule_on_doubling_runs(doubling):
    sched = schedule(doubling, (1,), 2, r=4, search_cap=200)
    assert sched.lambda_hat == 1
    assert sched.m == [135, 2059] and sched.t == [128, 2048] and sched.h == [3, 267]
    assert sched.n == [138, 2326]
    assert sched.full_positions == [3, 267, 4375]
    for h, m, (lo, hi) in zip(sched.h, sched.m, sched.windows):
        assert lo <= m <= hi and m >= 4 * h


def test_schedule_rejects_bad_seed(golden, doubling):
    with pytest.raises(NotAdmissible):
        schedule(golden, (1, 1), 1)
    with pytest.raises(ScheduleInfeasible):
        schedule(doubling, (1,), 3, r=10, search_cap=50, depth_cap=100)


def test_constructed_point_small(doubling):
    sched = schedule(doubling, (1, 0), 2, r=4, search_cap=200)
    stream, value = build_irregular(doubling, sched)
    assert is_admissible(doubling, stream.prefix(sched.length + 50))
    assert seed_distance_ok(doubling, sched, value)
    trace = density_trace(doubling, stream, sched.length, run_budget=2 * sched.length)
    report = verify_spike(doubling, sched, trace)
    assert report.ok and not report.skipped
    # spikes approach 1 + lambda_hat from below
    d = [s["d_approx"] for s in report.spikes]
    assert all(1.8 < v < 2 for v in d)


def test_degenerate_base_is_skipped(two):
    sched = schedule(two, (1,), 1, r=2, search_cap=20)
    assert sched.lambda_hat == 0 and sched.warnings
    stream, _ = build_irregular(two, sched)
    trace = density_trace(two, stream, sched.length)
    report = verify_spike(two, sched, trace)
    assert report.skipped and "lambda_hat = 0" in report.reason

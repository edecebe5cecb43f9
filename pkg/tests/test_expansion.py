from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betacyl.errors import DomainError, InvalidBetaSpec, NotSelfAdmissible
from betacyl.expansion import (
    DigitSource,
    beta_from_one_expansion,
    digits,
    expansion_of_one,
    format_word,
    one_orbit_enclosure,
    one_orbit_point,
    orbit,
    parse_dseq,
    parse_word,
    step_T,
    word_value,
    word_value_enclosure,
    zero_run_table,
    zero_runs,
)
from betacyl.reals import make_beta

from conftest import DATA


def rational_digits(beta: Fraction, x: Fraction, n: int) -> tuple[int, ...]:
    """Direct Fraction iteration of T x = beta x - ceil(beta x) + 1."""
    out = []
    for _ in range(n):
        y = beta * x
        c = math.ceil(y)
        out.append(c - 1)
        x = y - c + 1
    return tuple(out)


def mp_digits(root: float, x, n: int) -> tuple[int, ...]:
    with mpmath.workdps(200):
        b = mpmath.mpf(root) if not callable(root) else root()
        x = mpmath.mpf(x)
        out = []
        for _ in range(n):
            y = b * x
            c = int(mpmath.ceil(y))
            out.append(c - 1)
            x = y - c + 1
        return tuple(out)


def test_word_parsing_round_trip():
    assert parse_word("1,0,1") == (1, 0, 1)
    assert parse_word("") == ()
    assert format_word((1, 0, 2)) == "1,0,2"
    with pytest.raises(ValueError):
        parse_word("1,a")


def test_half_in_base_two_uses_infinite_convention(two):
    assert digits(two, Fraction(1, 2), 4) == (0, 1, 1, 1)
    assert digits(two, Fraction(3, 4), 4, greedy=True) == (1, 1, 0, 0)


@pytest.mark.parametrize("beta", [Fraction(2), Fraction(3, 2), Fraction(5, 2), Fraction(3)])
@pytest.mark.parametrize("x", [Fraction(1), Fraction(1, 2), Fraction(2, 7), Fraction(9, 10)])
def test_rational_bases_match_fraction_oracle(beta, x):
    b = make_beta(f"dec:{float(beta)}")
    assert digits(b, x, 25) == rational_digits(beta, x, 25)


def test_golden_digits_match_mpmath(golden):
    phi = lambda: (1 + mpmath.sqrt(5)) / 2  # noqa: E731
    # x = 1 hits exact integers along its orbit, where floats cannot decide the ceiling
    for x in (Fraction(1, 3), Fraction(5, 7), Fraction(2, 9)):
        assert digits(golden, x, 40) == mp_digits(phi, x.numerator / mpmath.mpf(x.denominator), 40)


def test_x_outside_domain(two):
    with pytest.raises(DomainError):
        digits(two, 0, 3)
    with pytest.raises(DomainError):
        step_T(two, Fraction(3, 2))


@pytest.mark.parametrize("spec,block", [("dec:2", (1,)), ("poly:-1,-1,1@[1/1,2/1]", (1, 0)),
                                        ("poly:-1,-1,-1,1@[1/1,2/1]", (1, 1, 0))])
def test_expansion_of_one_is_periodic(spec, block):
    b = make_beta(spec)
    n = 30
    assert expansion_of_one(b, n) == (block * n)[:n]


def test_orbit_values_are_exact_points(golden):
    w, pts = orbit(golden, 1, 6)
    assert w == (1, 0, 1, 0, 1, 0)
    assert all((p - 1).is_zero() or (p - golden.power(-1)).is_zero() for p in pts)


@settings(max_examples=40, deadline=None)
@given(st.fractions(min_value=Fraction(1, 50), max_value=1, max_denominator=50), st.integers(1, 15))
def test_digits_reconstruct_within_beta_power(x, n):
    b = make_beta("poly:-1,-1,1@[1/1,2/1]")
    w = digits(b, x, n)
    gap = x - word_value(b, w)
    enc = gap.enclosure(80)
    assert enc.hi > 0
    assert enc.lo <= b.power(-n).enclosure(80).hi


def test_dseq_files_parse():
    src = parse_dseq((DATA / "doubling_runs.dseq").read_text())
    assert src.prefix(20) == (1, 0, 1, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1)
    assert parse_dseq("1,0\nrepeat:2\n").prefix(5) == (1, 0, 1, 0, 1)
    assert parse_dseq("# comment\n1, 1, 0  # digits\nrepeat:3").prefix(6) == (1, 1, 0, 1, 1, 0)
    for bad in ("", "1,x", "1\nrepeat:9", "1,0\nrule:other"):
        with pytest.raises(InvalidBetaSpec):
            parse_dseq(bad)


def test_non_self_admissible_sequence_rejected():
    with pytest.raises(NotSelfAdmissible):
        beta_from_one_expansion(DigitSource.periodic((1, 0, 1, 1)))


def test_golden_dseq_is_the_golden_ratio(golden):
    b = make_beta(f"dseq:{DATA / 'golden.dseq'}")
    assert b.exact and b.minpoly == golden.minpoly
    assert b.enclosure_bits(100) == golden.enclosure_bits(100)


def test_binary_dseq_is_two():
    b = make_beta(f"dseq:{DATA / 'binary.dseq'}")
    assert b.rational == 2


def test_zero_runs_match_direct_count(doubling):
    ones = doubling.one_source.prefix(1000)

    def direct(n):
        t = 0
        while ones[n + t] == 0:
            t += 1
        return t

    assert zero_runs(doubling, 300) == [direct(n) for n in range(1, 301)]
    assert zero_runs(make_beta("dec:2"), 50) == [0] * 50


def test_zero_run_table_lambda_hat(doubling, golden):
    table = zero_run_table(doubling, 300)
    # t_1 = 1 already gives Gamma_1 / 1 = 1
    assert (table.lambda_hat, table.lambda_hat_at) == (1, 1)
    assert table.gamma_ratio[263] == Fraction(256, 264)
    assert table.records[10] == (11, 8, 8)
    assert zero_run_table(golden, 20).lambda_hat == 1


def test_series_orbit_digits_certified(doubling):
    # digits re-derived from interval orbit of 1 agree with the defining rule
    assert expansion_of_one(doubling, 3000) == doubling.one_source.prefix(3000)


def test_one_orbit_enclosure_matches_exact(golden):
    for m in range(1, 8):
        enc = one_orbit_enclosure(golden, m, 80)
        assert enc.intersects(one_orbit_point(golden, m).enclosure(120))


def test_word_value_enclosure_contains_exact(golden):
    w = (1, 0, 0, 1, 0, 1, 0, 0, 0, 1)
    assert word_value_enclosure(golden, w, 64).contains(word_value(golden, w).enclosure(200).mid) or \
        word_value_enclosure(golden, w, 64).intersects(word_value(golden, w).enclosure(200))

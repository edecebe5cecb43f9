from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betacyl.errors import BudgetExceeded, InvalidBetaSpec, PrecisionExhausted
from betacyl.reals import (
    Enclosure,
    Ordering,
    bits_for,
    certified_ceil,
    certified_compare,
    certified_sign,
    make_beta,
    parse_rational,
    refine,
)

def test_parse_rational_forms():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("1.25") == Fraction(5, 4)
    assert parse_rational("7") == 7
    with pytest.raises(InvalidBetaSpec):
        parse_rational("x")


def test_bits_for():
    assert bits_for(Fraction(1, 1 << 16)) == 16
    assert bits_for(Fraction(1, 3)) == 2
    assert bits_for(1) == 0


def test_golden_enclosures_are_nested(golden):
    outer = golden.enclosure_bits(8)
    for p in (16, 64, 300):
        enc = golden.enclosure_bits(p)
        assert enc.width == Fraction(1, 1 << p)
        assert enc.subset_of(outer)
        outer = enc


def test_golden_enclosure_against_mpmath_high_precision(golden):
    enc = golden.enclosure_bits(200)
    with mpmath.workprec(400):
        root = mpmath.findroot(lambda x: x ** 2 - x - 1, 1.6)
        assert mpmath.mpf(enc.lo.numerator) / enc.lo.denominator <= root
        assert root <= mpmath.mpf(enc.hi.numerator) / enc.hi.denominator


def test_tribonacci_minimal_polynomial_and_value(tribonacci):
    assert tribonacci.minpoly == [-1, -1, -1, 1]
    assert abs(tribonacci.approx() - 1.839286755214161) < 1e-12


def test_reducible_polynomial_picks_factor():
    # (x^2 - x - 1)(x + 1) = x^3 - 2x - 1
    b = make_beta("poly:-1,-2,0,1@[3/2,2/1]")
    assert b.minpoly == [-1, -1, 1]


def test_decimal_spec_is_rational():
    b = make_beta("dec:1.5")
    assert b.rational == Fraction(3, 2)
    assert b.alphabet_size == 2


@pytest.mark.parametrize("spec", ["dec:", "dec:1/2", "dec:0.5", "poly:1,x@[1,2]", "nope:3",
                                  "poly:-1,-1,1@[2/1,3/1]"])
def test_bad_specs(spec):
    with pytest.raises(InvalidBetaSpec):
        make_beta(spec)


def test_golden_identity_is_exact(golden):
    b = golden.gen
    assert (b * b - b - 1).is_zero()
    assert (golden.power(-1) - (b - 1)).is_zero()


def test_refine_width(golden):
    enc = refine(golden, Fraction(1, 10 ** 6))
    assert enc.width <= Fraction(1, 10 ** 6)
    x = golden.gen - 1
    assert refine(x, Fraction(1, 1 << 40)).width <= Fraction(1, 1 << 40)


def test_budget_is_enforced():
    b = make_beta("poly:-1,-1,1@[1/1,2/1]", budget=32)
    with pytest.raises(BudgetExceeded):
        b.enclosure_bits(64)


def test_compare_and_ceil(golden):
    phi = golden.gen
    assert certified_compare(phi, Fraction(8, 5)) is Ordering.GREATER
    assert certified_compare(phi * phi, phi + 1) is Ordering.EQUAL
    assert certified_ceil(phi) == 2
    assert certified_ceil(phi * phi - phi) == 1  # exactly the integer 1
    assert certified_sign(phi - 2) == -1


def test_enclosure_straddle_is_not_guessed():
    with pytest.raises(PrecisionExhausted):
        certified_sign(Enclosure(Fraction(-1, 4), Fraction(1, 4)))
    with pytest.raises(PrecisionExhausted):
        certified_ceil(Enclosure(Fraction(3, 4), Fraction(5, 4)))


def _as_float(coeffs, low):
    phi = (1 + math.sqrt(5)) / 2
    return sum(float(c) * phi ** (low + i) for i, c in enumerate(coeffs))


small = st.fractions(min_value=-4, max_value=4, max_denominator=16)


@settings(max_examples=60, deadline=None)
@given(st.lists(small, min_size=1, max_size=4), st.integers(-3, 3),
       st.lists(small, min_size=1, max_size=4), st.integers(-3, 3))
def test_arithmetic_matches_floats(golden, a, la, b, lb):
    x, y = golden.number(a, la), golden.number(b, lb)
    fx, fy = _as_float(a, la), _as_float(b, lb)
    for value, expect in ((x + y, fx + fy), (x - y, fx - fy), (x * y, fx * fy)):
        enc = value.enclosure(60)
        tol = 1e-9 * max(1.0, abs(expect))
        assert float(enc.lo) - tol <= expect <= float(enc.hi) + tol


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=Fraction(1, 100), max_value=3, max_denominator=100))
def test_compare_with_rationals_matches_floats(golden, q):
    phi = (1 + math.sqrt(5)) / 2
    got = certified_compare(golden.gen, q)
    assert got == (Ordering.GREATER if phi > q else Ordering.LESS)


def test_series_base_bracket(doubling):
    enc = doubling.enclosure_bits(64)
    assert enc.width == Fraction(1, 1 << 64)
    # 1 = sum over the digits of beta^-i; check the float sum at the bracket
    digits = doubling.one_source.prefix(200)
    f = lambda b: sum(d * b ** -(i + 1) for i, d in enumerate(digits))  # noqa: E731
    assert f(float(enc.lo)) >= 1 - 1e-12 and f(float(enc.hi)) <= 1 + 1e-12
    assert not doubling.exact

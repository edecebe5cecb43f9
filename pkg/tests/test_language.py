from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betacyl.errors import BudgetExceeded, NotAdmissible
from betacyl.expansion import expansion_of_one, word_value
from betacyl.language import (
    Fullness,
    cylinder,
    enumerate_words,
    fullness_laws_check,
    is_admissible,
    is_admissible_bruteforce,
    k_star,
    lex_compare,
    partition_oracle,
)
from betacyl.reals import Ordering, make_beta


def no_run_of_ones(w, k):
    """Golden words avoid 11, tribonacci words avoid 111."""
    return "1" * k not in "".join(map(str, w))


def test_lex_compare():
    assert lex_compare((1, 0), (1, 1)) is Ordering.LESS
    assert lex_compare((1, 0, 1), (1, 0)) is Ordering.GREATER
    assert lex_compare((1, 0, 1), (1, 0, 0), n=2) is Ordering.EQUAL


@pytest.mark.parametrize("spec,k", [("poly:-1,-1,1@[1/1,2/1]", 2), ("poly:-1,-1,-1,1@[1/1,2/1]", 3)])
def test_enumeration_matches_forbidden_block_oracle(spec, k):
    b = make_beta(spec)
    for n in range(1, 9):
        expect = [w for w in itertools.product((0, 1), repeat=n) if no_run_of_ones(w, k)]
        assert enumerate_words(b, n).words == expect


def test_golden_and_tribonacci_counts(golden, tribonacci):
    assert [enumerate_words(golden, n).count for n in range(1, 6)] == [2, 3, 5, 8, 13]
    assert [enumerate_words(tribonacci, n).count for n in range(1, 6)] == [2, 4, 7, 13, 24]


def test_base_two_language_is_everything(two):
    assert enumerate_words(two, 6).count == 64


def test_enumeration_cap(golden):
    with pytest.raises(BudgetExceeded):
        enumerate_words(golden, 20, cap=16)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=30))
def test_automaton_agrees_with_bruteforce(doubling, w):
    assert is_admissible(doubling, w) == is_admissible_bruteforce(doubling, w)


def test_k_star_by_definition(golden, doubling):
    for b in (golden, doubling):
        for n in range(1, 8):
            ones = expansion_of_one(b, n)
            for w in enumerate_words(b, n).words:
                k = min(k for k in range(n + 1) if w[k:] == ones[:n - k])
                assert k_star(b, w) == k


def test_k_star_rejects_inadmissible(golden):
    with pytest.raises(NotAdmissible):
        k_star(golden, (1, 1))


def test_base_two_cylinders_are_dyadic(two):
    for w in enumerate_words(two, 5).words:
        info = cylinder(two, w)
        assert info.length.rational_value() == Fraction(1, 32)
        assert info.fullness is Fullness.FULL


def test_golden_lengths_are_two_values(golden):
    short, long_ = golden.power(-4), golden.power(-3)
    for w in enumerate_words(golden, 3).words:
        length = cylinder(golden, w).length
        assert (length - short).is_zero() or (length - long_).is_zero()


@pytest.mark.parametrize("n", range(1, 7))
def test_partition_oracle_tiles_unit_interval(golden, n):
    entries = partition_oracle(golden, n)
    assert entries[0].left.is_zero()
    total = sum((e.length for e in entries), golden.zero)
    assert (total - 1).is_zero()
    for e in entries:
        assert (cylinder(golden, e.word).length - e.length).is_zero()


def test_cylinder_right_endpoint(golden):
    info = cylinder(golden, (1, 0))
    assert (info.right - info.left - info.length).is_zero()
    assert (info.left - word_value(golden, (1, 0))).is_zero()
    row = info.row()
    assert row["word"] == "1,0" and row["full"] == "Full"


def test_fullness_laws_small(golden, tribonacci):
    for b in (golden, tribonacci):
        rep = fullness_laws_check(b, 4, 3)
        assert rep.ok, rep.violations
        assert all(v > 0 for v in rep.checked.values())

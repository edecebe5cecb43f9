from __future__ import annotations

from pathlib import Path

import pytest

from betacyl.reals import make_beta

DATA = Path(__file__).resolve().parents[1] / "data"

TWO = "dec:2"
GOLDEN = "poly:-1,-1,1@[1/1,2/1]"
TRIBONACCI = "poly:-1,-1,-1,1@[1/1,2/1]"
DOUBLING = f"dseq:{DATA / 'doubling_runs.dseq'}"
ALL_SPECS = (TWO, GOLDEN, TRIBONACCI, DOUBLING)

# acceptance results, filled by tests/test_acceptance.py and printed at the end
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def two():
    return make_beta(TWO)


@pytest.fixture(scope="session")
def golden():
    return make_beta(GOLDEN)


@pytest.fixture(scope="session")
def tribonacci():
    return make_beta(TRIBONACCI)


@pytest.fixture(scope="session")
def doubling():
    return make_beta(DOUBLING, budget=1 << 16)


@pytest.fixture(scope="session")
def bases(two, golden, tribonacci, doubling):
    return {TWO: two, GOLDEN: golden, TRIBONACCI: tribonacci, DOUBLING: doubling}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, note = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {note}")

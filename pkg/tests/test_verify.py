from __future__ import annotations

import pytest

from betacyl.config import RunConfig
from betacyl.verify import verify_suite

from conftest import GOLDEN, TRIBONACCI


def test_exact_bases_pass_and_order_is_deterministic():
    cfg = RunConfig(verify_n=6, bounds_n=8, fullness_n=4, fullness_m=3, r=4, search_cap=200, K=1)
    report = verify_suite([TRIBONACCI, "dec:2", GOLDEN], cfg)
    assert report.ok, [r for r in report.results if r.status == "fail"]
    keys = [(r.name, r.beta) for r in report.results]
    assert keys == sorted(keys)
    spikes = {r.beta: r for r in report.results if r.name == "spikes"}
    assert spikes["dec:2"].status == "skipped" and "lambda_hat = 0" in spikes["dec:2"].detail
    assert spikes[GOLDEN].status == "pass"


def test_fault_is_caught_with_counterexample():
    report = verify_suite([GOLDEN], RunConfig(verify_n=4), fault="kstar", checks=["partition_oracle"])
    (res,) = report.results
    assert res.status == "fail"
    assert set(res.counterexample) >= {"beta", "word", "n"}


def test_bad_spec_is_reported_not_raised():
    report = verify_suite(["dec:oops"], RunConfig(), checks=["round_trip"])
    assert not report.ok and report.results[0].counterexample == {"beta": "dec:oops"}


def test_empty_spec_list():
    with pytest.raises(ValueError):
        verify_suite([])

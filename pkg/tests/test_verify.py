"""Verification-grid tests, including the inverted-chain negative control."""

import pytest

from ehrmab.core import EhChainParams
from ehrmab.pseudo_value import VIOLATION_TOL
from ehrmab.verify import (
    check_lemma3_condition_identity,
    check_property1,
    check_theorem2,
    check_theorem3,
    run_checks,
)


def test_property1_holds_on_sampled_chains():
    report = check_property1(n_chains=20, l_max=60)
    assert report.passed
    assert report.max_violation <= VIOLATION_TOL


def test_property1_negative_control():
    # a negatively correlated chain breaks monotone convergence of the
    # belief sequence; the check must flag it, not mask it (e0 is kept off
    # the p0 fixed point so the oscillation is visible from the start)
    inverted = EhChainParams(p01=0.9, p11=0.1, e0=0.1)
    report = check_property1(l_max=30, chains=[inverted])
    assert not report.passed
    assert report.max_violation > 1e-3


def test_theorem_checks_small():
    r2 = check_theorem2(min_instances=18)
    assert r2.samples >= 18
    assert r2.max_violation <= 1e-9
    r3 = check_theorem3(min_instances=18)
    assert r3.samples >= 18
    assert r3.max_violation <= 1e-9


def test_lemma3_condition_identity_grid():
    report = check_lemma3_condition_identity()
    assert report.passed
    assert report.samples == 5000


def test_run_checks_scopes():
    reports = run_checks("property1")
    assert [r.lemma for r in reports] == ["property1"]
    reports = run_checks("lemmas", samples=30)
    assert {r.lemma for r in reports} == {
        "lemma2", "lemma3", "lemma4", "lemma3-condition"
    }
    assert all(r.passed for r in reports)
    with pytest.raises(ValueError):
        run_checks("everything")

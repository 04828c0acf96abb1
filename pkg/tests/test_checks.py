"""Invariant suites: structure, determinism, full small-sample passes."""

from __future__ import annotations

import pytest

from cat0flow import checks


def test_suite_names_cover_all_modules():
    assert set(checks.SUITES) == {
        "cat0",
        "contraction",
        "gradient",
        "hoelder",
        "footpoint",
        "barycenter",
    }


def test_unknown_suite_is_an_error():
    with pytest.raises(KeyError):
        checks.run_suites(["cat0", "nonsense"], seed=0)


def test_all_suites_pass_at_small_samples():
    samples = {name: 25 for name in checks.SUITES}
    results = checks.run_suites("all", seed=3, samples=samples)
    assert results
    for rec in results:
        assert rec["pass"], rec
        assert set(rec) == {"invariant", "samples", "worst_slack", "pass"}


def test_run_suites_is_deterministic():
    samples = {"cat0": 40}
    r1 = checks.run_suites(["cat0"], seed=11, samples=samples)
    r2 = checks.run_suites(["cat0"], seed=11, samples=samples)
    assert r1 == r2
    r3 = checks.run_suites(["cat0"], seed=12, samples=samples)
    assert r3 != r1


def test_jobs_do_not_change_results():
    samples = {name: 20 for name in checks.SUITES}
    seq = checks.run_suites("all", seed=5, samples=samples, jobs=1)
    par = checks.run_suites("all", seed=5, samples=samples, jobs=4)
    assert seq == par


def test_catalog_shapes():
    spaces = checks.catalog_spaces()
    assert [name for name, _ in spaces] == ["euclidean2", "quadrant", "tripod", "product"]
    fs = checks.catalog_functionals()
    assert len(fs) == 7
    for label, f, (t_lo, t_hi) in fs:
        assert t_lo < t_hi
        assert f.space is not None

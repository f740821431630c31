import json

import pytest

from isocr.suites import SUITES, SuiteConfig, run_suite, run_suites, trial_seed


@pytest.mark.parametrize("name", SUITES)
def test_suite_passes(name):
    res = run_suite(name, SuiteConfig(trials=60, seed=1))
    assert res.passed, res.to_dict()
    assert res.trials == 60
    assert res.min_slack >= -1e-9


@pytest.mark.parametrize("name", [s for s in SUITES if s != "trace-identity"])
def test_equality_cases_tight(name):
    res = run_suite(name, SuiteConfig(trials=1))
    assert res.equality_max_abs_slack is not None
    assert res.equality_max_abs_slack <= 1e-10


def test_hypercontractivity_grid_covers_both_kinds():
    res = run_suite("hypercontractivity", SuiteConfig(trials=108))
    assert res.passed
    assert res.worst.params["kind"] in ("psd", "hermitian")


def test_tamper_surfaces_witness():
    res = run_suite("hypercontractivity", SuiteConfig(trials=54, tamper=0.4))
    assert not res.passed
    assert res.failure_count > 0
    d = res.to_dict()
    assert "witness" in d["failures"][0]
    assert d["failures"][0]["slack"] < -1e-9


def test_seed_changes_draws_but_not_verdict():
    a = run_suite("holder", SuiteConfig(trials=30, seed=1))
    b = run_suite("holder", SuiteConfig(trials=30, seed=2))
    assert a.min_slack != b.min_slack
    assert a.passed and b.passed


def test_reports_deterministic():
    cfg = SuiteConfig(trials=20, seed=5)
    a = json.dumps([r.to_dict() for r in run_suites(["all"], cfg)], sort_keys=True)
    b = json.dumps([r.to_dict() for r in run_suites(["all"], cfg)], sort_keys=True)
    assert a == b


def test_all_expands():
    assert [r.name for r in run_suites("all", SuiteConfig(trials=2))] == list(SUITES)


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")


def test_trial_seed_distinct():
    seeds = {trial_seed(1, s, i) for s in SUITES for i in range(50)}
    assert len(seeds) == 50 * len(SUITES)

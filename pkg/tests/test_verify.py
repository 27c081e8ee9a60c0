import pytest

from mdlvq import verify
from mdlvq.errors import InputError
from mdlvq.labeling import EdgeStructure
from mdlvq.verify import check_system, deviation_trend, run_d4_clean_suite, run_deviation_suite, run_suite


def test_worked_system_passes(worked_system):
    res = check_system(worked_system, gamma=(9, 5))
    assert len(res) >= 8
    assert all(r.passed for r in res), [r.line() for r in res if not r.passed]


def test_broken_neighbor_lists_are_caught(worked_system, monkeypatch):
    orig = EdgeStructure.neighbors
    monkeypatch.setattr(EdgeStructure, "neighbors", lambda self, side, p: orig(self, side, p)[:-1])
    res = {r.name.split(": ", 1)[1]: r for r in check_system(worked_system)}
    bad = res["neighbor lists have N_i distinct cosets"]
    assert not bad.passed and bad.counterexample is not None


def test_d4_clean_expectation_failure_is_reported():
    rep = run_d4_clean_suite(3, expect_clean=True)
    assert not rep.passed
    assert rep.results[0].counterexample
    assert any("FAIL" in line for line in rep.lines())
    assert run_d4_clean_suite(3).passed and run_d4_clean_suite(5).passed
    with pytest.raises(InputError):
        run_d4_clean_suite(0)


def test_deviation_trend_line_family():
    pts = deviation_trend()
    r = [float(p.ratio) for p in pts]
    assert r == pytest.approx([0.384, 0.1289, 0.0387, 0.00045], abs=5e-4)
    assert all(p.J_s2 <= p.J_s2_bound for p in pts)


def test_deviation_suite():
    assert run_deviation_suite().passed
    assert not run_deviation_suite(threshold=1e-4).passed


def test_small_property_suite():
    rep = run_suite("properties", max_ns=30)
    assert rep.passed and len(rep.results) > 50
    with pytest.raises(InputError):
        run_suite("nope")

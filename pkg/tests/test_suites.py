import json
from dataclasses import replace

import pytest

from tplogic.enumerate import EnumeratorSpec
from tplogic.suites import DEFAULT_SPECS, MAX_RECORDED, SUITE_NAMES, SuiteReport, UnknownSuite, run_suite
from tplogic.syntax import parse_assertion as P

QUICK = ("oracle-agreement", "weakening", "minimisation", "framing", "vc-exhale", "vc-inhale", "vc-remark", "translation")


def small(name, n=3):
    s = DEFAULT_SPECS[name]
    return replace(s, max_depth=1, atoms=s.atoms[:n])


def stable(rep: SuiteReport) -> dict:
    d = rep.to_json()
    d.pop("duration_seconds")
    return d


def test_names():
    assert len(SUITE_NAMES) == 13
    assert set(SUITE_NAMES) == set(DEFAULT_SPECS)


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_suite("no-such-suite")


@pytest.mark.parametrize("name", QUICK)
def test_small_runs_clean(name):
    rep = run_suite(name, small(name))
    assert rep.ok, rep.lines()
    assert rep.instances > 0 and rep.failure_count == 0
    assert rep.lines()[0] == f"suite {name} on universe U0: PASS"


def test_reproducible_and_independent():
    spec = small("minimisation")
    alone = stable(run_suite("minimisation", spec))
    run_suite("weakening", small("weakening"))
    run_suite("framing", small("framing"))
    assert stable(run_suite("minimisation", spec)) == alone


def test_json_round_trip():
    rep = run_suite("vc-remark")
    d = json.loads(json.dumps(rep.to_json()))
    assert d["suite"] == "vc-remark" and d["ok"] is True
    assert d["failures"] == [] and d["failure_count"] == 0
    assert set(d) == {
        "suite", "universe", "ok", "instances", "states", "failure_count", "failures",
        "duration_seconds", "paranoid", "minimality_checks", "minimality_disagreements", "notes",
    }
    assert "order-sensitivity witness confirmed at every zero-mask state" in d["notes"]


def test_paranoid_counts_checks():
    plain = run_suite("minimisation", small("minimisation"))
    rep = run_suite("minimisation", small("minimisation"), paranoid=True)
    assert plain.minimality_checks == 0
    assert rep.minimality_checks > 0 and rep.minimality_disagreements == 0
    assert "  minimality disagreements: 0" in rep.lines()
    assert stable(plain)["failures"] == stable(rep)["failures"]


def test_failures_are_reported_with_witness():
    spec = EnumeratorSpec(max_depth=1, subsyntax="tpl", atoms=("x.f == 5", "acc(x.f, 1/2)"))
    rep = run_suite("framing", spec)
    # an unframed read is neither self-framing nor intuitionistic
    assert not rep.ok and rep.failure_count == 2
    assert {f.assertions for f in rep.failures} == {("x.f == 5",)}
    assert all("heap:" in f.witness and "mask:  ;" in f.witness for f in rep.failures)
    assert sorted(f.detail.split()[-1] for f in rep.failures) == ["intuitionistic", "self-framing"]
    assert rep.lines()[0].endswith("FAIL")


def test_failure_cap():
    rep = SuiteReport("t", "U0")
    for i in range(MAX_RECORDED + 5):
        rep.fail([P("x == y")], str(i))
    assert rep.failure_count == MAX_RECORDED + 5
    assert len(rep.failures) == MAX_RECORDED
    assert len(rep.to_json()["failures"]) == MAX_RECORDED


def test_failures_sorted_in_output():
    a, b = SuiteReport("t", "U0"), SuiteReport("t", "U0")
    a.fail([P("x == y")], "w2")
    a.fail([P("acc(x.f, 1)")], "w1")
    b.fail([P("acc(x.f, 1)")], "w1")
    b.fail([P("x == y")], "w2")
    assert a.to_json() == b.to_json() and a.lines() == b.lines()

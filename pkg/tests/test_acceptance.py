"""Criteria 1 to 11 on U0 at the default scale.

Every suite runs once with the paranoid minimality cross-check switched on.
Verdicts in paranoid mode still come from the single-location check, so the
same reports serve the per-suite criteria and the cross-validation one.
"""

import pytest

from tplogic.properties import is_syntactically_self_framing
from tplogic.state import default_universe
from tplogic.suites import SUITE_NAMES, run_suite
from tplogic.syntax import parse_assertion

pytestmark = pytest.mark.slow

MIN = 60.0
_REPORTS = {}


def report(name):
    if name not in _REPORTS:
        _REPORTS[name] = run_suite(name, paranoid=True)
    return _REPORTS[name]


def clean(*names):
    return [f"{n}: {report(n).failure_count} failures" for n in names if report(n).failure_count]


def crit_1():
    r = report("oracle-agreement")
    return clean("oracle-agreement") + ([] if r.duration < 5 * MIN else [f"took {r.duration:.0f}s"])


def crit_2():
    errs = clean("weakening", "minimisation")
    return errs + [f"{n} took {report(n).duration:.0f}s" for n in ("weakening", "minimisation") if report(n).duration >= 5 * MIN]


def crit_3():
    return clean("boolean-conditional")


def crit_4():
    return clean("simplified-conditionals")


def crit_5():
    errs = clean("sl-laws")
    if not any(n.startswith("counterexample pair inequivalent as expected; witness heap:") for n in report("sl-laws").notes):
        errs.append("counterexample witness not reported")
    return errs


FRAMING = (
    ("acc(x.f, 1/2) * x.f == 5", True),
    ("x.f == 5 * acc(x.f, 1/2)", False),
    ("acc(x.f, 1) * x == y * y.f == 5", True),
)


def crit_6():
    errs = clean("framing")
    notes = report("framing").notes
    u = default_universe()
    for text, expected in FRAMING:
        if f"{text}: syntactically self-framing = {expected}" not in notes:
            errs.append(f"suite verdict for {text} missing or wrong")
        if is_syntactically_self_framing(parse_assertion(text), u).verdict != expected:
            errs.append(f"direct verdict for {text} wrong")
    return errs


def crit_7():
    errs = clean("vc-exhale", "vc-inhale")
    total = report("vc-exhale").duration + report("vc-inhale").duration
    return errs + ([] if total < 10 * MIN else [f"took {total:.0f}s combined"])


def crit_8():
    r = report("vc-remark")
    errs = clean("vc-remark")
    if "order-sensitivity witness confirmed at every zero-mask state" not in r.notes:
        errs.append("zero-mask witness not confirmed")
    return errs


def crit_9():
    return clean("translation")


def crit_10():
    r = report("end-to-end")
    return clean("end-to-end") + ([] if r.duration < 10 * MIN else [f"took {r.duration:.0f}s"])


def crit_11():
    reps = [report(n) for n in SUITE_NAMES]
    errs = [f"{r.name}: {r.minimality_disagreements} disagreements" for r in reps if r.minimality_disagreements]
    if not all(r.paranoid for r in reps):
        errs.append("not every suite ran in paranoid mode")
    if sum(r.minimality_checks for r in reps) == 0:
        errs.append("no minimality checks were exercised")
    return errs


CRITERIA = [
    (1, "oracle agreement", crit_1),
    (2, "weakening and minimisation", crit_2),
    (3, "pure-conditional law", crit_3),
    (4, "simplified conditionals", crit_4),
    (5, "separation logic laws and counterexample pair", crit_5),
    (6, "framing verdicts", crit_6),
    (7, "verification condition equivalence", crit_7),
    (8, "inhale order witness", crit_8),
    (9, "translation", crit_9),
    (10, "end-to-end", crit_10),
    (11, "paranoid cross-validation", crit_11),
]


@pytest.mark.parametrize("num, title, check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(num, title, check, capsys):
    errs = check()
    with capsys.disabled():
        print(f"\ncriterion {num:2d} ({title}): {'PASS' if not errs else 'FAIL ' + '; '.join(errs)}")
    assert not errs

import pytest

from conftest import HALF
from tplogic.enumerate import EnumeratorSpec, enumerate_assertions
from tplogic.state import default_universe
from tplogic.syntax import (
    Acc,
    Wand,
    free_vars,
    is_chalice,
    is_restricted_sl,
    is_sl,
    parse_assertion as P,
    render,
    subformulas,
)

U0 = default_universe()


def _has(items, cls):
    return any(isinstance(s, cls) for a in items for s in subformulas(a))


def test_sl_depth_one():
    out = enumerate_assertions(EnumeratorSpec(max_depth=1, subsyntax="sl", variables=("x",)), U0)
    assert P("x == x") in out and P("x == null") in out and P("x.f |->[1] 5") in out
    assert not _has(out, Acc)
    assert all(is_sl(a) for a in out)


def test_chalice_depth_one():
    out = enumerate_assertions(EnumeratorSpec(max_depth=1, subsyntax="chalice"), U0)
    assert P("acc(x.f, 1/2)") in out
    assert not _has(out, Wand)
    two = enumerate_assertions(EnumeratorSpec(max_depth=2, subsyntax="chalice"), U0)
    assert not _has(two, Wand) and all(is_chalice(a) for a in two)


@pytest.mark.parametrize(
    "sub, depth, count",
    [("sl", 1, 27), ("sl", 2, 3672), ("chalice", 1, 36), ("chalice", 2, 2484), ("restricted_sl", 1, 32), ("restricted_sl", 2, 1540), ("tpl", 1, 56)],
)
def test_counts_are_stable(sub, depth, count):
    spec = EnumeratorSpec(max_depth=depth, subsyntax=sub)
    first = enumerate_assertions(spec, U0)
    assert len(first) == count
    assert first == enumerate_assertions(spec, U0)


@pytest.mark.parametrize("sub", ["sl", "chalice", "restricted_sl", "tpl"])
def test_duplicate_free_and_closed(sub):
    spec = EnumeratorSpec(max_depth=2, subsyntax=sub, variables=("x",), atoms=None)
    out = enumerate_assertions(spec, U0)
    assert len(set(out)) == len(out)
    assert all(free_vars(a) <= {"x"} for a in out)


def test_restricted_includes_witnessed_existentials():
    out = enumerate_assertions(EnumeratorSpec(max_depth=2, subsyntax="restricted_sl", variables=("x",), atoms=("v == 5", "x == null")), U0)
    assert P("exists v :: x.f |->[1] v * v == 5") in out
    assert all(is_restricted_sl(a) for a in out)


def test_whitelist_and_deref_depth():
    spec = EnumeratorSpec(max_depth=1, subsyntax="chalice", variables=("x",), perms=(HALF,), deref_depth=2, fields=("f",))
    out = [render(a) for a in enumerate_assertions(spec, U0)]
    assert "5 == x.f.f" in out and "x.f == x.f.f" in out
    spec = EnumeratorSpec(max_depth=2, atoms=("x == null", "acc(x.f, 1)"), connectives=("*",))
    assert len(enumerate_assertions(spec, U0)) == 2 + 4


def test_bad_spec():
    with pytest.raises(ValueError):
        EnumeratorSpec(max_depth=0)
    with pytest.raises(ValueError):
        EnumeratorSpec(subsyntax="lisp")


def test_fields_outside_universe_dropped():
    spec = EnumeratorSpec(max_depth=1, atoms=("acc(x.h, 1)", "x == y"))
    assert enumerate_assertions(spec, U0) == [P("x == y")]

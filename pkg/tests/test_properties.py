import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import HALF, O1F, O2F, SMALL, TINY, assertions
from tplogic.enumerate import EnumeratorSpec, enumerate_assertions
from tplogic.properties import (
    NotChaliceFragment,
    deframed_table,
    framed_at,
    framed_condition,
    is_intuitionistic,
    is_pure,
    is_self_framing,
    is_substitutable,
    is_supported,
    is_syntactically_self_framing,
)
from tplogic.semantics import ExtensionKind, TableEngine, enumerate_extensions, tpl_sat
from tplogic.state import EMPTY_MASK, NULL, Environment, PermMask, State, default_universe
from tplogic.syntax import AccAny, And, Var, is_chalice_bool, is_sl_with_neq, parse_assertion as P, render

U0 = default_universe()

CHALICE_SMALL = enumerate_assertions(
    EnumeratorSpec(max_depth=2, subsyntax="chalice", variables=("x",), literals=(5,), perms=(HALF,)), SMALL
)
SL_SMALL = enumerate_assertions(EnumeratorSpec(max_depth=2, subsyntax="sl", variables=("x",), literals=(5,)), SMALL)


def test_pure_examples():
    assert is_pure(P("x.f == 5"), U0)
    r = is_pure(P("acc(x.f, 1/2)"), U0)
    assert not r and tpl_sat(r.witness, P("acc(x.f, 1/2)"), U0)


def test_self_framing_witness():
    r = is_self_framing(P("x.f == 5"), U0)
    assert not r
    assert r.witness.mask == EMPTY_MASK and r.witness.heap[O1F] == 5
    assert r.interfering is not None and r.interfering[O1F] != 5
    # the smallest interfering heap in index order, which sets o1.f to null
    assert r.interfering[O1F] is NULL
    assert is_self_framing(P("acc(x.f, 1) * x.f == 5"), U0)


def test_supported_examples():
    r = is_supported(P("acc(x.f, 1) || acc(y.f, 1)"), U0)
    assert not r and r.other_mask is not None
    assert is_supported(P("true"), U0)
    assert is_supported(P("(x == y ==> acc(x.f, 1)) * (x != y ==> acc(y.f, 1))"), U0)


def test_intuitionistic_examples():
    assert is_intuitionistic(P("acc(x.f, 1/2)"), U0)
    r = is_intuitionistic(P("x.f == 5"), U0)
    assert not r
    # independent check: some globally havoced extension of the witness changes x.f
    exts = enumerate_extensions(r.witness, ExtensionKind.GlobalExts, U0)
    assert any(not tpl_sat(e, P("x.f == 5"), U0) for e in exts)


def test_substitutable_examples():
    assert is_substitutable(P("x.f == 5 ==> acc(y.g, 1)"))
    assert not is_substitutable(P("acc(x.f, 1) --* x == y"))
    for atom in ["x == y", "acc(x.f, 1)", "x.f |->[1] 5"]:
        assert is_substitutable(P(atom))


def test_syntactic_framing_examples():
    assert is_syntactically_self_framing(P("acc(x.f, 1/2) * x.f == 5"), U0)
    assert not is_syntactically_self_framing(P("x.f == 5 * acc(x.f, 1/2)"), U0)
    assert is_syntactically_self_framing(P("acc(x.f, 1) * x == y * y.f == 5"), U0)


def test_framed_condition_shape():
    assert framed_condition(P("x.f == 5")) == AccAny(Var("x"), "f")
    assert framed_condition(P("acc(x.f, 1)")) == P("true")
    assert framed_condition(P("acc(x.f, 1/2) * x.f == 5")) == P("acc(x.f, 1/2) --* acc(x.f, _)")
    assert isinstance(framed_condition(P("x.f == y.f")), And)
    with pytest.raises(NotChaliceFragment):
        framed_condition(P("x.f |->[1] 5"))


@pytest.mark.parametrize("p", CHALICE_SMALL[::5], ids=render)
def test_chalice_formulas_supported_and_booleans_pure(p):
    assert is_supported(p, SMALL)
    if is_chalice_bool(p):
        assert is_pure(p, SMALL)


@pytest.mark.parametrize("p", CHALICE_SMALL[::7], ids=render)
def test_framed_implies_deframed(p):
    eng = TableEngine(SMALL)
    f = framed_condition(p)
    for env in eng.sp.envs({"x"}):
        assert not (eng.table(f, env) & ~deframed_table(eng, eng.table(p, env))).any()


@pytest.mark.parametrize("a", SL_SMALL[::9], ids=render)
def test_sl_assertions_self_framing_and_intuitionistic(a):
    assert is_self_framing(a, SMALL)
    assert is_intuitionistic(a, SMALL)


@settings(max_examples=30, deadline=None)
@given(assertions(names=("x",), max_leaves=4), st.data())
def test_self_framing_implies_framed_at(a, data):
    if not is_self_framing(a, TINY):
        return
    from tplogic.space import Space

    sp = Space(TINY)
    s = sp.state(data.draw(st.integers(0, sp.NM - 1)), data.draw(st.integers(0, sp.NH - 1)), {"x": 2})
    assert framed_at(s, a, TINY) and framed_at(s, a, TINY, disjoint=True)


def test_framed_at_true_assertion():
    assert framed_at(State(U0.heap(), PermMask({O2F: HALF}), Environment()), P("true"), U0)

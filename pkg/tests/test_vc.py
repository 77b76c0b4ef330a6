from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import HALF, ONE, O1, O1F, O2, O2G, SMALL, assertions
from tplogic.enumerate import EnumeratorSpec, enumerate_assertions
from tplogic.properties import NotChaliceFragment, is_self_framing, is_syntactically_self_framing
from tplogic.semantics import TableEngine, tpl_sat, valid
from tplogic.state import NULL, Environment, PermMask, State, default_universe
from tplogic.syntax import ParseError, free_vars, parse_assertion as P, render
from tplogic.vc import (
    AndP,
    AssertFrm,
    AssertTPL,
    Choice,
    EnvVar,
    Exhale,
    ForallValue,
    HeapRead,
    Inhale,
    Interp,
    MaskRead,
    NotChaliceBool,
    PermAdd,
    PermConst,
    PredicateEvaluator,
    Seq,
    TRUE_P,
    Val,
    ValEq,
    ValNeq,
    WithMask,
    equiv_vc,
    eval_pred,
    parse_command,
    pred_vars,
    render_command,
    render_pred,
    translate_bool,
    wp_ch,
    wp_sl,
)

U0 = default_universe()
X = EnvVar("x")


def state(heap=None, mask=None, **env):
    return State(U0.heap(heap or {}), PermMask(mask or {}), Environment(env or {"x": O1, "y": O2}))


def test_translate_bool_examples():
    assert translate_bool(P("x.f == 5")) == ValEq(HeapRead(X, "f"), Val(5))
    assert translate_bool(P("x == y * y.f != null")) == AndP(
        ValEq(X, EnvVar("y")), ValNeq(HeapRead(EnvVar("y"), "f"), Val(NULL))
    )
    assert render_pred(translate_bool(P("x.f == 5"))) == "Heap[x, f] = 5"
    with pytest.raises(NotChaliceBool):
        translate_bool(P("acc(x.f, 1)"))


def test_translated_reflexivity_is_valid():
    p = translate_bool(P("x == x"))
    assert all(eval_pred(p, state(x=v), U0) for v in U0.values)


def test_interp_atoms():
    assert eval_pred(Interp(P("true")), state(), U0)
    for q in U0.grid():
        assert eval_pred(Interp(P("acc(x.f, 1)")), state(mask={O1F: q}), U0) == (q >= 1)


@settings(max_examples=40, deadline=None)
@given(assertions(names=("x",), max_leaves=4), st.integers(0, 80), st.integers(0, 2400), st.sampled_from([O1, O2, NULL, 5]))
def test_interp_is_tpl_sat(a, mi, hi, xv):
    from tplogic.semantics import engine_for

    sp = engine_for(U0).sp
    s = State(sp.heap_at(hi), sp.mask_at(mi), Environment(x=xv))
    assert eval_pred(Interp(a), s, U0) == tpl_sat(s, a, U0)


def test_inhale_order_states():
    bad = wp_ch(Inhale(P("x.f == 3 * acc(x.f, 1)")), Interp(P("x.f == 3")))
    good = wp_ch(Inhale(P("acc(x.f, 1) * x.f == 3")), Interp(P("x.f == 3")))
    assert not eval_pred(bad, state({O1F: 3}), U0)
    assert eval_pred(bad, state({O1F: 5}), U0)
    assert eval_pred(good, state({O1F: 3}), U0) and eval_pred(good, state({O1F: 5}), U0)


def test_inhale_order_with_permission_held_is_true():
    bad = wp_ch(Inhale(P("x.f == 3 * acc(x.f, 1)")), Interp(P("x.f == 3")))
    assert eval_pred(bad, state({O1F: 3}, {O1F: HALF}), U0)


def test_exhale_acc_trivial_post():
    w = wp_ch(Exhale(P("acc(x.f, 1/2)")), TRUE_P)
    for q in U0.grid():
        assert eval_pred(w, state(mask={O1F: q}), U0) == (q >= HALF)


def test_wp_sl_examples():
    assert wp_sl(Exhale(P("acc(x.f, 1)")), P("acc(y.g, 1)")) == P("acc(x.f, 1) * acc(y.g, 1)")
    assert wp_sl(Inhale(P("x.f |->[1] 5")), P("false")) == P("x.f |->[1] 5 --* false")
    with pytest.raises(TypeError):
        wp_sl(Seq(Inhale(P("true")), Inhale(P("true"))), P("true"))


@pytest.mark.parametrize(
    "a", ["acc(x.f, 1/2)", "x.f |->[1] 5", "acc(x.f, 1) * x.f == y", "acc(x.f, 1) || acc(y.g, 1/2)", "x == y"]
)
def test_inhale_then_assert_is_valid(a):
    a = P(a)
    assert is_self_framing(a, U0)
    assert valid(wp_sl(Inhale(a), a), U0)


@pytest.mark.parametrize(
    "p, post",
    [
        ("acc(x.f, 1/2)", "x.f == 5"),
        ("acc(x.f, 1) * x.f == 5", "acc(x.f, 1/2)"),
        ("x == y ==> acc(y.g, 1)", "acc(x.g, 1)"),
        ("x.f == 5 * acc(x.f, 1/2)", "true"),
    ],
)
def test_equiv_exhale(p, post):
    assert equiv_vc(Exhale(P(p)), P(post), U0)


@pytest.mark.parametrize(
    "p, post",
    [
        ("acc(x.f, 1/2)", "x.f == 5"),
        ("acc(x.f, 1) * x.f == 5", "x.f == 5"),
        ("x == y ==> acc(y.g, 1)", "acc(x.g, 1) --* acc(y.g, 1)"),
    ],
)
def test_equiv_inhale_syntactically_framed(p, post):
    assert is_syntactically_self_framing(P(p), U0)
    assert equiv_vc(Inhale(P(p)), P(post), U0)


def test_equiv_inhale_order_sensitive_payload_fails():
    r = equiv_vc(Inhale(P("x.f == 3 * acc(x.f, 1)")), P("x.f == 3"), U0)
    assert not r
    s = r.witness
    assert s.env["x"] in (O1, O2)
    loc = O1F if s.env["x"] == O1 else None
    assert s.mask[loc] == 0 and s.heap[loc] == 3
    assert r.detail == "wp_sl holds, wp_ch fails"


def test_fragment_errors():
    with pytest.raises(NotChaliceFragment):
        wp_ch(Inhale(P("x.f |->[1] 5")), TRUE_P)
    with pytest.raises(NotChaliceFragment):
        equiv_vc(Exhale(P("acc(x.f, 1) --* true")), P("true"), U0)


def test_fresh_names_per_call():
    c = Inhale(P("acc(x.f, 1) * acc(y.g, 1)"))
    one, two = render_pred(wp_ch(c, TRUE_P)), render_pred(wp_ch(c, TRUE_P))
    assert one == two
    assert "forall z1 ::" in one and "forall z2 ::" in one and "z3" not in one


def test_render_chalice_wp():
    text = render_pred(wp_ch(Inhale(P("acc(x.f, 1)")), Interp(P("x.f == 3"))))
    assert "Mask[x, f] = 0" in text
    assert "[Heap := upd(Heap, (x, f), z1)]" in text
    assert "[Mask := upd(Mask, (x, f), 1)]" in text


def test_assert_commands():
    s = state({O1F: 5}, {O1F: HALF})
    assert eval_pred(wp_ch(AssertTPL(P("acc(x.f, 1/2) * x.f == 5")), TRUE_P), s, U0)
    assert eval_pred(wp_ch(AssertFrm(P("x.f == 5")), TRUE_P), s, U0)
    assert not eval_pred(wp_ch(AssertFrm(P("x.f == 5")), TRUE_P), state({O1F: 5}), U0)


def test_off_range_mask_update_is_false():
    over = WithMask(X, "f", PermAdd(MaskRead(X, "f"), PermConst(ONE)), TRUE_P)
    assert not eval_pred(over, state(mask={O1F: HALF}), U0)
    assert eval_pred(over, state(), U0)
    assert not eval_pred(WithMask(X, "f", PermConst(ONE), TRUE_P), state(x=5), U0)


def test_pred_vars():
    w = wp_ch(Inhale(P("acc(x.f, 1) * y.g == 0")), Interp(P("z == null")))
    assert pred_vars(w) == {"x", "y", "z"}


CH = enumerate_assertions(
    EnumeratorSpec(max_depth=2, subsyntax="chalice", variables=("x", "y"), literals=(5,), perms=(HALF, ONE)), SMALL
)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(CH), st.sampled_from(["x.f == 5", "acc(y.f, 1/2)", "acc(x.f, 1) --* x.f == 5"]), st.booleans())
def test_fiber_havoc_matches_pointwise_havoc(p, post, inhale):
    eng = TableEngine(SMALL)
    w = wp_ch(Inhale(p) if inhale else Exhale(p), Interp(P(post)))
    for env in eng.sp.envs(pred_vars(w)):
        fast = PredicateEvaluator(SMALL, env, eng).table(w)
        slow = PredicateEvaluator(SMALL, env, eng, fast_havoc=False).table(w)
        assert np.array_equal(fast, slow)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(CH), st.sampled_from(["x.f == 5", "acc(y.f, 1/2) * y.f == x"]))
def test_exhale_equivalence_small(p, post):
    assert equiv_vc(Exhale(p), P(post), SMALL)


# -- command syntax ------------------------------------------------------------------------


@pytest.mark.parametrize(
    "text",
    [
        "inhale acc(x.f, 1)",
        "exhale acc(x.f, 1/2) * x.f == 5",
        "inhale acc(x.f, 1) ; exhale x.f == 5",
        "(inhale acc(x.f, 1) [] exhale acc(y.g, 1))",
        "assertTPL x.f |->[1] 5 ; assertFrm acc(x.f, 1) * x.f == 5",
    ],
)
def test_command_roundtrip(text):
    c = parse_command(text)
    assert parse_command(render_command(c)) == c


def test_command_structure():
    c = parse_command("(inhale acc(x.f, 1) [] exhale true) ; exhale x == y")
    assert isinstance(c, Seq) and isinstance(c.first, Choice)
    assert c.second == Exhale(P("x == y"))


@pytest.mark.parametrize("text", ["", "inhale", "frobnicate x == y", "inhale x == ; exhale true", "(inhale true [] inhale true [] inhale true)", "(inhale true"])
def test_command_errors(text):
    with pytest.raises(ParseError):
        parse_command(text)

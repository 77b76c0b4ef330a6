from fractions import Fraction

import pytest
from hypothesis import given

from conftest import assertions
from tplogic.syntax import (
    Acc,
    And,
    Eq,
    Exists,
    FieldRead,
    Imp,
    IntLit,
    NullLit,
    ParseError,
    PointsTo,
    Star,
    TRUE,
    Var,
    Wand,
    classify,
    free_vars,
    is_chalice,
    is_restricted_sl,
    is_sl,
    parse_assertion,
    render,
    substitute,
)

x, y, v = Var("x"), Var("y"), Var("v")


def test_parse_examples():
    assert parse_assertion("acc(x.f,1/2) * x.f == 5") == Star(
        Acc(x, "f", Fraction(1, 2)), Eq(FieldRead(x, "f"), IntLit(5))
    )
    assert parse_assertion("x == x") == Eq(x, x)
    a = parse_assertion("x.f |->[1] _")
    assert isinstance(a, Exists) and a.body == PointsTo(x, "f", Fraction(1), Var(a.var)) and a.var != "x"


@pytest.mark.parametrize(
    "text, expected",
    [
        ("x == y * y == x --* x == null", Wand(Star(Eq(x, y), Eq(y, x)), Eq(x, NullLit()))),
        ("x == y ==> y == x ==> true", Imp(Eq(x, y), Imp(Eq(y, x), TRUE))),
        ("x == y --* y == x --* true", Wand(Eq(x, y), Wand(Eq(y, x), TRUE))),
        ("x == y && y == x * true", And(Eq(x, y), Star(Eq(y, x), TRUE))),
    ],
)
def test_precedence(text, expected):
    assert parse_assertion(text) == expected


@pytest.mark.parametrize("text", ["acc(x.f,", "x ==", "x.f |->[2] 5", "acc(x.f, 0)", "x == y )", "exists :: x == y", "x.f |-> 5"])
def test_parse_errors_have_positions(text):
    with pytest.raises(ParseError) as exc:
        parse_assertion(text)
    assert 0 <= exc.value.pos <= len(text)


@given(assertions(max_leaves=8))
def test_render_roundtrip(a):
    assert parse_assertion(render(a)) == a


def test_classification():
    pt = parse_assertion("x.f |->[1] 5")
    assert is_sl(pt) and not is_chalice(pt) and is_restricted_sl(pt)
    ch = parse_assertion("acc(x.f,1) * x.f == 5")
    assert is_chalice(ch) and not is_sl(ch)
    assert not is_chalice(parse_assertion("(acc(x.f,1) * x.f == 5) ==> acc(y.g,1)"))
    c = classify(ch)
    assert c.is_chalice and not c.is_sl and not c.is_chalice_bool


def test_substitution():
    xf = FieldRead(x, "f")
    assert substitute(Eq(x, v), "v", xf) == Eq(x, xf)
    bound = parse_assertion("exists v :: v == y")
    assert substitute(bound, "v", xf) == bound
    assert substitute(parse_assertion("acc(x.f,1) ==> v == 5"), "v", xf) == parse_assertion("acc(x.f,1) ==> x.f == 5")


def test_substitution_avoids_capture():
    a = substitute(parse_assertion("exists x :: x == y"), "y", x)
    assert isinstance(a, Exists) and a.var != "x" and a.body == Eq(Var(a.var), x)


def test_free_vars():
    assert free_vars(parse_assertion("exists v :: x.f |->[1] v")) == {"x"}
    assert free_vars(parse_assertion("x == y")) == {"x", "y"}
    assert free_vars(TRUE) == frozenset()


@given(assertions(max_leaves=6))
def test_substitute_removes_variable(a):
    b = substitute(a, "x", NullLit())
    assert "x" not in free_vars(b)
    assert free_vars(b) <= free_vars(a)


def test_fields_used_reaches_expressions():
    from tplogic.syntax import fields_used

    P = parse_assertion
    assert fields_used(P("x.f.g == 5 * acc(y.h, 1) --* z.f |->[1] w.k")) == {"f", "g", "h", "k"}
    assert fields_used(P("exists v :: v == x")) == frozenset()

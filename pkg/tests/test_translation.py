import pytest

from conftest import SMALL
from tplogic.enumerate import EnumeratorSpec, enumerate_assertions
from tplogic.properties import is_syntactically_self_framing
from tplogic.semantics import equivalent, tpl_sat_direct
from tplogic.state import default_universe
from tplogic.syntax import is_chalice, parse_assertion as P, render
from tplogic.translation import NotRestrictedSL, NotSupported, chalice_to_sl, check_translation, sl_to_chalice

U0 = default_universe()


@pytest.mark.parametrize(
    "source, target",
    [
        ("x.f |->[1] 5", "acc(x.f, 1) * x.f == 5"),
        ("x == y", "x == y"),
        ("exists v :: x.f |->[1] v * (v == 5 ==> y.g |->[1] 0)", "acc(x.f, 1) * (x.f == 5 ==> acc(y.g, 1) * y.g == 0)"),
        ("x.f |->[1/2] _", "acc(x.f, 1/2)"),
        ("x != null ==> x.f |->[1] y", "x != null ==> acc(x.f, 1) * x.f == y"),
    ],
)
def test_translation_examples(source, target):
    out = sl_to_chalice(P(source)).target
    assert out == P(target)
    assert is_chalice(out)


@pytest.mark.parametrize(
    "source",
    ["x.f |->[1/2] 5", "y == x ==> x.g |->[1] 0", "exists v :: x.f |->[1] v * (v == 5 ==> y.g |->[1] 0)"],
)
def test_translation_equivalent_on_u0(source):
    assert check_translation(P(source), U0)


def test_existential_translation_against_direct_semantics():
    from tplogic.space import Space

    a = P("exists v :: x.f |->[1] v * (v == 5 ==> x.f |->[1/2] _)")
    b = sl_to_chalice(a).target
    sp = Space(SMALL)
    for env in sp.envs({"x"}):
        for mi in range(sp.NM):
            for hi in range(sp.NH):
                s = sp.state(mi, hi, env)
                assert tpl_sat_direct(s, a, SMALL) == tpl_sat_direct(s, b, SMALL)


@pytest.mark.parametrize("a", ["acc(x.f, 1)", "x.f |->[1] 5 --* true", "x.f |->[1] 5 || x == y", "exists v :: v == x"])
def test_rejects_outside_restricted(a):
    with pytest.raises(NotRestrictedSL):
        sl_to_chalice(P(a))


def test_reverse_not_supported():
    with pytest.raises(NotSupported):
        chalice_to_sl(P("acc(x.f, 1)"))


RESTRICTED = enumerate_assertions(EnumeratorSpec(max_depth=2, subsyntax="restricted_sl", variables=("x",)), SMALL)


@pytest.mark.parametrize("a", RESTRICTED[::11], ids=render)
def test_enumerated_translations(a):
    b = sl_to_chalice(a).target
    assert equivalent(a, b, SMALL)
    assert is_syntactically_self_framing(b, SMALL)

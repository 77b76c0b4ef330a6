from fractions import Fraction

import pytest
from hypothesis import given

from conftest import HALF, ONE, O1, O1F, O1G, O2F, O2G, heaps, masks
from tplogic.state import (
    EMPTY_MASK,
    EMPTY_PARTIAL,
    NULL,
    Incompatible,
    NotSubmask,
    PartialHeap,
    PermMask,
    StateParseError,
    UniverseError,
    ValueClash,
    cond_merge,
    default_universe,
    heaps_agree,
    mask_combine,
    mask_compatible,
    mask_glb,
    mask_lub,
    mask_subtract,
    parse_state,
    parse_universe,
    partial_combine,
    rds,
    render_state,
    restrict,
)

U0 = default_universe()


def test_default_universe_shape():
    assert U0.objects == ("o1", "o2")
    assert U0.fields == ("f", "g")
    assert len(U0.values) == 7 and U0.denom == 2
    assert U0.locations == (O1F, O1G, O2F, O2G)


def test_universe_roundtrip():
    assert parse_universe(U0.render()) == U0


@pytest.mark.parametrize(
    "text",
    [
        "objects = o1\nfields = f\nvalues = 0\ndenominator = 2",  # no null
        "objects = o1\nfields = f\nvalues = null\ndenominator = 0",
        "objects = o1\nfields = f\nvalues = null\n",
        "objects = o1\nfields = f\nvalues = null banana\ndenominator = 1",
        "objects = o1 o1\nfields = f\nvalues = null\ndenominator = 1",
    ],
)
def test_malformed_universe(text):
    with pytest.raises(UniverseError):
        parse_universe(text)


def test_mask_combine_examples():
    assert mask_combine(PermMask({O1F: HALF}), PermMask({O1F: HALF})) == PermMask({O1F: ONE})
    with pytest.raises(Incompatible) as exc:
        mask_combine(PermMask({O1F: ONE}), PermMask({O1F: HALF}))
    assert exc.value.location == O1F


def test_mask_subtract_examples():
    assert mask_subtract(PermMask({O1F: ONE}), PermMask({O1F: HALF})) == PermMask({O1F: HALF})
    with pytest.raises(NotSubmask):
        mask_subtract(PermMask({O1F: HALF}), PermMask({O1F: ONE}))


def test_glb_lub_rds_examples():
    assert mask_glb(PermMask({O1F: HALF}), PermMask({O1F: ONE})) == PermMask({O1F: HALF})
    assert mask_lub(PermMask({O1F: HALF}), PermMask({O2G: ONE})) == PermMask({O1F: HALF, O2G: ONE})
    assert rds(EMPTY_MASK) == frozenset()
    assert rds(PermMask({O1F: HALF, O2F: ONE})) == {O1F, O2F}


@given(masks(U0))
def test_mask_identities(p):
    assert mask_combine(p, EMPTY_MASK) == p
    assert mask_subtract(p, EMPTY_MASK) == p
    assert mask_glb(p, p) == p == mask_lub(p, p)


@given(masks(U0), masks(U0))
def test_mask_combine_laws(p1, p2):
    if mask_compatible(p1, p2):
        c = mask_combine(p1, p2)
        assert c == mask_combine(p2, p1)
        assert rds(c) == rds(p1) | rds(p2)
        assert mask_subtract(c, p2) == p1
    else:
        with pytest.raises(Incompatible):
            mask_combine(p1, p2)
    g, l = mask_glb(p1, p2), mask_lub(p1, p2)
    assert g.leq(p1) and g.leq(p2) and p1.leq(l) and p2.leq(l)


@given(heaps(U0), masks(U0))
def test_restrict_positive(h, p):
    ph = restrict(h, p)
    assert set(ph) == rds(p)
    assert all(q > 0 for _, q in ph.values())


def test_restrict_examples():
    h = U0.heap({O1F: 5})
    assert restrict(h, EMPTY_MASK) == EMPTY_PARTIAL
    assert restrict(h, PermMask({O1F: HALF})) == PartialHeap({O1F: (5, HALF)})


@given(heaps(U0), heaps(U0))
def test_heaps_agree_and_merge(h1, h2):
    assert heaps_agree(h1, h1, U0.locations)
    assert heaps_agree(h1, h2, [])
    assert cond_merge([], h1, h2) == h2
    assert cond_merge(U0.locations, h1, h2) == h1
    m = cond_merge([O1F, O2G], h1, h2)
    assert m[O1F] == h1[O1F] and m[O2G] == h1[O2G] and m[O1G] == h2[O1G] and m[O2F] == h2[O2F]


def test_heaps_disagree():
    assert not heaps_agree(U0.heap({O1F: 5}), U0.heap({O1F: 0}), [O1F])


def test_partial_combine():
    a = PartialHeap({O1F: (5, HALF)})
    assert partial_combine(a, a) == PartialHeap({O1F: (5, ONE)})
    assert partial_combine(a, EMPTY_PARTIAL) == a
    with pytest.raises(ValueClash):
        partial_combine(a, PartialHeap({O1F: (0, HALF)}))


def test_parse_state_defaults_and_render():
    s = parse_state("heap: o1.f=5 o2.g=o1 ; mask: o1.f=1/2 ; env: x=o1 y=null", U0)
    assert s.heap[O1F] == 5 and s.heap[O2G] == O1 and s.heap[O1G] is NULL
    assert s.mask[O1F] == HALF and s.mask[O2F] == 0
    assert s.env["y"] is NULL
    assert parse_state(render_state(s, U0), U0) == s


@pytest.mark.parametrize(
    "text",
    ["heap: o3.f=5 ; mask: ; env:", "heap: o1.f=7 ; mask: ; env:", "heap: o1.f", "heap: ; mask: o1.f=x ; env:"],
)
def test_parse_state_errors(text):
    with pytest.raises((StateParseError, UniverseError)):
        parse_state(text, U0)


def test_perm_out_of_range():
    with pytest.raises(ValueError):
        PermMask({O1F: Fraction(3, 2)})


def test_off_grid_state_rejected_on_evaluation():
    from tplogic.semantics import tpl_sat
    from tplogic.syntax import TRUE

    s = parse_state("heap: ; mask: o1.f=1/3 ; env:", U0)
    assert s.mask[O1F] == Fraction(1, 3)
    with pytest.raises(UniverseError):
        tpl_sat(s, TRUE, U0)

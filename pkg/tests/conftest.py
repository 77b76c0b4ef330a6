from fractions import Fraction

import pytest
from hypothesis import strategies as st

from tplogic.state import NULL, Location, Obj, PermMask, Universe, default_universe

HALF, ONE = Fraction(1, 2), Fraction(1)
O1, O2 = Obj("o1"), Obj("o2")
O1F, O1G, O2F, O2G = Location("o1", "f"), Location("o1", "g"), Location("o2", "f"), Location("o2", "g")

# one object, one field, two plain values: small enough for the direct (reference) semantics
TINY = Universe.make(("o1",), ("f",), (NULL, 5), 2)
SMALL = Universe.make(("o1", "o2"), ("f",), (NULL, 5), 2)


@pytest.fixture
def u0():
    return default_universe()


def masks(u: Universe):
    levels = st.sampled_from(u.grid())
    return st.fixed_dictionaries({loc: levels for loc in u.locations}).map(PermMask)


def heaps(u: Universe):
    vals = st.sampled_from(u.values)
    return st.fixed_dictionaries({loc: vals for loc in u.locations}).map(u.heap)


# -- assertion strategies ----------------------------------------------------------

from tplogic.syntax import (  # noqa: E402
    Acc,
    AccAny,
    And,
    Eq,
    Exists,
    FieldRead,
    Imp,
    IntLit,
    Neq,
    NullLit,
    Or,
    PointsTo,
    Star,
    TRUE,
    FALSE,
    Var,
    Wand,
)

PERMS = st.sampled_from([HALF, ONE])


def exprs(names, fields=("f",), heap=True):
    base = st.one_of(st.sampled_from([Var(n) for n in names]), st.just(NullLit()), st.sampled_from([IntLit(5), IntLit(0)]))
    if not heap:
        return base
    reads = st.builds(FieldRead, st.sampled_from([Var(n) for n in names]), st.sampled_from(fields))
    return st.one_of(base, reads)


def atoms(names, fields=("f",), sl=False):
    objs = st.sampled_from([Var(n) for n in names])
    f = st.sampled_from(fields)
    e = exprs(names, fields, heap=not sl)
    parts = [st.builds(Eq, e, e), st.builds(PointsTo, objs, f, PERMS, exprs(names, fields, heap=False))]
    if not sl:
        parts += [st.builds(Neq, e, e), st.builds(Acc, e, f, PERMS), st.builds(AccAny, objs, f), st.sampled_from([TRUE, FALSE])]
    return st.one_of(*parts)


def assertions(names=("x", "y"), fields=("f",), sl=False, max_leaves=6, binders=True):
    ops = [Star, And, Or, Imp, Wand]

    def extend(children):
        parts = [st.builds(op, children, children) for op in ops]
        if binders:
            parts.append(st.builds(Exists, st.sampled_from(names), children))
        return st.one_of(*parts)

    return st.recursive(atoms(names, fields, sl), extend, max_leaves=max_leaves)

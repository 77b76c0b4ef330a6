"""Semantic and syntactic classifiers of assertions over a finite universe.

Every semantic check runs over the packed truth tables of the table engine:
the universally quantified condition is turned into a table of "bad" bits and
the smallest bad state (environment, heap, mask order) becomes the witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, Optional

import numpy as np

from .semantics import engine_for, first_true
from .semantics.tables import TableEngine
from .state import PermMask, State, TotalHeap, Universe
from .syntax import (
    Acc,
    AccAny,
    And,
    Assertion,
    Eq,
    Exists,
    Expr,
    FieldRead,
    Imp,
    IntLit,
    Neq,
    NullLit,
    Or,
    Star,
    TRUE,
    TrueLit,
    Var,
    Wand,
    free_vars,
    has_perm_atom,
    is_chalice,
    is_chalice_bool,
)


class NotChaliceFragment(ValueError):
    """Raised when an operation defined on the Chalice subsyntax gets something else."""


@dataclass(frozen=True)
class PropertyReport:
    name: str
    verdict: bool
    witness: Optional[State] = None
    interfering: Optional[TotalHeap] = None
    other_mask: Optional[PermMask] = None
    detail: str = ""

    def __bool__(self):
        return self.verdict


def _envs(eng: TableEngine, a: Assertion) -> Iterator[Dict[str, int]]:
    return eng.sp.envs(free_vars(a))


def _first_bad(eng: TableEngine, bad: np.ndarray):
    if not bad.any():
        return None
    return first_true(eng.unpack(bad))


def _cylinder(eng: TableEngine, hi: int, free_bits: int) -> Iterator[int]:
    """Heap indices that agree with heap hi outside the locations in `free_bits`, ascending."""
    sp = eng.sp
    free = [l for l in range(sp.n) if free_bits >> l & 1]
    base = sp.heap_vals[hi].astype(np.int64).copy()
    out = []
    for combo in itertools.product(range(sp.V), repeat=len(free)):
        row = base.copy()
        row[free] = combo
        out.append(int(row @ sp.wH))
    return iter(sorted(out))


def _unread_bits(eng: TableEngine, mi: int) -> int:
    return eng.sp.all_bits() & ~int(eng.sp.mask_rd[mi])


# -- pure ------------------------------------------------------------------------


def is_pure(a: Assertion, u: Universe) -> PropertyReport:
    """Truth does not depend on permissions: every model stays a model under the empty mask."""
    eng = engine_for(u)
    for env in _envs(eng, a):
        t = eng.table(a, env)
        hit = _first_bad(eng, t & ~t[0][None, :])
        if hit:
            return PropertyReport("pure", False, eng.sp.state(*hit, env))
    return PropertyReport("pure", True)


# -- self-framing ------------------------------------------------------------------


def self_framing_bad(eng: TableEngine, t: np.ndarray) -> np.ndarray:
    """Bit (m, h) set iff (h, m) satisfies the table but some interfering heap does not."""
    return t & eng.project(~t & eng.valid, eng.sp.unread_groups)


def is_self_framing(a: Assertion, u: Universe) -> PropertyReport:
    """Models are closed under changes to locations without permission."""
    eng = engine_for(u)
    for env in _envs(eng, a):
        t = eng.table(a, env)
        hit = _first_bad(eng, self_framing_bad(eng, t))
        if hit:
            mi, hi = hit
            other = next(h for h in _cylinder(eng, hi, _unread_bits(eng, mi)) if not eng.bit(t, mi, h))
            return PropertyReport(
                "self-framing", False, eng.sp.state(mi, hi, env), interfering=eng.sp.heap_at(other)
            )
    return PropertyReport("self-framing", True)


# -- supported -------------------------------------------------------------------------


def is_supported(a: Assertion, u: Universe) -> PropertyReport:
    """Two satisfying masks over one heap always have a satisfying greatest lower bound."""
    eng = engine_for(u)
    glb = eng.sp.glb_index
    for env in _envs(eng, a):
        t = eng.table(a, env)
        for m1 in range(eng.sp.NM):
            if not t[m1].any():
                continue
            bad = t[m1][None, :] & t & ~t[glb[m1]]
            hit = _first_bad(eng, bad)
            if hit:
                m2, hi = hit
                return PropertyReport(
                    "supported",
                    False,
                    eng.sp.state(m1, hi, env),
                    other_mask=eng.sp.mask_at(m2),
                    detail="both masks satisfy, their glb does not",
                )
    return PropertyReport("supported", True)


# -- intuitionistic ----------------------------------------------------------------------


def intuitionistic_bad(eng: TableEngine, t: np.ndarray) -> np.ndarray:
    """Bit (m, h): (h, m) is a model with some globally havoced extension that is not."""
    pr = eng.sp.pairs
    rows = t[pr.p1] & eng.project(~t[pr.ps] & eng.valid, pr.groups("unread1"))
    return np.bitwise_or.reduceat(rows, pr.p1_starts, axis=0)


def is_intuitionistic(a: Assertion, u: Universe) -> PropertyReport:
    """Models are closed under globally havoced extensions."""
    eng = engine_for(u)
    for env in _envs(eng, a):
        hit = _first_bad(eng, intuitionistic_bad(eng, eng.table(a, env)))
        if hit:
            return PropertyReport("intuitionistic", False, eng.sp.state(*hit, env))
    return PropertyReport("intuitionistic", True)


# -- substitutable --------------------------------------------------------------------------


def is_substitutable(a: Assertion) -> bool:
    """Pure (permission-free) formulas only on the left of wands and implications."""
    if isinstance(a, (Wand, Imp)):
        return not has_perm_atom(a.left) and is_substitutable(a.left) and is_substitutable(a.right)
    if isinstance(a, (Star, And, Or)):
        return is_substitutable(a.left) and is_substitutable(a.right)
    if isinstance(a, Exists):
        return is_substitutable(a.body)
    return True


# -- syntactic self-framing -------------------------------------------------------------------


def _and(a: Assertion, b: Assertion) -> Assertion:
    if isinstance(a, TrueLit):
        return b
    if isinstance(b, TrueLit):
        return a
    return And(a, b)


def _guard(op, lhs: Assertion, rhs: Assertion) -> Assertion:
    return TRUE if isinstance(rhs, TrueLit) else op(lhs, rhs)


def framed_expr(e: Expr) -> Assertion:
    if isinstance(e, FieldRead):
        return _and(framed_expr(e.obj), AccAny(e.obj, e.field))
    return TRUE


def framed_condition(a: Assertion) -> Assertion:
    """framed(a), simplified only by the identities True && X = X and X ==> True = True."""
    if not is_chalice(a):
        raise NotChaliceFragment("framed(.) is defined on the Chalice subsyntax only")
    return _framed(a)


def _framed(a: Assertion) -> Assertion:
    if isinstance(a, (Eq, Neq)):
        return _and(framed_expr(a.left), framed_expr(a.right))
    if isinstance(a, Acc):
        return framed_expr(a.obj)
    if isinstance(a, Star) and is_chalice_bool(a):
        return _and(_framed(a.left), _guard(Imp, a.left, _framed(a.right)))
    if isinstance(a, Star):
        return _and(_framed(a.left), _guard(Wand, a.left, _framed(a.right)))
    if isinstance(a, Imp):
        return _and(_framed(a.left), _guard(Imp, a.left, _framed(a.right)))
    raise NotChaliceFragment(f"unexpected {type(a).__name__} in Chalice assertion")


def is_syntactically_self_framing(a: Assertion, u: Universe) -> PropertyReport:
    from .semantics import valid

    v = valid(framed_condition(a), u)
    return PropertyReport("syntactically self-framing", v.holds, v.witness)


# -- extension framing -------------------------------------------------------------------------


def eframed_table(eng: TableEngine, t: np.ndarray) -> np.ndarray:
    """Packed set of states where the table is stable in all globally havoced extensions."""
    pr = eng.sp.pairs
    ts = t[pr.ps]
    x = ts & eng.project(~ts & eng.valid, pr.groups("unread_s"))
    return ~eng.exists_pairs(x, "unread1") & eng.valid


def deframed_table(eng: TableEngine, t: np.ndarray) -> np.ndarray:
    """Packed set of states where the table is stable-with-mask in disjoint global extensions."""
    pr = eng.sp.pairs
    t2 = t[pr.p2]
    x = t2 & eng.project(~t2 & eng.valid, pr.groups("unread_s"))
    return ~eng.exists_pairs(x, "unread1") & eng.valid


def framed_at(s: State, a: Assertion, u: Universe, disjoint: bool = False) -> bool:
    eng = engine_for(u)
    fv = free_vars(a)
    env = eng.sp.env_codes(s.env.restrict(fv))
    t = eng.table(a, env)
    f = deframed_table(eng, t) if disjoint else eframed_table(eng, t)
    return eng.bit(f, eng.sp.mask_index(s.mask), eng.sp.heap_index(s.heap))


__all__ = [
    "NotChaliceFragment",
    "PropertyReport",
    "deframed_table",
    "eframed_table",
    "framed_at",
    "framed_condition",
    "framed_expr",
    "intuitionistic_bad",
    "is_intuitionistic",
    "is_pure",
    "is_self_framing",
    "is_substitutable",
    "is_supported",
    "is_syntactically_self_framing",
    "self_framing_bad",
]

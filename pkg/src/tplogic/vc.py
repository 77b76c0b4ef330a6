"""Chalice commands, both weakest-precondition calculi, and VC equivalence.

``wp_ch`` builds a :class:`StatePredicate` tree over the current heap and mask.
Substitutions of updated maps are kept as ``WithHeap``/``WithMask`` nodes and
havoc introduces ``ForallValue`` over a fresh name; the evaluator turns each
node into a full (mask, heap) truth table, so a whole universe of states is
decided in one pass.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Optional, Tuple, Union

import numpy as np

from .properties import NotChaliceFragment, PropertyReport, framed_condition
from .semantics import engine_for, first_true
from .semantics.errors import UnboundVar
from .semantics.tables import TableEngine
from .state import NULL, State, Universe, UniverseError, Value, render_value
from .syntax import (
    Acc,
    Assertion,
    Eq,
    Expr,
    FieldRead,
    Imp,
    IntLit,
    Neq,
    NullLit,
    ParseError,
    Star,
    Var,
    Wand,
    free_vars,
    is_chalice,
    is_chalice_bool,
    parse_assertion,
    render,
    render_perm,
)


class NotChaliceBool(ValueError):
    pass


# -- state predicates ------------------------------------------------------------


@dataclass(frozen=True)
class Val:
    value: Value


@dataclass(frozen=True)
class EnvVar:
    name: str


@dataclass(frozen=True)
class Bound:
    name: str


@dataclass(frozen=True)
class HeapRead:
    obj: "ValTerm"
    field: str


ValTerm = Union[Val, EnvVar, Bound, HeapRead]


@dataclass(frozen=True)
class PermConst:
    value: Fraction


@dataclass(frozen=True)
class MaskRead:
    obj: ValTerm
    field: str


@dataclass(frozen=True)
class PermAdd:
    left: "PermTerm"
    right: "PermTerm"


@dataclass(frozen=True)
class PermSub:
    left: "PermTerm"
    right: "PermTerm"


PermTerm = Union[PermConst, MaskRead, PermAdd, PermSub]


@dataclass(frozen=True)
class PTrue:
    pass


@dataclass(frozen=True)
class PFalse:
    pass


@dataclass(frozen=True)
class ValEq:
    left: ValTerm
    right: ValTerm


@dataclass(frozen=True)
class ValNeq:
    left: ValTerm
    right: ValTerm


_CMP = {
    "=": np.equal,
    "!=": np.not_equal,
    "<": np.less,
    "<=": np.less_equal,
    ">": np.greater,
    ">=": np.greater_equal,
}


@dataclass(frozen=True)
class PermCmp:
    op: str
    left: PermTerm
    right: PermTerm

    def __post_init__(self):
        if self.op not in _CMP:
            raise ValueError(f"unknown comparison {self.op!r}")


@dataclass(frozen=True)
class Not:
    body: "StatePredicate"


@dataclass(frozen=True)
class AndP:
    left: "StatePredicate"
    right: "StatePredicate"


@dataclass(frozen=True)
class OrP:
    left: "StatePredicate"
    right: "StatePredicate"


@dataclass(frozen=True)
class ImpliesP:
    left: "StatePredicate"
    right: "StatePredicate"


@dataclass(frozen=True)
class Interp:
    assertion: Assertion


@dataclass(frozen=True)
class ForallValue:
    name: str
    body: "StatePredicate"


@dataclass(frozen=True)
class WithHeap:
    """``body`` evaluated in the heap updated at (obj, field) with ``value``."""

    obj: ValTerm
    field: str
    value: ValTerm
    body: "StatePredicate"


@dataclass(frozen=True)
class WithMask:
    """``body`` evaluated in the mask updated at (obj, field) with ``perm``."""

    obj: ValTerm
    field: str
    perm: PermTerm
    body: "StatePredicate"


StatePredicate = Union[
    PTrue, PFalse, ValEq, ValNeq, PermCmp, Not, AndP, OrP, ImpliesP, Interp, ForallValue, WithHeap, WithMask
]

TRUE_P = PTrue()
FALSE_P = PFalse()


def pred_vars(p) -> FrozenSet[str]:
    """Program variables the predicate reads from the environment."""
    if isinstance(p, EnvVar):
        return frozenset([p.name])
    if isinstance(p, Interp):
        return free_vars(p.assertion)
    if isinstance(p, (Val, Bound, PermConst, PTrue, PFalse)):
        return frozenset()
    out = frozenset()
    for name in p.__dataclass_fields__:
        child = getattr(p, name)
        if hasattr(child, "__dataclass_fields__"):
            out |= pred_vars(child)
    return out


def bound_names(p) -> FrozenSet[str]:
    """Quantified names that occur free in a predicate or term."""
    if isinstance(p, Bound):
        return frozenset([p.name])
    if isinstance(p, (Val, EnvVar, PermConst, PTrue, PFalse, Interp)):
        return frozenset()
    if isinstance(p, ForallValue):
        return bound_names(p.body) - {p.name}
    out = frozenset()
    for name in p.__dataclass_fields__:
        child = getattr(p, name)
        if hasattr(child, "__dataclass_fields__"):
            out |= bound_names(child)
    return out


# -- commands ------------------------------------------------------------------------


@dataclass(frozen=True)
class Inhale:
    assertion: Assertion


@dataclass(frozen=True)
class Exhale:
    assertion: Assertion


@dataclass(frozen=True)
class AssertPred:
    pred: StatePredicate


@dataclass(frozen=True)
class AssumePred:
    pred: StatePredicate


@dataclass(frozen=True)
class HavocHeap:
    obj: Expr
    field: str


@dataclass(frozen=True)
class MaskSet:
    obj: Expr
    field: str
    perm: Fraction


@dataclass(frozen=True)
class MaskAdd:
    obj: Expr
    field: str
    perm: Fraction


@dataclass(frozen=True)
class MaskSub:
    obj: Expr
    field: str
    perm: Fraction


@dataclass(frozen=True)
class Seq:
    first: "Command"
    second: "Command"


@dataclass(frozen=True)
class Choice:
    left: "Command"
    right: "Command"


@dataclass(frozen=True)
class AssertTPL:
    assertion: Assertion


@dataclass(frozen=True)
class AssertFrm:
    assertion: Assertion


Command = Union[
    Inhale, Exhale, AssertPred, AssumePred, HavocHeap, MaskSet, MaskAdd, MaskSub, Seq, Choice, AssertTPL, AssertFrm
]


def seq(*cs: Command) -> Command:
    out = cs[-1]
    for c in reversed(cs[:-1]):
        out = Seq(c, out)
    return out


# -- translation of Chalice expressions -----------------------------------------------


def translate_expr(e: Expr) -> ValTerm:
    if isinstance(e, Var):
        return EnvVar(e.name)
    if isinstance(e, NullLit):
        return Val(NULL)
    if isinstance(e, IntLit):
        return Val(e.value)
    if isinstance(e, FieldRead):
        return HeapRead(translate_expr(e.obj), e.field)
    raise TypeError(f"not an expression: {e!r}")


def translate_bool(b: Assertion) -> StatePredicate:
    if isinstance(b, Eq):
        return ValEq(translate_expr(b.left), translate_expr(b.right))
    if isinstance(b, Neq):
        return ValNeq(translate_expr(b.left), translate_expr(b.right))
    if isinstance(b, Star) and is_chalice_bool(b):
        return AndP(translate_bool(b.left), translate_bool(b.right))
    raise NotChaliceBool(f"not a Chalice boolean expression: {render(b)}")


def interp(a: Assertion) -> StatePredicate:
    return Interp(a)


# -- desugaring of inhale and exhale --------------------------------------------------------


def _mask(e: Expr, f: str) -> MaskRead:
    return MaskRead(translate_expr(e), f)


def desugar_exhale(p: Assertion) -> Command:
    if is_chalice_bool(p):
        return AssertPred(translate_bool(p))
    if isinstance(p, Star):
        return Seq(desugar_exhale(p.left), desugar_exhale(p.right))
    if isinstance(p, Acc):
        enough = PermCmp(">=", _mask(p.obj, p.field), PermConst(p.perm))
        return Seq(AssertPred(enough), MaskSub(p.obj, p.field, p.perm))
    if isinstance(p, Imp):
        b = translate_bool(p.left)
        return Choice(Seq(AssumePred(b), desugar_exhale(p.right)), AssumePred(Not(b)))
    raise NotChaliceFragment(f"cannot exhale {render(p)}")


def desugar_inhale(p: Assertion) -> Command:
    if is_chalice_bool(p):
        return AssumePred(translate_bool(p))
    if isinstance(p, Star):
        return Seq(desugar_inhale(p.left), desugar_inhale(p.right))
    if isinstance(p, Acc):
        m = _mask(p.obj, p.field)
        zero = PermConst(Fraction(0))
        fresh = seq(
            AssumePred(PermCmp("=", m, zero)),
            MaskSet(p.obj, p.field, p.perm),
            HavocHeap(p.obj, p.field),
        )
        held = AndP(PermCmp("<", zero, m), PermCmp("<=", m, PermConst(1 - p.perm)))
        more = Seq(AssumePred(held), MaskAdd(p.obj, p.field, p.perm))
        return Choice(fresh, more)
    if isinstance(p, Imp):
        b = translate_bool(p.left)
        return Choice(Seq(AssumePred(b), desugar_inhale(p.right)), AssumePred(Not(b)))
    raise NotChaliceFragment(f"cannot inhale {render(p)}")


# -- weakest preconditions ------------------------------------------------------------------


class _Fresh:
    def __init__(self):
        self.count = 0

    def __call__(self) -> str:
        self.count += 1
        return f"z{self.count}"


def wp_ch(c: Command, post: StatePredicate) -> StatePredicate:
    """Chalice weakest precondition; fresh names z1, z2, ... are local to this call."""
    return _wp(c, post, _Fresh())


def _wp(c: Command, post: StatePredicate, fresh: _Fresh) -> StatePredicate:
    if isinstance(c, Inhale):
        if not is_chalice(c.assertion):
            raise NotChaliceFragment(f"inhale payload outside the Chalice subsyntax: {render(c.assertion)}")
        return _wp(desugar_inhale(c.assertion), post, fresh)
    if isinstance(c, Exhale):
        if not is_chalice(c.assertion):
            raise NotChaliceFragment(f"exhale payload outside the Chalice subsyntax: {render(c.assertion)}")
        return _wp(desugar_exhale(c.assertion), post, fresh)
    if isinstance(c, AssertPred):
        return AndP(c.pred, post)
    if isinstance(c, AssumePred):
        return ImpliesP(c.pred, post)
    if isinstance(c, AssertTPL):
        return AndP(Interp(c.assertion), post)
    if isinstance(c, AssertFrm):
        return AndP(Interp(framed_condition(c.assertion)), post)
    if isinstance(c, Seq):
        return _wp(c.first, _wp(c.second, post, fresh), fresh)
    if isinstance(c, Choice):
        return AndP(_wp(c.left, post, fresh), _wp(c.right, post, fresh))
    if isinstance(c, MaskSet):
        return WithMask(translate_expr(c.obj), c.field, PermConst(c.perm), post)
    if isinstance(c, (MaskAdd, MaskSub)):
        op = PermAdd if isinstance(c, MaskAdd) else PermSub
        cur = _mask(c.obj, c.field)
        return WithMask(translate_expr(c.obj), c.field, op(cur, PermConst(c.perm)), post)
    if isinstance(c, HavocHeap):
        z = fresh()
        return ForallValue(z, WithHeap(translate_expr(c.obj), c.field, Bound(z), post))
    raise TypeError(f"not a command: {c!r}")


def wp_sl(c: Command, post: Assertion) -> Assertion:
    if isinstance(c, Exhale):
        return Star(c.assertion, post)
    if isinstance(c, Inhale):
        return Wand(c.assertion, post)
    raise TypeError("wp_sl is defined for inhale and exhale only")


# -- evaluation -----------------------------------------------------------------------------


class PredicateEvaluator:
    """Evaluates state predicates to full (mask, heap) truth tables for one environment.

    Terms evaluate to arrays broadcastable to (NM, NH). Value terms never read
    the mask, so they have shape (1, NH) or (1, 1); a heap update is then a
    column gather and a mask update a row (or pointwise) gather of the body's
    table.
    """

    def __init__(self, u: Universe, env: Dict[str, int], eng: Optional[TableEngine] = None, fast_havoc: bool = True):
        self.fast_havoc = fast_havoc
        self.eng = eng or engine_for(u)
        self.sp = self.eng.sp
        self.env = env
        self._h = np.arange(self.sp.NH, dtype=np.int64)[None, :]
        self._m = np.arange(self.sp.NM, dtype=np.int64)[:, None]
        self._tables: Dict[tuple, np.ndarray] = {}
        self._names: Dict[object, Tuple[str, ...]] = {}

    @staticmethod
    def _const(v: int):
        return np.full((1, 1), v, dtype=np.int64), np.ones((1, 1), dtype=bool)

    def value(self, t: ValTerm, bound: Dict[str, int]):
        """Value codes and definedness."""
        if isinstance(t, Val):
            return self._const(self.eng.literal_code(t.value))
        if isinstance(t, EnvVar):
            if t.name not in self.env:
                raise UnboundVar(t.name)
            return self._const(self.env[t.name])
        if isinstance(t, Bound):
            return self._const(bound[t.name])
        loc, ok = self.location(t.obj, t.field, bound)
        vals = self.sp.heap_vals[self._h, loc].astype(np.int64)
        return vals, ok

    def location(self, obj: ValTerm, field: str, bound: Dict[str, int]):
        codes, ok = self.value(obj, bound)
        fi = self.sp.field_index.get(field)
        if fi is None:
            return np.zeros_like(codes), np.zeros_like(ok)
        inu = ok & (codes >= 0) & (codes < self.sp.V)
        loc = np.where(inu, self.sp.objloc[np.where(inu, codes, 0), fi], -1)
        return np.where(loc >= 0, loc, 0), loc >= 0

    def perm(self, t: PermTerm, bound: Dict[str, int]):
        """Permission levels in units of 1/D, and definedness."""
        if isinstance(t, PermConst):
            lvl = t.value * self.sp.D
            if lvl.denominator != 1:
                raise UniverseError(f"permission {t.value} not on the grid 1/{self.sp.D}")
            return self._const(int(lvl))
        if isinstance(t, MaskRead):
            loc, ok = self.location(t.obj, t.field, bound)
            return self.sp.mask_lvls[self._m, loc].astype(np.int64), ok
        l, okl = self.perm(t.left, bound)
        r, okr = self.perm(t.right, bound)
        return (l + r if isinstance(t, PermAdd) else l - r), okl & okr

    def table(self, p: StatePredicate, bound: Optional[Dict[str, int]] = None) -> np.ndarray:
        """Truth of p at every (mask, heap), shape (NM, NH)."""
        bound = bound or {}
        names = self._names.get(p)
        if names is None:
            names = self._names[p] = tuple(sorted(bound_names(p)))
        key = (p, tuple(bound[k] for k in names))
        hit = self._tables.get(key)
        if hit is None:
            hit = np.broadcast_to(self._eval(p, bound), (self.sp.NM, self.sp.NH))
            self._tables[key] = hit
        return hit

    def _havoc(self, p: ForallValue, bound: Dict[str, int]) -> Optional[np.ndarray]:
        """forall z. body[Heap := upd(Heap, loc, z)] at a heap-independent loc, as an AND over the fiber."""
        upd = p.body
        if not (isinstance(upd, WithHeap) and upd.value == Bound(p.name)) or p.name in bound_names(upd.body):
            return None
        loc, ok = self.location(upd.obj, upd.field, bound)
        if loc.shape != (1, 1):
            return None
        if not ok[0, 0]:
            return np.zeros((1, 1), dtype=bool)
        sp, l = self.sp, int(loc[0, 0])
        body = self.table(upd.body, bound).reshape(sp.NM, sp.V**l, sp.V, -1)
        return np.broadcast_to(body.all(axis=2, keepdims=True), body.shape).reshape(sp.NM, sp.NH)

    def _eval(self, p: StatePredicate, bound: Dict[str, int]) -> np.ndarray:
        sp = self.sp
        if isinstance(p, PTrue):
            return np.ones((1, 1), dtype=bool)
        if isinstance(p, PFalse):
            return np.zeros((1, 1), dtype=bool)
        if isinstance(p, (ValEq, ValNeq)):
            l, okl = self.value(p.left, bound)
            r, okr = self.value(p.right, bound)
            return okl & okr & ((l == r) if isinstance(p, ValEq) else (l != r))
        if isinstance(p, PermCmp):
            l, okl = self.perm(p.left, bound)
            r, okr = self.perm(p.right, bound)
            return okl & okr & _CMP[p.op](l, r)
        if isinstance(p, Not):
            return ~self.table(p.body, bound)
        if isinstance(p, Interp):
            return self.eng.bool_table(p.assertion, self.env)
        if isinstance(p, AndP):
            return self.table(p.left, bound) & self.table(p.right, bound)
        if isinstance(p, OrP):
            return self.table(p.left, bound) | self.table(p.right, bound)
        if isinstance(p, ImpliesP):
            return ~self.table(p.left, bound) | self.table(p.right, bound)
        if isinstance(p, ForallValue):
            fast = self._havoc(p, bound) if self.fast_havoc else None
            if fast is not None:
                return fast
            out = np.ones((sp.NM, sp.NH), dtype=bool)
            for v in range(sp.V):
                inner = dict(bound)
                inner[p.name] = v
                out &= self.table(p.body, inner)
            return out
        if isinstance(p, WithHeap):
            loc, ok = self.location(p.obj, p.field, bound)
            v, okv = self.value(p.value, bound)
            ok = np.broadcast_to(ok & okv & (v >= 0) & (v < sp.V), (1, sp.NH))
            cur = sp.heap_vals[self._h, loc].astype(np.int64)
            new_h = np.where(ok, self._h + (v - cur) * sp.wH[loc], self._h)
            return self.table(p.body, bound)[:, new_h[0]] & ok
        if isinstance(p, WithMask):
            loc, ok = self.location(p.obj, p.field, bound)
            lv, okp = self.perm(p.perm, bound)
            ok = ok & okp & (lv >= 0) & (lv <= sp.D)
            cur = sp.mask_lvls[self._m, loc].astype(np.int64)
            new_m = np.where(ok, self._m + (lv - cur) * sp.wM[loc], self._m)
            body = self.table(p.body, bound)
            if new_m.shape[1] == 1:
                return body[new_m[:, 0]] & ok
            return body[new_m, np.broadcast_to(self._h, new_m.shape)] & ok
        raise TypeError(f"not a state predicate: {p!r}")


def pred_table(p: StatePredicate, u: Universe, env: Dict[str, int]) -> np.ndarray:
    return PredicateEvaluator(u, env).table(p)


def eval_pred(p: StatePredicate, s: State, u: Universe) -> bool:
    eng = engine_for(u)
    env = eng.sp.env_codes(s.env.restrict(pred_vars(p)))
    t = PredicateEvaluator(u, env, eng).table(p)
    return bool(t[eng.sp.mask_index(s.mask), eng.sp.heap_index(s.heap)])


def equiv_vc(c: Command, a: Assertion, u: Universe) -> PropertyReport:
    """interp(wp_sl(c, a)) and wp_ch(c, interp(a)) agree at every state of u."""
    if not isinstance(c, (Inhale, Exhale)):
        raise TypeError("equiv_vc is defined for inhale and exhale")
    if not is_chalice(c.assertion):
        raise NotChaliceFragment(f"payload outside the Chalice subsyntax: {render(c.assertion)}")
    eng = engine_for(u)
    sl = wp_sl(c, a)
    ch = wp_ch(c, Interp(a))
    for env in eng.sp.envs(free_vars(sl) | pred_vars(ch)):
        left = eng.bool_table(sl, env)
        right = PredicateEvaluator(u, env, eng).table(ch)
        diff = left ^ right
        hit = first_true(diff)
        if hit:
            mi, hi = hit
            which = "wp_sl holds, wp_ch fails" if left[mi, hi] else "wp_ch holds, wp_sl fails"
            return PropertyReport("equiv", False, eng.sp.state(mi, hi, env), detail=which)
    return PropertyReport("equiv", True)


# -- rendering ---------------------------------------------------------------------------------


def render_term(t) -> str:
    if isinstance(t, Val):
        return render_value(t.value)
    if isinstance(t, (EnvVar, Bound)):
        return t.name
    if isinstance(t, HeapRead):
        return f"Heap[{render_term(t.obj)}, {t.field}]"
    if isinstance(t, MaskRead):
        return f"Mask[{render_term(t.obj)}, {t.field}]"
    if isinstance(t, PermConst):
        return render_perm(t.value)
    if isinstance(t, PermAdd):
        return f"({render_term(t.left)} + {render_term(t.right)})"
    if isinstance(t, PermSub):
        return f"({render_term(t.left)} - {render_term(t.right)})"
    raise TypeError(f"not a term: {t!r}")


def render_pred(p: StatePredicate) -> str:
    if isinstance(p, PTrue):
        return "true"
    if isinstance(p, PFalse):
        return "false"
    if isinstance(p, ValEq):
        return f"{render_term(p.left)} = {render_term(p.right)}"
    if isinstance(p, ValNeq):
        return f"{render_term(p.left)} != {render_term(p.right)}"
    if isinstance(p, PermCmp):
        return f"{render_term(p.left)} {p.op} {render_term(p.right)}"
    if isinstance(p, Not):
        return f"!({render_pred(p.body)})"
    if isinstance(p, AndP):
        return f"({render_pred(p.left)} && {render_pred(p.right)})"
    if isinstance(p, OrP):
        return f"({render_pred(p.left)} || {render_pred(p.right)})"
    if isinstance(p, ImpliesP):
        return f"({render_pred(p.left)} ==> {render_pred(p.right)})"
    if isinstance(p, Interp):
        return f"interp({render(p.assertion)})"
    if isinstance(p, ForallValue):
        return f"(forall {p.name} :: {render_pred(p.body)})"
    if isinstance(p, WithHeap):
        upd = f"upd(Heap, ({render_term(p.obj)}, {p.field}), {render_term(p.value)})"
        return f"{render_pred(p.body)}[Heap := {upd}]"
    if isinstance(p, WithMask):
        upd = f"upd(Mask, ({render_term(p.obj)}, {p.field}), {render_term(p.perm)})"
        return f"{render_pred(p.body)}[Mask := {upd}]"
    raise TypeError(f"not a state predicate: {p!r}")


def render_command(c: Command) -> str:
    if isinstance(c, Inhale):
        return f"inhale {render(c.assertion)}"
    if isinstance(c, Exhale):
        return f"exhale {render(c.assertion)}"
    if isinstance(c, AssertTPL):
        return f"assertTPL {render(c.assertion)}"
    if isinstance(c, AssertFrm):
        return f"assertFrm {render(c.assertion)}"
    if isinstance(c, Seq):
        return f"{render_command(c.first)} ; {render_command(c.second)}"
    if isinstance(c, Choice):
        return f"({render_command(c.left)} [] {render_command(c.right)})"
    if isinstance(c, AssertPred):
        return f"assert {render_pred(c.pred)}"
    if isinstance(c, AssumePred):
        return f"assume {render_pred(c.pred)}"
    if isinstance(c, HavocHeap):
        return f"havoc Heap[{render_term(translate_expr(c.obj))}, {c.field}]"
    op = {MaskSet: ":=", MaskAdd: "+=", MaskSub: "-="}[type(c)]
    return f"Mask[{render_term(translate_expr(c.obj))}, {c.field}] {op} {render_perm(c.perm)}"


# -- command parsing -------------------------------------------------------------------------------

_KEYWORD = re.compile(r"(inhale|exhale|assertTPL|assertFrm)\b")


def _split_top(text: str, sep: str):
    """Split at occurrences of `sep` outside parentheses, with their offsets."""
    parts, depth, start, i = [], 0, 0, 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and text.startswith(sep, i):
            parts.append((start, text[start:i]))
            i += len(sep)
            start = i
            continue
        i += 1
    parts.append((start, text[start:]))
    return parts


def _matching(text: str, open_at: int) -> int:
    depth = 0
    for i in range(open_at, len(text)):
        if text[i] == "(":
            depth += 1
        elif text[i] == ")":
            depth -= 1
            if depth == 0:
                return i
    return -1


def parse_command(text: str, _offset: int = 0) -> Command:
    """Parse ``inhale A``, ``exhale A``, ``assertTPL A``, ``assertFrm A``, ``c1 ; c2``, ``(c1 [] c2)``."""
    items = [(o, s) for o, s in _split_top(text, ";")]
    cmds = []
    for off, item in items:
        stripped = item.strip()
        pos = _offset + off + (len(item) - len(item.lstrip()))
        if not stripped:
            raise ParseError("empty command", pos)
        cmds.append(_parse_single(stripped, pos))
    return seq(*cmds)


def _parse_single(text: str, pos: int) -> Command:
    if text.startswith("("):
        close = _matching(text, 0)
        if close == len(text) - 1:
            inner = text[1:-1]
            alts = _split_top(inner, "[]")
            if len(alts) == 2:
                (o1, c1), (o2, c2) = alts
                return Choice(parse_command(c1, pos + 1 + o1), parse_command(c2, pos + 1 + o2))
            if len(alts) == 1:
                return parse_command(inner, pos + 1)
            raise ParseError("a choice has exactly two branches", pos)
    m = _KEYWORD.match(text)
    if not m:
        raise ParseError("expected inhale, exhale, assertTPL, assertFrm or a parenthesized choice", pos)
    body = text[m.end():]
    try:
        a = parse_assertion(body)
    except ParseError as err:
        raise ParseError(err.message, pos + m.end() + err.pos) from None
    kind = {"inhale": Inhale, "exhale": Exhale, "assertTPL": AssertTPL, "assertFrm": AssertFrm}[m.group(1)]
    return kind(a)

"""Expressions and assertions: AST, parser, renderer, classification, substitution."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Iterator, List, Optional, Tuple, Union


# -- expressions ---------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class NullLit:
    pass


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class FieldRead:
    obj: "Expr"
    field: str


Expr = Union[Var, NullLit, IntLit, FieldRead]


# -- assertions ----------------------------------------------------------------


@dataclass(frozen=True)
class Eq:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neq:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class PointsTo:
    obj: Expr
    field: str
    perm: Fraction
    value: Expr


@dataclass(frozen=True)
class Acc:
    obj: Expr
    field: str
    perm: Fraction


@dataclass(frozen=True)
class AccAny:
    obj: Expr
    field: str


@dataclass(frozen=True)
class Star:
    left: "Assertion"
    right: "Assertion"


@dataclass(frozen=True)
class Wand:
    left: "Assertion"
    right: "Assertion"


@dataclass(frozen=True)
class And:
    left: "Assertion"
    right: "Assertion"


@dataclass(frozen=True)
class Or:
    left: "Assertion"
    right: "Assertion"


@dataclass(frozen=True)
class Imp:
    left: "Assertion"
    right: "Assertion"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Assertion"


@dataclass(frozen=True)
class TrueLit:
    pass


@dataclass(frozen=True)
class FalseLit:
    pass


Assertion = Union[Eq, Neq, PointsTo, Acc, AccAny, Star, Wand, And, Or, Imp, Exists, TrueLit, FalseLit]

BINARY = (Star, Wand, And, Or, Imp)
PERM_ATOMS = (PointsTo, Acc, AccAny)
TRUE = TrueLit()
FALSE = FalseLit()
NULL_E = NullLit()


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        self.message = message
        self.pos = pos
        super().__init__(f"{message} at position {pos}")


# -- free variables ------------------------------------------------------------


def expr_vars(e: Expr) -> FrozenSet[str]:
    while isinstance(e, FieldRead):
        e = e.obj
    return frozenset([e.name]) if isinstance(e, Var) else frozenset()


def free_vars(a: Assertion) -> FrozenSet[str]:
    if isinstance(a, (Eq, Neq)):
        return expr_vars(a.left) | expr_vars(a.right)
    if isinstance(a, PointsTo):
        return expr_vars(a.obj) | expr_vars(a.value)
    if isinstance(a, (Acc, AccAny)):
        return expr_vars(a.obj)
    if isinstance(a, BINARY):
        return free_vars(a.left) | free_vars(a.right)
    if isinstance(a, Exists):
        return free_vars(a.body) - {a.var}
    return frozenset()


def all_vars(a: Assertion) -> FrozenSet[str]:
    """Free and bound variable names."""
    if isinstance(a, Exists):
        return all_vars(a.body) | {a.var}
    if isinstance(a, BINARY):
        return all_vars(a.left) | all_vars(a.right)
    return free_vars(a)


def _expr_fields(e: Expr) -> FrozenSet[str]:
    if isinstance(e, FieldRead):
        return _expr_fields(e.obj) | {e.field}
    return frozenset()


def fields_used(a: Assertion) -> FrozenSet[str]:
    """Every field name mentioned, in permission atoms and in expressions."""
    out: FrozenSet[str] = frozenset()
    for s in subformulas(a):
        if isinstance(s, (Eq, Neq)):
            out |= _expr_fields(s.left) | _expr_fields(s.right)
        elif isinstance(s, PERM_ATOMS):
            out |= _expr_fields(s.obj) | {s.field}
            if isinstance(s, PointsTo):
                out |= _expr_fields(s.value)
    return out


def fresh_name(base: str, avoid) -> str:
    """`base`, then `base'`, `base''`, ... until outside `avoid`."""
    name = base
    while name in avoid:
        name += "'"
    return name


def points_to_any(obj: Expr, field: str, q) -> Exists:
    """The expansion of ``E.f |->[q] _``."""
    v = fresh_name("v", expr_vars(obj))
    return Exists(v, PointsTo(obj, field, Fraction(q), Var(v)))


def is_wildcard(a: Assertion) -> bool:
    return (
        isinstance(a, Exists)
        and isinstance(a.body, PointsTo)
        and a.body.value == Var(a.var)
        and a.var == fresh_name("v", expr_vars(a.body.obj))
    )


# -- substitution ----------------------------------------------------------------


def subst_expr(e: Expr, x: str, r: Expr) -> Expr:
    if isinstance(e, Var):
        return r if e.name == x else e
    if isinstance(e, FieldRead):
        return FieldRead(subst_expr(e.obj, x, r), e.field)
    return e


def substitute(a: Assertion, x: str, r: Expr) -> Assertion:
    """Capture-avoiding ``a[r/x]``; clashing binders get primes appended."""
    if isinstance(a, Eq):
        return Eq(subst_expr(a.left, x, r), subst_expr(a.right, x, r))
    if isinstance(a, Neq):
        return Neq(subst_expr(a.left, x, r), subst_expr(a.right, x, r))
    if isinstance(a, PointsTo):
        return PointsTo(subst_expr(a.obj, x, r), a.field, a.perm, subst_expr(a.value, x, r))
    if isinstance(a, Acc):
        return Acc(subst_expr(a.obj, x, r), a.field, a.perm)
    if isinstance(a, AccAny):
        return AccAny(subst_expr(a.obj, x, r), a.field)
    if isinstance(a, BINARY):
        return type(a)(substitute(a.left, x, r), substitute(a.right, x, r))
    if isinstance(a, Exists):
        if a.var == x or x not in free_vars(a.body):
            return a
        rv = expr_vars(r)
        if a.var in rv:
            new = fresh_name(a.var, rv | all_vars(a.body) | {x})
            body = substitute(a.body, a.var, Var(new))
            return Exists(new, substitute(body, x, r))
        return Exists(a.var, substitute(a.body, x, r))
    return a


# -- classification --------------------------------------------------------------


def is_sl_expr(e: Expr) -> bool:
    return isinstance(e, (Var, NullLit, IntLit))


def is_sl(a: Assertion) -> bool:
    if isinstance(a, Eq):
        return is_sl_expr(a.left) and is_sl_expr(a.right)
    if isinstance(a, PointsTo):
        return is_sl_expr(a.obj) and is_sl_expr(a.value)
    if isinstance(a, BINARY):
        return is_sl(a.left) and is_sl(a.right)
    if isinstance(a, Exists):
        return is_sl(a.body)
    return False


def is_sl_with_neq(a: Assertion) -> bool:
    """SL extended with heap-independent disequalities (as used by restricted SL)."""
    if isinstance(a, Neq):
        return is_sl_expr(a.left) and is_sl_expr(a.right)
    if isinstance(a, Eq):
        return is_sl_expr(a.left) and is_sl_expr(a.right)
    if isinstance(a, PointsTo):
        return is_sl_expr(a.obj) and is_sl_expr(a.value)
    if isinstance(a, BINARY):
        return is_sl_with_neq(a.left) and is_sl_with_neq(a.right)
    if isinstance(a, Exists):
        return is_sl_with_neq(a.body)
    return False


def is_chalice_bool(a: Assertion) -> bool:
    if isinstance(a, (Eq, Neq)):
        return True
    if isinstance(a, Star):
        return is_chalice_bool(a.left) and is_chalice_bool(a.right)
    return False


def is_chalice(a: Assertion) -> bool:
    if is_chalice_bool(a) or isinstance(a, Acc):
        return True
    if isinstance(a, Star):
        return is_chalice(a.left) and is_chalice(a.right)
    if isinstance(a, Imp):
        return is_chalice_bool(a.left) and is_chalice(a.right)
    return False


def is_sl_bool(a: Assertion) -> bool:
    if isinstance(a, (Eq, Neq)):
        return is_sl_expr(a.left) and is_sl_expr(a.right)
    if isinstance(a, Star):
        return is_sl_bool(a.left) and is_sl_bool(a.right)
    return False


def star_conjuncts(a: Assertion) -> List[Assertion]:
    if isinstance(a, Star):
        return star_conjuncts(a.left) + star_conjuncts(a.right)
    return [a]


def star_of(parts: List[Assertion]) -> Assertion:
    out = parts[0]
    for p in parts[1:]:
        out = Star(out, p)
    return out


def witnessed_existential(a: Assertion) -> Optional[Tuple[PointsTo, Optional[Assertion]]]:
    """Split ``exists v :: e.f |->[q] v * rest`` into its witness and rest (None if bare)."""
    if not isinstance(a, Exists):
        return None
    parts = star_conjuncts(a.body)
    head = parts[0]
    if not (isinstance(head, PointsTo) and head.value == Var(a.var) and is_sl_expr(head.obj)):
        return None
    if a.var in expr_vars(head.obj):
        return None
    rest = star_of(parts[1:]) if len(parts) > 1 else None
    return head, rest


def is_restricted_sl(a: Assertion) -> bool:
    if is_sl_bool(a):
        return True
    if isinstance(a, PointsTo):
        return is_sl_expr(a.obj) and is_sl_expr(a.value)
    if isinstance(a, Star):
        return is_restricted_sl(a.left) and is_restricted_sl(a.right)
    if isinstance(a, Imp):
        return is_sl_bool(a.left) and is_restricted_sl(a.right)
    w = witnessed_existential(a)
    if w is not None:
        return w[1] is None or is_restricted_sl(w[1])
    return False


@dataclass(frozen=True)
class SubsyntaxClass:
    is_sl: bool
    is_chalice: bool
    is_restricted_sl: bool
    is_chalice_bool: bool


def classify(a: Assertion) -> SubsyntaxClass:
    return SubsyntaxClass(is_sl(a), is_chalice(a), is_restricted_sl(a), is_chalice_bool(a))


def has_perm_atom(a: Assertion) -> bool:
    if isinstance(a, PERM_ATOMS):
        return True
    if isinstance(a, BINARY):
        return has_perm_atom(a.left) or has_perm_atom(a.right)
    if isinstance(a, Exists):
        return has_perm_atom(a.body)
    return False


def size(a: Assertion) -> int:
    if isinstance(a, BINARY):
        return 1 + size(a.left) + size(a.right)
    if isinstance(a, Exists):
        return 1 + size(a.body)
    return 1


def subformulas(a: Assertion) -> Iterator[Assertion]:
    yield a
    if isinstance(a, BINARY):
        yield from subformulas(a.left)
        yield from subformulas(a.right)
    elif isinstance(a, Exists):
        yield from subformulas(a.body)


# -- rendering ---------------------------------------------------------------------


def render_perm(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def render_expr(e: Expr) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, NullLit):
        return "null"
    if isinstance(e, IntLit):
        return str(e.value)
    return f"{render_expr(e.obj)}.{e.field}"


_LEVEL = {Wand: 0, Imp: 1, Or: 2, And: 3, Star: 4}
_SYMBOL = {Wand: "--*", Imp: "==>", Or: "||", And: "&&", Star: "*"}
_RIGHT_ASSOC = (Wand, Imp)
_ATOM_LEVEL = 5


def _level(a: Assertion) -> int:
    if isinstance(a, Exists):
        return _ATOM_LEVEL if is_wildcard(a) else -1
    return _LEVEL.get(type(a), _ATOM_LEVEL)


def render(a: Assertion) -> str:
    if isinstance(a, Eq):
        return f"{render_expr(a.left)} == {render_expr(a.right)}"
    if isinstance(a, Neq):
        return f"{render_expr(a.left)} != {render_expr(a.right)}"
    if isinstance(a, PointsTo):
        return f"{render_expr(a.obj)}.{a.field} |->[{render_perm(a.perm)}] {render_expr(a.value)}"
    if isinstance(a, Acc):
        return f"acc({render_expr(a.obj)}.{a.field}, {render_perm(a.perm)})"
    if isinstance(a, AccAny):
        return f"acc({render_expr(a.obj)}.{a.field}, _)"
    if isinstance(a, TrueLit):
        return "true"
    if isinstance(a, FalseLit):
        return "false"
    if isinstance(a, Exists):
        if is_wildcard(a):
            b = a.body
            return f"{render_expr(b.obj)}.{b.field} |->[{render_perm(b.perm)}] _"
        return f"exists {a.var} :: {render(a.body)}"
    lvl = _LEVEL[type(a)]
    left, right = render(a.left), render(a.right)
    ll, rl = _level(a.left), _level(a.right)
    if isinstance(a, _RIGHT_ASSOC):
        lpar, rpar = ll <= lvl, rl < lvl
    else:
        lpar, rpar = ll < lvl, rl <= lvl
    if lpar:
        left = f"({left})"
    if rpar:
        right = f"({right})"
    return f"{left} {_SYMBOL[type(a)]} {right}"


# -- parsing -----------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<op>--\*|==>|==|!=|\|->|&&|\|\||::|[()\[\],.*/_])|(?P<int>-?[0-9]+)|(?P<id>[A-Za-z][A-Za-z0-9_']*))"
)
KEYWORDS = {"exists", "true", "false", "null", "acc"}


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        val = m.group(kind)
        if kind == "id" and val in KEYWORDS:
            kind = "kw"
        toks.append((kind, val, start))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, val: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t[0] in ("op", "kw") and t[1] == val

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, val: str):
        t = self.next()
        if t[0] not in ("op", "kw") or t[1] != val:
            raise ParseError(f"expected {val!r}, found {t[1] or 'end of input'!r}", t[2])
        return t

    def ident(self) -> str:
        t = self.next()
        if t[0] != "id":
            raise ParseError(f"expected identifier, found {t[1] or 'end of input'!r}", t[2])
        return t[1]

    def done(self):
        t = self.peek()
        if t[0] != "eof":
            raise ParseError(f"unexpected {t[1]!r}", t[2])

    # assertion levels
    def assertion(self) -> Assertion:
        left = self.imp()
        if self.at("--*"):
            self.next()
            return Wand(left, self.assertion())
        return left

    def imp(self) -> Assertion:
        left = self.disj()
        if self.at("==>"):
            self.next()
            return Imp(left, self.imp())
        return left

    def disj(self) -> Assertion:
        out = self.conj()
        while self.at("||"):
            self.next()
            out = Or(out, self.conj())
        return out

    def conj(self) -> Assertion:
        out = self.star()
        while self.at("&&"):
            self.next()
            out = And(out, self.star())
        return out

    def star(self) -> Assertion:
        out = self.unary()
        while self.at("*"):
            self.next()
            out = Star(out, self.unary())
        return out

    def unary(self) -> Assertion:
        if self.at("exists"):
            self.next()
            v = self.ident()
            self.expect("::")
            return Exists(v, self.assertion())
        if self.at("("):
            self.next()
            a = self.assertion()
            self.expect(")")
            return a
        if self.at("true"):
            self.next()
            return TRUE
        if self.at("false"):
            self.next()
            return FALSE
        if self.at("acc"):
            return self.acc()
        return self.comparison()

    def acc(self) -> Assertion:
        self.expect("acc")
        self.expect("(")
        pos = self.peek()[2]
        e = self.expr()
        if not isinstance(e, FieldRead):
            raise ParseError("acc expects a field location E.f", pos)
        self.expect(",")
        if self.at("_"):
            self.next()
            self.expect(")")
            return AccAny(e.obj, e.field)
        q = self.perm()
        self.expect(")")
        return Acc(e.obj, e.field, q)

    def perm(self) -> Fraction:
        t = self.next()
        if t[0] != "int":
            raise ParseError(f"expected permission, found {t[1] or 'end of input'!r}", t[2])
        num = int(t[1])
        den = 1
        if self.at("/"):
            self.next()
            d = self.next()
            if d[0] != "int":
                raise ParseError("expected denominator", d[2])
            den = int(d[1])
            if den == 0:
                raise ParseError("zero denominator", d[2])
        q = Fraction(num, den)
        if not (0 < q <= 1):
            raise ParseError(f"permission {render_perm(q)} outside (0,1]", t[2])
        return q

    def comparison(self) -> Assertion:
        pos = self.peek()[2]
        left = self.expr()
        if self.at("=="):
            self.next()
            return Eq(left, self.expr())
        if self.at("!="):
            self.next()
            return Neq(left, self.expr())
        if self.at("|->"):
            if not isinstance(left, FieldRead):
                raise ParseError("points-to expects a field location E.f", pos)
            self.next()
            self.expect("[")
            q = self.perm()
            self.expect("]")
            if self.at("_"):
                self.next()
                return points_to_any(left.obj, left.field, q)
            return PointsTo(left.obj, left.field, q, self.expr())
        t = self.peek()
        raise ParseError(f"expected comparison or points-to, found {t[1] or 'end of input'!r}", t[2])

    def expr(self) -> Expr:
        t = self.next()
        if t[0] == "id":
            e: Expr = Var(t[1])
        elif t[0] == "int":
            e = IntLit(int(t[1]))
        elif t[0] == "kw" and t[1] == "null":
            e = NULL_E
        else:
            raise ParseError(f"expected expression, found {t[1] or 'end of input'!r}", t[2])
        while self.at("."):
            self.next()
            e = FieldRead(e, self.ident())
        return e


def parse_assertion(text: str) -> Assertion:
    p = _Parser(text)
    a = p.assertion()
    p.done()
    return a


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    p.done()
    return e

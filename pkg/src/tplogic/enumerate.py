"""Deterministic, duplicate-free enumeration of assertions by subsyntax and depth."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .state import NULL, Universe
from .syntax import (
    Acc,
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
    PointsTo,
    Star,
    Var,
    Wand,
    fields_used,
    free_vars,
    is_chalice,
    is_chalice_bool,
    is_restricted_sl,
    is_sl,
    is_sl_bool,
    is_sl_expr,
    parse_assertion,
    points_to_any,
    subformulas,
)

SUBSYNTAXES = ("sl", "chalice", "restricted_sl", "tpl")

_BINARY = {"*": Star, "&&": And, "||": Or, "==>": Imp, "--*": Wand}

DEFAULT_CONNECTIVES = {
    "sl": ("*", "&&", "||", "==>", "--*"),
    "chalice": ("*", "==>"),
    "restricted_sl": ("*", "==>", "exists"),
    "tpl": ("*", "&&", "||", "==>", "--*"),
}


@dataclass(frozen=True)
class EnumeratorSpec:
    """What to enumerate.

    ``atoms`` is an explicit whitelist (assertion texts or ASTs); when it is
    None, atoms are generated from ``literals``, ``fields`` and ``perms``.
    """

    max_depth: int = 2
    subsyntax: str = "tpl"
    variables: Tuple[str, ...] = ("x", "y")
    atoms: Optional[Tuple] = None
    perms: Tuple[Fraction, ...] = (Fraction(1, 2), Fraction(1))
    literals: Tuple = (NULL, 5)
    fields: Tuple[str, ...] = ("f",)
    deref_depth: int = 1
    connectives: Optional[Tuple[str, ...]] = None
    binder: str = "v"

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.subsyntax not in SUBSYNTAXES:
            raise ValueError(f"unknown subsyntax {self.subsyntax!r}")

    def with_depth(self, depth: int) -> "EnumeratorSpec":
        return replace(self, max_depth=depth)


def _literal(v) -> Expr:
    return NullLit() if v is NULL else IntLit(v)


def expressions(spec: EnumeratorSpec, variables: Sequence[str], heap: bool) -> List[Expr]:
    base: List[Expr] = [Var(x) for x in variables] + [_literal(v) for v in spec.literals]
    if not heap:
        return base
    out = list(base)
    frontier = [Var(x) for x in variables]
    for _ in range(spec.deref_depth):
        frontier = [FieldRead(e, f) for e in frontier for f in spec.fields]
        out += frontier
    return out


def _comparisons(exprs: List[Expr], neq: bool) -> List[Assertion]:
    out: List[Assertion] = []
    for i, e1 in enumerate(exprs):
        for e2 in exprs[i:]:
            if not isinstance(e1, Var) and not isinstance(e2, Var) and is_sl_expr(e1) and is_sl_expr(e2):
                continue
            out.append(Eq(e1, e2))
            if neq and e1 != e2:
                out.append(Neq(e1, e2))
    return out


def generated_atoms(spec: EnumeratorSpec, variables: Sequence[str]) -> List[Assertion]:
    sub = spec.subsyntax
    objs = [Var(x) for x in variables]
    sl_exprs = expressions(spec, variables, heap=False)
    out: List[Assertion] = []
    if sub in ("sl", "restricted_sl", "tpl"):
        out += _comparisons(sl_exprs, neq=sub != "sl")
        for o in objs:
            for f in spec.fields:
                for q in spec.perms:
                    out += [PointsTo(o, f, q, e) for e in sl_exprs]
                    out.append(points_to_any(o, f, q))
    if sub in ("chalice", "tpl"):
        out += _comparisons(expressions(spec, variables, heap=True), neq=True)
        out += [Acc(o, f, q) for o in objs for f in spec.fields for q in spec.perms]
    return out


def _member(a: Assertion, sub: str) -> bool:
    if sub == "sl":
        return is_sl(a)
    if sub == "chalice":
        return is_chalice(a)
    if sub == "restricted_sl":
        return is_restricted_sl(a)
    return True


def _dedup(items: Iterable[Assertion]) -> List[Assertion]:
    seen, out = set(), []
    for a in items:
        if a not in seen:
            seen.add(a)
            out.append(a)
    return out


def _combine(spec: EnumeratorSpec, prev: List[Assertion], new: List[Assertion], conns) -> List[Assertion]:
    sub = spec.subsyntax
    newset = set(new)
    out: List[Assertion] = []
    for name in conns:
        if name == "exists":
            continue
        op = _BINARY[name]
        for a in prev:
            for b in prev:
                if a not in newset and b not in newset:
                    continue
                if sub == "chalice" and op is Imp and not is_chalice_bool(a):
                    continue
                if sub == "restricted_sl" and op is Imp and not is_sl_bool(a):
                    continue
                out.append(op(a, b))
    if "exists" in conns:
        v = spec.binder
        for body in new:
            if v not in free_vars(body):
                continue
            for o in (Var(x) for x in spec.variables):
                for f in spec.fields:
                    for q in spec.perms:
                        out.append(Exists(v, Star(PointsTo(o, f, q, Var(v)), body)))
    return out


def enumerate_assertions(spec: EnumeratorSpec, u: Optional[Universe] = None) -> List[Assertion]:
    """All assertions of the subsyntax up to the depth bound, in a fixed order."""
    conns = spec.connectives or DEFAULT_CONNECTIVES[spec.subsyntax]
    variables = list(spec.variables)
    if "exists" in conns and spec.binder not in variables:
        variables.append(spec.binder)
    if spec.atoms is not None:
        atoms = [parse_assertion(a) if isinstance(a, str) else a for a in spec.atoms]
    else:
        atoms = generated_atoms(spec, variables)
    if u is not None:
        atoms = [a for a in atoms if _fields_ok(a, u)]
    level = _dedup(atoms)
    new = list(level)
    for _ in range(spec.max_depth - 1):
        known = set(level)
        grown = _dedup(a for a in _combine(spec, level, new, conns) if a not in known)
        level = level + grown
        new = grown
    closed = set(spec.variables)
    return [a for a in level if free_vars(a) <= closed and _member(a, spec.subsyntax)]


def _fields_ok(a: Assertion, u: Universe) -> bool:
    return fields_used(a) <= set(u.fields)

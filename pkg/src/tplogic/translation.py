"""Mapping restricted separation logic into the Chalice subsyntax."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .properties import PropertyReport
from .semantics import equivalent
from .state import Universe
from .syntax import (
    Acc,
    Assertion,
    Eq,
    FieldRead,
    Imp,
    PointsTo,
    Star,
    is_sl_bool,
    is_restricted_sl,
    render,
    substitute,
    witnessed_existential,
)


class NotRestrictedSL(ValueError):
    pass


class NotSupported(NotImplementedError):
    """The IDF to SL direction has no sound syntactic translation."""


@dataclass(frozen=True)
class TranslationResult:
    source: Assertion
    target: Assertion
    equivalence_checked_on: Optional[Universe] = None


def _points_to(a: PointsTo) -> Assertion:
    return Star(Acc(a.obj, a.field, a.perm), Eq(FieldRead(a.obj, a.field), a.value))


def _translate(a: Assertion) -> Assertion:
    if is_sl_bool(a):
        return a
    if isinstance(a, PointsTo):
        return _points_to(a)
    if isinstance(a, Star):
        return Star(_translate(a.left), _translate(a.right))
    if isinstance(a, Imp):
        return Imp(a.left, _translate(a.right))
    w = witnessed_existential(a)
    if w is not None:
        head, rest = w
        acc = Acc(head.obj, head.field, head.perm)
        if rest is None:
            return acc
        return Star(acc, substitute(_translate(rest), a.var, FieldRead(head.obj, head.field)))
    raise NotRestrictedSL(f"not restricted separation logic: {render(a)}")


def sl_to_chalice(a: Assertion) -> TranslationResult:
    if not is_restricted_sl(a):
        raise NotRestrictedSL(f"not restricted separation logic: {render(a)}")
    return TranslationResult(a, _translate(a))


def chalice_to_sl(a: Assertion):
    raise NotSupported("translating implicit dynamic frames into separation logic is not supported")


def check_translation(a: Assertion, u: Universe) -> PropertyReport:
    """The source and its translation are equivalent on u."""
    target = sl_to_chalice(a).target
    v = equivalent(a, target, u)
    return PropertyReport("translation", v.holds, v.witness, detail=v.detail)

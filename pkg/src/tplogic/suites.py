"""Theorem suites: each turns one result about the logic into an exhaustive check.

A suite enumerates assertions with an :class:`EnumeratorSpec`, evaluates the
statement at every state of the universe and collects failures with their
smallest witness. Every suite builds its own engines, so no suite can observe
another's memo tables.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .enumerate import EnumeratorSpec, enumerate_assertions
from .properties import (
    NotChaliceFragment,
    deframed_table,
    eframed_table,
    framed_condition,
    intuitionistic_bad,
    self_framing_bad,
)
from .semantics import first_true
from .semantics.oracle import SLEngine
from .semantics.tables import TableEngine
from .state import Universe, default_universe, render_state, render_value
from .syntax import (
    And,
    Assertion,
    Imp,
    Star,
    Wand,
    free_vars,
    is_chalice,
    is_chalice_bool,
    is_restricted_sl,
    parse_assertion,
    render,
)
from .translation import sl_to_chalice
from .vc import Exhale, Inhale, Interp, PredicateEvaluator, wp_ch, wp_sl


class UnknownSuite(KeyError):
    pass


MAX_RECORDED = 20


@dataclass
class Failure:
    assertions: Tuple[str, ...]
    witness: str = ""
    detail: str = ""

    def to_json(self) -> dict:
        return {"assertions": list(self.assertions), "witness": self.witness, "detail": self.detail}


@dataclass
class SuiteReport:
    name: str
    universe: str
    instances: int = 0
    states: int = 0
    failures: List[Failure] = field(default_factory=list)
    failure_count: int = 0
    duration: float = 0.0
    paranoid: bool = False
    minimality_checks: int = 0
    minimality_disagreements: int = 0
    notes: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failure_count == 0 and self.minimality_disagreements == 0

    def fail(self, assertions: Sequence[Assertion], witness: str = "", detail: str = ""):
        self.failure_count += 1
        if len(self.failures) < MAX_RECORDED:
            self.failures.append(Failure(tuple(render(a) for a in assertions), witness, detail))

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "universe": self.universe,
            "ok": self.ok,
            "instances": self.instances,
            "states": self.states,
            "failure_count": self.failure_count,
            "failures": [f.to_json() for f in sorted(self.failures, key=lambda f: (f.assertions, f.witness))],
            "duration_seconds": round(self.duration, 3),
            "paranoid": self.paranoid,
            "minimality_checks": self.minimality_checks,
            "minimality_disagreements": self.minimality_disagreements,
            "notes": list(self.notes),
        }

    def lines(self) -> List[str]:
        out = [
            f"suite {self.name} on universe {self.universe}: {'PASS' if self.ok else 'FAIL'}",
            f"  instances: {self.instances}",
            f"  states: {self.states}",
            f"  failures: {self.failure_count}",
        ]
        if self.paranoid:
            out.append(f"  minimality checks: {self.minimality_checks}")
            out.append(f"  minimality disagreements: {self.minimality_disagreements}")
        out += [f"  note: {n}" for n in self.notes]
        for f in sorted(self.failures, key=lambda f: (f.assertions, f.witness)):
            out.append(f"  failure: {' | '.join(f.assertions)}")
            if f.witness:
                out.append(f"    witness: {f.witness}")
            if f.detail:
                out.append(f"    detail: {f.detail}")
        out.append(f"  duration: {self.duration:.2f}s")
        return out


class Ctx:
    """Engines and bookkeeping for one suite run."""

    def __init__(self, u: Universe, paranoid: bool, report: SuiteReport):
        self.u = u
        self.eng = TableEngine(u, paranoid=paranoid)
        self.sp = self.eng.sp
        self.report = report
        self._sle: Optional[SLEngine] = None
        self._restrict: Optional[np.ndarray] = None

    @property
    def sle(self) -> SLEngine:
        if self._sle is None:
            self._sle = SLEngine(self.u)
        return self._sle

    @property
    def restrict_index(self) -> np.ndarray:
        if self._restrict is None:
            self._restrict = self.sle.restrict_index(self.sp.heap_vals, self.sp.mask_lvls)
        return self._restrict

    def envs(self, *assertions: Assertion):
        names = frozenset().union(*(free_vars(a) for a in assertions))
        return self.sp.envs(names)

    def witness(self, packed_or_bool: np.ndarray, env) -> Optional[str]:
        t = packed_or_bool
        if t.dtype == np.uint64:
            if not t.any():
                return None
            t = self.eng.unpack(t)
        hit = first_true(t)
        if hit is None:
            return None
        return render_state(self.sp.state(hit[0], hit[1], env), self.u)

    def first_bad(self, bad_of: Callable, *assertions: Assertion) -> Optional[str]:
        """Smallest witness over all environments of the assertions' free variables."""
        for env in self.envs(*assertions):
            self.report.states += self.sp.NM * self.sp.NH
            w = self.witness(bad_of(env), env)
            if w is not None:
                return w
        return None

    def holds_everywhere(self, bad_of: Callable, *assertions: Assertion) -> bool:
        return self.first_bad(bad_of, *assertions) is None


# -- default enumerations -------------------------------------------------------------------

SL_ATOMS = (
    "x == y",
    "x == null",
    "x.f |->[1/2] 5",
    "x.f |->[1] y",
    "y.g |->[1/2] _",
    "y.f |->[1] 0",
)

TPL_ATOMS = (
    "x.f == 5",
    "x == y",
    "acc(x.f, 1/2)",
    "acc(y.f, 1)",
    "x.f |->[1] y",
    "y.g |->[1/2] _",
    "x.f != y.g",
)

PURE_ATOMS = ("x.f == 5", "x == y", "y.f != null", "x.f == y.f", "true", "false")

CONSEQUENTS = ("acc(x.f, 1/2)", "x.f |->[1] 5", "y.f == 0", "acc(y.f, 1) * x.f == 5")

SELF_FRAMING_ATOMS = (
    "x == y",
    "acc(x.f, 1/2)",
    "x.f |->[1] 5",
    "acc(y.f, 1) * y.f == x",
    "y.g |->[1/2] _",
    "acc(x.f, 1/2) || acc(y.f, 1/2)",
    "x == null ==> acc(y.g, 1)",
    "acc(x.f, 1/2) && y.f |->[1/2] 0",
    "x.f == 5",
)

LAW_ATOMS = (
    "acc(x.f, 1/2)",
    "x.f == 1",
    "acc(x.f, 1) || acc(y.f, 1)",
    "x.f |->[1/2] y",
    "y == null",
)

CHALICE_ATOMS = (
    "x == y",
    "x.f == 5",
    "x.f != y",
    "acc(x.f, 1/2)",
    "acc(y.f, 1)",
    "acc(x.g, 1)",
)

CURRY_OPERANDS = 8

VC_POSTS = ("true", "x.f == 5", "acc(x.f, 1)", "acc(y.f, 1/2) * y.f == x", "x.f |->[1/2] 5 --* acc(y.g, 1)")

RESTRICTED_ATOMS = (
    "x == y",
    "x != null",
    "x.f |->[1/2] 5",
    "y.g |->[1] x",
    "x.f |->[1] _",
    "v == 5",
    "y.f |->[1/2] v",
)

E2E_RESTRICTED = (
    "x != null",
    "x.f |->[1/2] 5",
    "y.g |->[1] x",
    "x.f |->[1] _",
    "v == 5",
)

E2E_POSTS = (
    "x == y",
    "x.f |->[1] 5",
    "y.g |->[1/2] _",
    "x.f |->[1/2] y --* y.g |->[1] 5",
    "x == y || y.f |->[1] _",
    "x.f |->[1/2] 5 && (x == null ==> y.g |->[1/2] x)",
)


def _spec(subsyntax: str, atoms, depth: int = 2, **kw) -> EnumeratorSpec:
    return EnumeratorSpec(max_depth=depth, subsyntax=subsyntax, atoms=tuple(atoms), **kw)


DEFAULT_SPECS: Dict[str, EnumeratorSpec] = {
    "oracle-agreement": _spec("sl", SL_ATOMS),
    "weakening": _spec("tpl", TPL_ATOMS),
    "minimisation": _spec("tpl", TPL_ATOMS),
    "boolean-conditional": _spec("tpl", PURE_ATOMS, connectives=("*", "&&", "||", "==>")),
    "simplified-conditionals": _spec("tpl", SELF_FRAMING_ATOMS, depth=1),
    "sl-laws": _spec("tpl", LAW_ATOMS, depth=1),
    "framing": _spec("sl", SL_ATOMS),
    "curry-framed": _spec("chalice", CHALICE_ATOMS, connectives=("*",)),
    "vc-exhale": _spec("chalice", CHALICE_ATOMS),
    "vc-inhale": _spec("chalice", CHALICE_ATOMS),
    "vc-remark": _spec("chalice", ("x.f == 3 * acc(x.f, 1)",), depth=1, variables=("x",)),
    "translation": _spec("restricted_sl", RESTRICTED_ATOMS),
    "end-to-end": _spec("restricted_sl", E2E_RESTRICTED),
}

SUITE_NAMES = tuple(DEFAULT_SPECS)


def _parse_all(texts: Iterable[str]) -> List[Assertion]:
    return [parse_assertion(t) for t in texts]


# -- suite bodies ------------------------------------------------------------------------------


def _oracle_agreement(c: Ctx, spec: EnumeratorSpec):
    """Total-heap semantics agrees with the partial-heap semantics on restricted heaps."""
    for a in enumerate_assertions(spec, c.u):
        c.report.instances += 1
        ri = c.restrict_index
        w = c.first_bad(lambda env: c.eng.bool_table(a, env) ^ c.sle.table(a, env)[ri], a)
        if w:
            c.report.fail([a], w, "total-heap and partial-heap verdicts differ")


def _weakening(c: Ctx, spec: EnumeratorSpec):
    """Adding permissions preserves truth."""
    pr = c.sp.pairs
    for a in enumerate_assertions(spec, c.u):
        c.report.instances += 1

        def bad(env):
            t = c.eng.table(a, env)
            return np.bitwise_or.reduceat(t[pr.p1] & ~t[pr.ps], pr.p1_starts, axis=0)

        w = c.first_bad(bad, a)
        if w:
            c.report.fail([a], w, "true here, false after adding some permission")


def _minimisation(c: Ctx, spec: EnumeratorSpec):
    """Any satisfying extension contains a minimal one."""
    sp, pr, eng = c.sp, c.sp.pairs, c.eng
    for a in enumerate_assertions(spec, c.u):
        c.report.instances += 1

        def bad(env):
            t = eng.table(a, env)
            grid = np.zeros((sp.NM, sp.NM, eng.W), dtype=np.uint64)
            grid[pr.p1, pr.p2] = eng.minimal_pairs(t)
            eng._zeta(grid.reshape((sp.NM,) + (sp.K,) * sp.n + (eng.W,)), 1)
            missing = t[pr.ps] & ~grid[pr.p1, pr.p2]
            return np.bitwise_or.reduceat(missing, pr.p1_starts, axis=0)

        w = c.first_bad(bad, a)
        if w:
            c.report.fail([a], w, "a satisfying extension without a minimal sub-extension")


def _is_pure(c: Ctx, a: Assertion) -> bool:
    return c.holds_everywhere(lambda env: (lambda t: t & ~t[0][None, :])(c.eng.table(a, env)), a)


def _is_self_framing(c: Ctx, a: Assertion) -> bool:
    return c.holds_everywhere(lambda env: self_framing_bad(c.eng, c.eng.table(a, env)), a)


def _is_supported(c: Ctx, a: Assertion) -> bool:
    glb = c.sp.glb_index

    def bad(env):
        t = c.eng.table(a, env)
        acc = np.zeros_like(t)
        for m1 in np.flatnonzero(t.any(axis=1)):
            acc |= t[m1][None, :] & t & ~t[glb[m1]]
        return acc

    return c.holds_everywhere(bad, a)


def _boolean_conditional(c: Ctx, spec: EnumeratorSpec):
    """A pure antecedent makes the implication a plain boolean conditional."""
    eng = c.eng
    posts = _parse_all(CONSEQUENTS)
    for a1 in enumerate_assertions(spec, c.u):
        if not _is_pure(c, a1):
            continue
        for a2 in posts:
            c.report.instances += 1
            imp = Imp(a1, a2)
            w = c.first_bad(
                lambda env: eng.table(imp, env) ^ ((~eng.table(a1, env) | eng.table(a2, env)) & eng.valid), imp
            )
            if w:
                c.report.fail([a1, a2], w, "implication differs from the boolean conditional")


def _simplified_conditionals(c: Ctx, spec: EnumeratorSpec):
    """For self-framing operands, minimal extensions can be dropped, with local or global havoc."""
    eng = c.eng
    framed = [a for a in enumerate_assertions(spec, c.u) if _is_self_framing(c, a)]
    c.report.notes.append(f"{len(framed)} self-framing operands")
    for a1, a2 in itertools.product(framed, repeat=2):
        c.report.instances += 1
        for label, op, alt in (("==>", Imp, eng.imp_unfiltered), ("--*", Wand, eng.wand_unfiltered)):
            for region in ("new_rd", "unread1"):
                full = op(a1, a2)

                def bad(env):
                    t1, t2 = eng.table(a1, env), eng.table(a2, env)
                    return eng.table(full, env) ^ alt(t1, t2, region)

                w = c.first_bad(bad, full)
                if w:
                    kind = "local" if region == "new_rd" else "global"
                    c.report.fail([a1, a2], w, f"{label} differs from the unfiltered {kind} formulation")


COUNTER_A1 = "x.f == 1 --* (acc(x.f, 1) --* false)"
COUNTER_A2 = "x.f == 1 * acc(x.f, 1) --* false"


def _sl_laws(c: Ctx, spec: EnumeratorSpec):
    eng, pr = c.eng, c.sp.pairs
    atoms = enumerate_assertions(spec, c.u)
    sup = {a: _is_supported(c, a) for a in atoms}
    sf = {}

    def self_framing(a):
        if a not in sf:
            sf[a] = _is_self_framing(c, a)
        return sf[a]

    def entails(x: Assertion, y: Assertion) -> Optional[str]:
        return c.first_bad(lambda env: eng.table(x, env) & ~eng.table(y, env), x, y)

    framed_memo: Dict[tuple, np.ndarray] = {}

    def framed(side: Callable, a: Assertion, env) -> np.ndarray:
        key = (side, a, tuple(sorted((k, env[k]) for k in free_vars(a))))
        if key not in framed_memo:
            framed_memo[key] = side(eng, eng.table(a, env))
        return framed_memo[key]

    def included(side: Callable, x: Assertion, y: Assertion, guard: Assertion) -> Optional[str]:
        return c.first_bad(lambda env: framed(side, guard, env) & eng.table(x, env) & ~eng.table(y, env), x, y, guard)

    for a1, a2 in itertools.product(atoms, repeat=2):
        c.report.instances += 1
        for name, lhs in (("(1)", Star(a1, Wand(a1, a2))), ("(2)", And(a1, Imp(a1, a2)))):
            w = entails(lhs, a2)
            if w:
                c.report.fail([a1, a2], w, f"law {name} fails")
    for a1, a2, a3 in itertools.product(atoms, repeat=3):
        c.report.instances += 1
        curried, uncurried = Wand(a1, Wand(a2, a3)), Wand(Star(a1, a2), a3)
        icurried, iuncurried = Imp(a1, Imp(a2, a3)), Imp(And(a1, a2), a3)
        checks = [("(3a)", deframed_table, curried, uncurried), ("(4a)", eframed_table, icurried, iuncurried)]
        if sup[a1] and sup[a2]:
            checks += [("(3b)", deframed_table, uncurried, curried), ("(4b)", eframed_table, iuncurried, icurried)]
        if self_framing(Star(a1, a2)) and self_framing(a3):
            checks.append(("(3c)", deframed_table, uncurried, curried))
        if self_framing(And(a1, a2)) and self_framing(a3):
            checks.append(("(4c)", eframed_table, iuncurried, icurried))
        for name, side, x, y in checks:
            w = included(side, x, y, a1)
            if w:
                c.report.fail([a1, a2, a3], w, f"law {name} fails")
        if entails(a1, Wand(a2, a3)) is None:
            w = entails(Star(a1, a2), a3)
            if w:
                c.report.fail([a1, a2, a3], w, "law (5) fails")
        if self_framing(a1) and entails(Star(a1, a2), a3) is None:
            w = entails(a1, Wand(a2, a3))
            if w:
                c.report.fail([a1, a2, a3], w, "law (6) fails")
    _counterexample_pair(c)


def _counterexample_pair(c: Ctx):
    """The two curried wands differ; the witness satisfies the first only, with x.f != 1 and no permission at x.f."""
    eng, sp = c.eng, c.sp
    a1, a2 = parse_assertion(COUNTER_A1), parse_assertion(COUNTER_A2)
    c.report.instances += 1
    one = sp.value_index.get(1)
    for env in c.envs(a1, a2):
        c.report.states += sp.NM * sp.NH
        t1, t2 = eng.bool_table(a1, env), eng.bool_table(a2, env)
        hit = first_true(t1 ^ t2)
        if hit is None:
            continue
        mi, hi = hit
        loc = int(sp.objloc[env["x"], sp.field_index["f"]])
        shape_ok = (
            bool(t1[mi, hi])
            and not t2[mi, hi]
            and loc >= 0
            and int(sp.heap_vals[hi, loc]) != one
            and int(sp.mask_lvls[mi, loc]) == 0
        )
        w = render_state(sp.state(mi, hi, env), c.u)
        if shape_ok:
            c.report.notes.append(f"counterexample pair inequivalent as expected; witness {w}")
        else:
            c.report.fail([a1, a2], w, "witness does not have the documented shape")
        return
    c.report.fail([a1, a2], "", "expected the pair to be inequivalent, no witness found")


FRAMING_EXPECTED = (
    ("acc(x.f, 1/2) * x.f == 5", True),
    ("x.f == 5 * acc(x.f, 1/2)", False),
    ("acc(x.f, 1) * x == y * y.f == 5", True),
)


def _framing(c: Ctx, spec: EnumeratorSpec):
    eng = c.eng
    for a in enumerate_assertions(spec, c.u):
        c.report.instances += 1
        w = c.first_bad(lambda env: self_framing_bad(eng, eng.table(a, env)), a)
        if w:
            c.report.fail([a], w, "separation logic assertion is not self-framing")
        w = c.first_bad(lambda env: intuitionistic_bad(eng, eng.table(a, env)), a)
        if w:
            c.report.fail([a], w, "separation logic assertion is not intuitionistic")
    for text, expected in FRAMING_EXPECTED:
        c.report.instances += 1
        a = parse_assertion(text)
        f = framed_condition(a)
        w = c.first_bad(lambda env: ~eng.table(f, env) & eng.valid, f)
        got = w is None
        if got != expected:
            c.report.fail([a], w or "", f"syntactic self-framing expected {expected}, got {got}")
        else:
            c.report.notes.append(f"{text}: syntactically self-framing = {got}")


def _curry_framed(c: Ctx, spec: EnumeratorSpec):
    """With framed(p1), uncurried and curried wands over Chalice formulas coincide."""
    eng = c.eng
    ps = enumerate_assertions(spec, c.u)
    posts = _parse_all(VC_POSTS)
    for p in ps:
        c.report.instances += 1
        f = framed_condition(p)
        if is_chalice_bool(p) and not _is_pure(c, p):
            c.report.fail([p], "", "Chalice boolean expression is not pure")
        if not _is_supported(c, p):
            c.report.fail([p], "", "Chalice formula is not supported")
        w = c.first_bad(lambda env: eng.table(f, env) & ~deframed_table(eng, eng.table(p, env)), f, p)
        if w:
            c.report.fail([p], w, "framed(p) holds outside deframed(p)")
        if c.holds_everywhere(lambda env: ~eng.table(f, env) & eng.valid, f) and not _is_self_framing(c, p):
            c.report.fail([p], "", "syntactically but not semantically self-framing")
    for p1, p2 in itertools.product(ps[:CURRY_OPERANDS], repeat=2):
        for a in posts:
            c.report.instances += 1
            f1 = framed_condition(p1)
            curried, uncurried = Wand(p1, Wand(p2, a)), Wand(Star(p1, p2), a)
            w = c.first_bad(
                lambda env: eng.table(f1, env) & (eng.table(curried, env) ^ eng.table(uncurried, env)),
                f1,
                curried,
            )
            if w:
                c.report.fail([p1, p2, a], w, "curried and uncurried wands differ under framed(p1)")


def _vc(c: Ctx, spec: EnumeratorSpec, inhale: bool):
    eng = c.eng
    posts = _parse_all(VC_POSTS[1:] if inhale else VC_POSTS)
    skipped = 0
    for p in enumerate_assertions(spec, c.u):
        if inhale:
            f = framed_condition(p)
            if not c.holds_everywhere(lambda env: ~eng.table(f, env) & eng.valid, f):
                skipped += 1
                continue
        cmd = Inhale(p) if inhale else Exhale(p)
        for a in posts:
            c.report.instances += 1
            sl, ch = wp_sl(cmd, a), wp_ch(cmd, Interp(a))

            def bad(env):
                return eng.bool_table(sl, env) ^ PredicateEvaluator(c.u, env, eng).table(ch)

            w = c.first_bad(bad, sl)
            if w:
                c.report.fail([p, a], w, "wp_sl and wp_ch disagree")
    if inhale:
        c.report.notes.append(f"{skipped} payloads skipped as not syntactically self-framing")


def _vc_remark(c: Ctx, spec: EnumeratorSpec):
    """Inhaling x.f == 3 * acc(x.f, 1) loses the fact; the reordered inhale keeps it."""
    sp, eng = c.sp, c.eng
    post = Interp(parse_assertion("x.f == 3"))
    bad_order = Inhale(parse_assertion("x.f == 3 * acc(x.f, 1)"))
    good_order = Inhale(parse_assertion("acc(x.f, 1) * x.f == 3"))
    three = sp.value_index[3]
    fi = sp.field_index["f"]
    for env in sp.envs(["x"]):
        loc = int(sp.objloc[env["x"], fi])
        if loc < 0:
            continue
        ev = PredicateEvaluator(c.u, env, eng)
        t_bad, t_good = ev.table(wp_ch(bad_order, post)), ev.table(wp_ch(good_order, post))
        zero = sp.mask_lvls[:, loc] == 0
        expected = np.broadcast_to(sp.heap_vals[:, loc] != three, (int(zero.sum()), sp.NH))
        c.report.instances += 1
        c.report.states += int(zero.sum()) * sp.NH
        diff = np.zeros((sp.NM, sp.NH), dtype=bool)
        diff[zero] = t_bad[zero] ^ expected
        w = c.witness(diff, env)
        if w:
            c.report.fail([bad_order.assertion], w, "wp differs from the heap value at x.f being other than 3")
        diff = np.zeros((sp.NM, sp.NH), dtype=bool)
        diff[zero] = ~t_good[zero]
        w = c.witness(diff, env)
        if w:
            c.report.fail([good_order.assertion], w, "reordered inhale does not give true")
        held = ~zero
        c.report.notes.append(
            f"x={render_value(c.u.values[env['x']])}: with permission already held, "
            f"first order gives true at {int(t_bad[held].sum())} of {int(held.sum()) * sp.NH} states"
        )
    if not c.report.failure_count:
        c.report.notes.append("order-sensitivity witness confirmed at every zero-mask state")


def _translation(c: Ctx, spec: EnumeratorSpec):
    eng = c.eng
    for a in enumerate_assertions(spec, c.u):
        c.report.instances += 1
        target = sl_to_chalice(a).target
        w = c.first_bad(lambda env: eng.table(a, env) ^ eng.table(target, env), a, target)
        if w:
            c.report.fail([a, target], w, "translation changes the meaning")
        f = framed_condition(target)
        w = c.first_bad(lambda env: ~eng.table(f, env) & eng.valid, f)
        if w:
            c.report.fail([target], w, "translation is not syntactically self-framing")


def _end_to_end(c: Ctx, spec: EnumeratorSpec):
    """Partial-heap wp_sl of (a, a') agrees with Chalice wp of the translations."""
    eng, ri = c.eng, c.restrict_index
    posts = _parse_all(E2E_POSTS)
    for a in enumerate_assertions(spec, c.u):
        target = sl_to_chalice(a).target
        for a2 in posts:
            post = sl_to_chalice(a2).target if is_restricted_sl(a2) else a2
            for kind in (Exhale, Inhale):
                c.report.instances += 1
                sl = wp_sl(kind(a), a2)
                ch = wp_ch(kind(target), Interp(post))

                def bad(env):
                    return c.sle.table(sl, env)[ri] ^ PredicateEvaluator(c.u, env, eng).table(ch)

                w = c.first_bad(bad, sl, post)
                if w:
                    c.report.fail([a, a2], w, f"{kind.__name__.lower()}: partial-heap and Chalice verdicts differ")


SUITES: Dict[str, Callable[[Ctx, EnumeratorSpec], None]] = {
    "oracle-agreement": _oracle_agreement,
    "weakening": _weakening,
    "minimisation": _minimisation,
    "boolean-conditional": _boolean_conditional,
    "simplified-conditionals": _simplified_conditionals,
    "sl-laws": _sl_laws,
    "framing": _framing,
    "curry-framed": _curry_framed,
    "vc-exhale": lambda c, s: _vc(c, s, inhale=False),
    "vc-inhale": lambda c, s: _vc(c, s, inhale=True),
    "vc-remark": _vc_remark,
    "translation": _translation,
    "end-to-end": _end_to_end,
}


def run_suite(
    name: str,
    spec: Optional[EnumeratorSpec] = None,
    u: Optional[Universe] = None,
    paranoid: bool = False,
    universe_label: str = "U0",
) -> SuiteReport:
    if name not in SUITES:
        raise UnknownSuite(name)
    u = u or default_universe()
    spec = spec or DEFAULT_SPECS[name]
    report = SuiteReport(name, universe_label, paranoid=paranoid)
    ctx = Ctx(u, paranoid, report)
    start = time.perf_counter()
    SUITES[name](ctx, spec)
    report.duration = time.perf_counter() - start
    report.minimality_checks = ctx.eng.minimality_checks
    report.minimality_disagreements = ctx.eng.minimality_disagreements
    return report

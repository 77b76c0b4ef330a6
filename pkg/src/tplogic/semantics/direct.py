"""Literal, state-at-a-time semantics.

These functions follow the defining clauses one by one, enumerating splittings
and extensions explicitly. They are exponential and meant for small universes,
where they serve as the reference for the vectorized engines.
"""

from __future__ import annotations

import itertools
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterator, List, Optional

from ..state import (
    NULL,
    Environment,
    FULL,
    Location,
    Obj,
    PartialHeap,
    PermMask,
    State,
    TotalHeap,
    Universe,
    Value,
    mask_combine,
    mask_compatible,
    partial_combine,
    partial_compatible,
    rds,
)
from ..syntax import (
    Acc,
    AccAny,
    And,
    Assertion,
    Eq,
    Exists,
    Expr,
    FalseLit,
    FieldRead,
    Imp,
    IntLit,
    Neq,
    NullLit,
    Or,
    PointsTo,
    Star,
    TrueLit,
    Var,
    Wand,
    is_sl_with_neq,
)
from .errors import NonObjectDeref, NotSLFragment, UnboundVar


class ExtensionKind(Enum):
    LocalExts = "local"
    GlobalExts = "global"
    LocalDisjExts = "local-disjoint"
    GlobalDisjExts = "global-disjoint"


# -- expressions ---------------------------------------------------------------


def eval_expr(e: Expr, h: Optional[TotalHeap], env: Environment) -> Value:
    if isinstance(e, Var):
        if e.name not in env:
            raise UnboundVar(e.name)
        return env[e.name]
    if isinstance(e, NullLit):
        return NULL
    if isinstance(e, IntLit):
        return e.value
    o = eval_expr(e.obj, h, env)
    if not isinstance(o, Obj) or h is None:
        raise NonObjectDeref(f"cannot read field {e.field} of {o!r}")
    loc = Location(o.name, e.field)
    if loc not in h:
        raise NonObjectDeref(f"no location {loc}")
    return h[loc]


def _target(e: Expr, field: str, h: TotalHeap, env: Environment) -> Optional[Location]:
    o = eval_expr(e, h, env)
    if not isinstance(o, Obj):
        raise NonObjectDeref(f"cannot read field {field} of {o!r}")
    return Location(o.name, field)


# -- masks and extensions --------------------------------------------------------


def grid_masks(u: Universe) -> Iterator[PermMask]:
    """Every grid mask, in the universe's index order."""
    grid = u.grid()
    for levels in itertools.product(grid, repeat=len(u.locations)):
        yield PermMask(zip(u.locations, levels))


def grid_heaps(u: Universe) -> Iterator[TotalHeap]:
    for vals in itertools.product(u.values, repeat=len(u.locations)):
        yield TotalHeap(dict(zip(u.locations, vals)))


def _havocs(h: TotalHeap, free: List[Location], u: Universe) -> Iterator[TotalHeap]:
    for vals in itertools.product(u.values, repeat=len(free)):
        d = dict(h.items())
        d.update(zip(free, vals))
        yield TotalHeap(d)


def enumerate_extensions(s: State, kind: ExtensionKind, u: Universe) -> List[State]:
    base_rd = rds(s.mask)
    out = []
    for extra in grid_masks(u):
        if not mask_compatible(s.mask, extra):
            continue
        if kind in (ExtensionKind.LocalExts, ExtensionKind.LocalDisjExts):
            new = rds(extra) - base_rd
            free = [loc for loc in u.locations if loc in new]
        else:
            free = [loc for loc in u.locations if loc not in base_rd]
        disjoint = kind in (ExtensionKind.LocalDisjExts, ExtensionKind.GlobalDisjExts)
        mask = extra if disjoint else mask_combine(s.mask, extra)
        for h2 in _havocs(s.heap, free, u):
            out.append(State(h2, mask, s.env))
    return out


def submasks(p: PermMask, u: Universe) -> Iterator[PermMask]:
    locs = [loc for loc in u.locations if p[loc] > 0]
    choices = [[q for q in u.grid() if q <= p[loc]] for loc in locs]
    for levels in itertools.product(*choices):
        yield PermMask(zip(locs, levels))


Sat = Callable[[State, Assertion], bool]


def is_minimal_extension(
    h: TotalHeap,
    base: PermMask,
    env: Environment,
    extra: PermMask,
    a: Assertion,
    u: Universe,
    exhaustive: bool = False,
    sat: Optional[Sat] = None,
) -> bool:
    """`extra` is a minimal permission extension of (h, base, env) to satisfy `a`."""
    if sat is None:
        sat = lambda s, b: tpl_sat_direct(s, b, u)
    if not sat(State(h, mask_combine(base, extra), env), a):
        return False
    footprint = rds(extra)
    if exhaustive:
        for smaller in submasks(extra, u):
            if rds(smaller) < footprint and sat(State(h, mask_combine(base, smaller), env), a):
                return False
        return True
    for loc in u.locations:
        if loc in footprint:
            dropped = PermMask({k: q for k, q in extra.items() if k != loc})
            if sat(State(h, mask_combine(base, dropped), env), a):
                return False
    return True


# -- total heap semantics ------------------------------------------------------------


def tpl_sat_direct(s: State, a: Assertion, u: Universe, exhaustive: bool = False) -> bool:
    h, p, env = s.heap, s.mask, s.env

    def rec(b: Assertion, st: State = s) -> bool:
        return tpl_sat_direct(st, b, u, exhaustive)

    if isinstance(a, TrueLit):
        return True
    if isinstance(a, FalseLit):
        return False
    try:
        if isinstance(a, Eq):
            return eval_expr(a.left, h, env) == eval_expr(a.right, h, env)
        if isinstance(a, Neq):
            return eval_expr(a.left, h, env) != eval_expr(a.right, h, env)
        if isinstance(a, Acc):
            return p[_target(a.obj, a.field, h, env)] >= a.perm
        if isinstance(a, AccAny):
            return p[_target(a.obj, a.field, h, env)] > 0
        if isinstance(a, PointsTo):
            loc = _target(a.obj, a.field, h, env)
            return p[loc] >= a.perm and h[loc] == eval_expr(a.value, h, env)
    except NonObjectDeref:
        return False
    if isinstance(a, And):
        return rec(a.left) and rec(a.right)
    if isinstance(a, Or):
        return rec(a.left) or rec(a.right)
    if isinstance(a, Star):
        for p1 in submasks(p, u):
            p2 = PermMask({loc: p[loc] - p1[loc] for loc in p})
            if rec(a.left, State(h, p1, env)) and rec(a.right, State(h, p2, env)):
                return True
        return False
    if isinstance(a, Imp):
        sat = lambda st, b: tpl_sat_direct(st, b, u, exhaustive)
        for ext in enumerate_extensions(s, ExtensionKind.LocalDisjExts, u):
            extra = ext.mask
            if is_minimal_extension(ext.heap, p, env, extra, a.left, u, exhaustive, sat):
                if not rec(a.right, State(ext.heap, mask_combine(p, extra), env)):
                    return False
        return True
    if isinstance(a, Wand):
        sat = lambda st, b: tpl_sat_direct(st, b, u, exhaustive)
        for ext in enumerate_extensions(s, ExtensionKind.LocalDisjExts, u):
            if is_minimal_extension(ext.heap, PermMask(), env, ext.mask, a.left, u, exhaustive, sat):
                if not rec(a.right, State(ext.heap, mask_combine(p, ext.mask), env)):
                    return False
        return True
    if isinstance(a, Exists):
        return any(rec(a.body, State(h, p, env.bind(a.var, v))) for v in u.values)
    raise TypeError(f"not an assertion: {a!r}")


# -- partial heap semantics -------------------------------------------------------------


def grid_partial_heaps(u: Universe) -> Iterator[PartialHeap]:
    cells = [None] + [(v, q) for v in u.values for q in u.grid()[1:]]
    for combo in itertools.product(cells, repeat=len(u.locations)):
        yield PartialHeap({loc: c for loc, c in zip(u.locations, combo) if c is not None})


def splittings(h: PartialHeap, u: Universe) -> Iterator[tuple]:
    """All (h1, h2) on the grid with h1 * h2 = h."""
    locs = sorted(h)
    options = []
    for loc in locs:
        v, q = h[loc]
        opts = [(None, (v, q)), ((v, q), None)]
        for q1 in u.grid()[1:]:
            if 0 < q1 < q:
                opts.append(((v, q1), (v, q - q1)))
        options.append(opts)
    for combo in itertools.product(*options):
        h1 = {loc: c[0] for loc, c in zip(locs, combo) if c[0] is not None}
        h2 = {loc: c[1] for loc, c in zip(locs, combo) if c[1] is not None}
        yield PartialHeap(h1), PartialHeap(h2)


def _sl_expr(e: Expr, env: Environment) -> Value:
    if isinstance(e, FieldRead):
        raise NotSLFragment("field reads are not separation logic expressions")
    return eval_expr(e, None, env)


def sl_sat_direct(h: PartialHeap, env: Environment, a: Assertion, u: Universe, check: bool = True) -> bool:
    if check and not is_sl_with_neq(a):
        raise NotSLFragment(f"not a separation logic assertion")

    def rec(b, hh=h, ee=env):
        return sl_sat_direct(hh, ee, b, u, check=False)

    if isinstance(a, Eq):
        return _sl_expr(a.left, env) == _sl_expr(a.right, env)
    if isinstance(a, Neq):
        return _sl_expr(a.left, env) != _sl_expr(a.right, env)
    if isinstance(a, PointsTo):
        o = _sl_expr(a.obj, env)
        if not isinstance(o, Obj):
            return False
        loc = Location(o.name, a.field)
        if loc not in h:
            return False
        v, q = h[loc]
        return q >= a.perm and v == _sl_expr(a.value, env)
    if isinstance(a, Star):
        return any(rec(a.left, h1) and rec(a.right, h2) for h1, h2 in splittings(h, u))
    if isinstance(a, And):
        return rec(a.left) and rec(a.right)
    if isinstance(a, Or):
        return rec(a.left) or rec(a.right)
    if isinstance(a, Wand):
        for h2 in grid_partial_heaps(u):
            if partial_compatible(h, h2) and rec(a.left, h2) and not rec(a.right, partial_combine(h, h2)):
                return False
        return True
    if isinstance(a, Imp):
        for h2 in grid_partial_heaps(u):
            if partial_compatible(h, h2):
                hh = partial_combine(h, h2)
                if rec(a.left, hh) and not rec(a.right, hh):
                    return False
        return True
    if isinstance(a, Exists):
        return any(rec(a.body, h, env.bind(a.var, v)) for v in u.values)
    raise NotSLFragment(f"unsupported connective {type(a).__name__}")

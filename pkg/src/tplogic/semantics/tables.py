"""Vectorized total-heap semantics.

For an assertion and an environment the engine computes the full truth table
``T[m, h]`` over every mask and heap of the universe. Each connective is one
array operation on the tables of its operands, so a quantifier over state
extensions becomes a gather over mask pairs followed by a projection over the
heap locations that the extension may havoc.
"""

from __future__ import annotations

from collections import OrderedDict
from typing import Dict, Optional, Tuple, Union

import numpy as np

from ..space import Space
from .errors import UnboundVar
from ..state import Environment, State, Universe
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
    free_vars,
)

ERR = -1

EvalResult = Union[int, np.ndarray]


def project_any(bad: np.ndarray, groups, V: int, n: int) -> np.ndarray:
    """For each row r, OR `bad[r]` over the heap axes in its region bitmask.

    Result[r, h] is true iff some heap agreeing with h outside the region of r
    has bad[r, .] true. `groups` lists (bitmask, rows) pairs.
    """
    out = np.empty_like(bad)
    shape = (V,) * n
    for bm, rows in groups:
        sub = bad[rows]
        if bm == 0:
            out[rows] = sub
            continue
        axes = tuple(1 + l for l in range(n) if bm >> l & 1)
        cube = sub.reshape((len(rows),) + shape)
        red = cube.any(axis=axes, keepdims=True)
        out[rows] = np.broadcast_to(red, cube.shape).reshape(sub.shape)
    return out


class TableEngine:
    """Truth tables of assertions for one universe, memoized per (assertion, env)."""

    def __init__(self, u: Universe, paranoid: bool = False, cache_entries: int = 4096):
        self.u = u
        self.sp = Space(u)
        self.paranoid = paranoid
        self.cache_entries = cache_entries
        self._cache: "OrderedDict[tuple, np.ndarray]" = OrderedDict()
        self._foreign: Dict[object, int] = {}
        self.minimality_checks = 0
        self.W = (self.sp.NH + 63) // 64
        self.valid = self.pack(np.ones((1, self.sp.NH), dtype=bool))[0]
        self.minimality_disagreements = 0

    # -- expressions ------------------------------------------------------------

    def literal_code(self, v) -> int:
        """Code of a literal value; values outside the universe get fresh codes >= V."""
        idx = self.sp.value_index.get(v)
        if idx is not None:
            return idx
        if v not in self._foreign:
            self._foreign[v] = self.sp.V + len(self._foreign)
        return self._foreign[v]

    def eval_expr(self, e: Expr, env: Dict[str, int]) -> EvalResult:
        """Value code of `e` per heap (array of length NH) or a scalar if heap-independent."""
        if isinstance(e, Var):
            if e.name not in env:
                raise UnboundVar(e.name)
            return env[e.name]
        if isinstance(e, NullLit):
            return self.sp.null_index
        if isinstance(e, IntLit):
            return self.literal_code(e.value)
        loc = self.location(e.obj, e.field, env)
        return self.read(loc)

    def location(self, obj: Expr, field: str, env: Dict[str, int]) -> EvalResult:
        sp = self.sp
        fi = sp.field_index.get(field)
        o = self.eval_expr(obj, env)
        if fi is None:
            return ERR if np.isscalar(o) else np.full(sp.NH, ERR, dtype=np.int64)
        if np.isscalar(o):
            return int(sp.objloc[o, fi]) if 0 <= o < sp.V else ERR
        ok = (o >= 0) & (o < sp.V)
        return np.where(ok, sp.objloc[np.where(ok, o, 0), fi], ERR)

    def read(self, loc: EvalResult) -> EvalResult:
        sp = self.sp
        if np.isscalar(loc):
            if loc < 0:
                return ERR
            return sp.heap_vals[:, loc].astype(np.int64)
        ok = loc >= 0
        vals = sp.heap_vals[np.arange(sp.NH), np.where(ok, loc, 0)].astype(np.int64)
        return np.where(ok, vals, ERR)

    # -- packing ------------------------------------------------------------------

    def pack(self, b: np.ndarray) -> np.ndarray:
        """Pack a boolean (rows, NH) array into (rows, W) uint64 bitsets (little-endian bits)."""
        by = np.packbits(b, axis=1, bitorder="little")
        pad = self.W * 8 - by.shape[1]
        if pad:
            by = np.pad(by, ((0, 0), (0, pad)))
        return np.ascontiguousarray(by).view(np.uint64)

    def unpack(self, p: np.ndarray) -> np.ndarray:
        by = np.ascontiguousarray(p).view(np.uint8)
        return np.unpackbits(by, axis=1, count=self.sp.NH, bitorder="little").view(bool)

    def _const(self, value: bool) -> np.ndarray:
        row = self.valid if value else np.zeros(self.W, dtype=np.uint64)
        return np.tile(row, (self.sp.NM, 1))

    def _from_bool(self, b) -> np.ndarray:
        """Pack a boolean broadcastable to (NM, NH)."""
        sp = self.sp
        b = np.asarray(b, dtype=bool)
        if b.ndim == 0:
            return self._const(bool(b))
        if b.shape == (sp.NH,) or b.shape == (1, sp.NH):
            return np.tile(self.pack(b.reshape(1, sp.NH)), (sp.NM, 1))
        if b.shape == (sp.NM, 1):
            return np.where(b, self.valid[None, :], np.uint64(0))
        return self.pack(np.broadcast_to(b, (sp.NM, sp.NH)))

    # -- tables -------------------------------------------------------------------

    def _perm_bool(self, loc: EvalResult, lvl: int):
        sp = self.sp
        if np.isscalar(loc):
            if loc < 0:
                return np.bool_(False)
            return (sp.mask_lvls[:, loc] >= lvl)[:, None]
        ok = loc >= 0
        lv = sp.mask_lvls[:, np.where(ok, loc, 0)]
        return (lv >= lvl) & ok[None, :]

    def table(self, a: Assertion, env: Dict[str, int]) -> np.ndarray:
        """Packed truth table of `a`: shape (NM, W), bit h of row m is T[m, h]."""
        fv = free_vars(a)
        for x in fv:
            if x not in env:
                raise UnboundVar(x)
        key = (a, tuple(sorted((x, env[x]) for x in fv)))
        hit = self._cache.get(key)
        if hit is not None:
            self._cache.move_to_end(key)
            return hit
        t = self._compute(a, env)
        t.setflags(write=False)
        self._cache[key] = t
        if len(self._cache) > self.cache_entries:
            self._cache.popitem(last=False)
        return t

    def bool_table(self, a: Assertion, env: Dict[str, int]) -> np.ndarray:
        """Unpacked truth table, shape (NM, NH)."""
        return self.unpack(self.table(a, env))

    def _compute(self, a: Assertion, env: Dict[str, int]) -> np.ndarray:
        sp = self.sp
        if isinstance(a, TrueLit):
            return self._const(True)
        if isinstance(a, FalseLit):
            return self._const(False)
        if isinstance(a, (Eq, Neq)):
            v1 = np.asarray(self.eval_expr(a.left, env))
            v2 = np.asarray(self.eval_expr(a.right, env))
            ok = (v1 >= 0) & (v2 >= 0)
            return self._from_bool(ok & ((v1 == v2) if isinstance(a, Eq) else (v1 != v2)))
        if isinstance(a, Acc):
            return self._from_bool(self._perm_bool(self.location(a.obj, a.field, env), sp.level(a.perm)))
        if isinstance(a, AccAny):
            return self._from_bool(self._perm_bool(self.location(a.obj, a.field, env), 1))
        if isinstance(a, PointsTo):
            loc = self.location(a.obj, a.field, env)
            perm = self._perm_bool(loc, sp.level(a.perm))
            stored = np.asarray(self.read(loc))
            want = np.asarray(self.eval_expr(a.value, env))
            same = (stored >= 0) & (want >= 0) & (stored == want)
            if same.ndim == 1:
                same = same[None, :]
            return self._from_bool(perm & same)
        if isinstance(a, And):
            return self.table(a.left, env) & self.table(a.right, env)
        if isinstance(a, Or):
            return self.table(a.left, env) | self.table(a.right, env)
        if isinstance(a, Star):
            return self.star(self.table(a.left, env), self.table(a.right, env))
        if isinstance(a, Imp):
            return self.imp(self.table(a.left, env), self.table(a.right, env))
        if isinstance(a, Wand):
            return self.wand(self.table(a.left, env), self.table(a.right, env))
        if isinstance(a, Exists):
            out = self._const(False)
            for vi in range(sp.V):
                inner = dict(env)
                inner[a.var] = vi
                out |= self.table(a.body, inner)
            return out
        raise TypeError(f"not an assertion: {a!r}")

    # -- connectives on packed tables ------------------------------------------

    def star(self, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
        pr = self.sp.pairs
        both = t1[pr.p1_by_ps] & t2[pr.p2_by_ps]
        return np.bitwise_or.reduceat(both, pr.ps_starts, axis=0)

    def _single(self, t1: np.ndarray, drop: np.ndarray, hasw: np.ndarray) -> np.ndarray:
        out = t1[drop[:, 0]] & hasw[:, 0, None]
        for l in range(1, drop.shape[1]):
            out |= t1[drop[:, l]] & hasw[:, l, None]
        return out

    def _zeta(self, cube: np.ndarray, first_axis: int):
        """In-place prefix OR along each mask-level axis (``cube`` is a view with K-sized axes)."""
        sp = self.sp
        for l in range(sp.n):
            c = np.moveaxis(cube, first_axis + l, 0)
            for k in range(1, sp.K):
                c[k] |= c[k - 1]

    def smaller_exhaustive(self, t1: np.ndarray) -> np.ndarray:
        """Per pair row (m, m'): some m'' <= m' with rds(m'') strictly inside rds(m') satisfies t1 at m*m''."""
        sp, pr = self.sp, self.sp.pairs
        grid = np.zeros((sp.NM, sp.NM, self.W), dtype=np.uint64)
        grid[pr.p1, pr.p2] = t1[pr.ps]
        self._zeta(grid.reshape((sp.NM,) + (sp.K,) * sp.n + (self.W,)), 1)
        out = grid[pr.p1, pr.drop2[:, 0]] & pr.hasw[:, 0, None]
        for l in range(1, sp.n):
            out |= grid[pr.p1, pr.drop2[:, l]] & pr.hasw[:, l, None]
        return out

    def _record(self, sat: np.ndarray, single: np.ndarray, exh: np.ndarray):
        self.minimality_checks += int(np.bitwise_count(sat).sum())
        self.minimality_disagreements += int(np.bitwise_count(sat & (single ^ exh)).sum())

    def minimal_pairs(self, t1: np.ndarray) -> np.ndarray:
        """Bit (r, h): for pair row r = (m, m'), m' is a minimal extension of (h, m) for t1."""
        pr = self.sp.pairs
        sat = t1[pr.ps]
        single = self._single(t1, pr.drop, pr.hasw)
        if self.paranoid:
            self._record(sat, single, self.smaller_exhaustive(t1))
        return sat & ~single

    def minimal_from_empty(self, t1: np.ndarray) -> np.ndarray:
        """Bit (m', h): m' is a minimal extension of (h, empty mask) for t1."""
        sp = self.sp
        drop, hasw = sp.drop0w
        single = self._single(t1, drop, hasw)
        if self.paranoid:
            z = t1.copy()
            self._zeta(z.reshape((sp.K,) * sp.n + (self.W,)), 0)
            self._record(t1, single, self._single(z, drop, hasw))
        return t1 & ~single

    def project(self, bits: np.ndarray, groups) -> np.ndarray:
        """Row-wise havoc projection of packed `bits`.

        `groups` lists (bitmask, rows); result bit (r, h) is set iff bits[r, h'] is
        set for some h' that differs from h only at the locations in r's bitmask.
        """
        sp = self.sp
        live = bits.any(axis=1)
        if not live.any():
            return bits
        out = bits.copy()
        for bm, rows in groups:
            if bm == 0:
                continue
            rows = rows[live[rows]]
            if rows.size:
                out[rows] = self.pack(project_any(self.unpack(bits[rows]), [(bm, np.arange(rows.size))], sp.V, sp.n))
        return out

    def _forall_pairs(self, bad: np.ndarray, region: str) -> np.ndarray:
        """Bit (m, h) set iff no pair row (m, m') has a bad bit at any heap reachable by havoc."""
        pr = self.sp.pairs
        anybad = self.project(bad, pr.groups(region))
        return ~np.bitwise_or.reduceat(anybad, pr.p1_starts, axis=0) & self.valid

    def exists_pairs(self, bits: np.ndarray, region: Optional[str] = None) -> np.ndarray:
        """Bit (m, h) set iff some pair row (m, m') has a set bit (after projection over `region`)."""
        pr = self.sp.pairs
        if region is not None:
            bits = self.project(bits, pr.groups(region))
        return np.bitwise_or.reduceat(bits, pr.p1_starts, axis=0)

    def imp(self, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
        pr = self.sp.pairs
        return self._forall_pairs(self.minimal_pairs(t1) & ~t2[pr.ps], "new_rd")

    def wand(self, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
        pr = self.sp.pairs
        m0 = self.minimal_from_empty(t1)
        return self._forall_pairs(m0[pr.p2] & ~t2[pr.ps], "new_rd")

    # unfiltered formulations (no minimality), with local or global havoc
    def imp_unfiltered(self, t1: np.ndarray, t2: np.ndarray, region: str = "new_rd") -> np.ndarray:
        pr = self.sp.pairs
        return self._forall_pairs(t1[pr.ps] & ~t2[pr.ps], region)

    def wand_unfiltered(self, t1: np.ndarray, t2: np.ndarray, region: str = "new_rd") -> np.ndarray:
        pr = self.sp.pairs
        return self._forall_pairs(t1[pr.p2] & ~t2[pr.ps], region)

    # -- scalar access -------------------------------------------------------------

    def bit(self, t: np.ndarray, mi: int, hi: int) -> bool:
        return bool((int(t[mi, hi >> 6]) >> (hi & 63)) & 1)

    def sat(self, s: State, a: Assertion) -> bool:
        fv = free_vars(a)
        for x in fv:
            if x not in s.env:
                raise UnboundVar(x)
        env = self.sp.env_codes(s.env.restrict(fv))
        t = self.table(a, env)
        return self.bit(t, self.sp.mask_index(s.mask), self.sp.heap_index(s.heap))

    def clear(self):
        self._cache.clear()


_ENGINES: Dict[Tuple[Universe, bool], TableEngine] = {}


def engine_for(u: Universe, paranoid: bool = False) -> TableEngine:
    """A shared engine per universe (memo tables are semantics-transparent)."""
    key = (u, paranoid)
    if key not in _ENGINES:
        _ENGINES[key] = TableEngine(u, paranoid=paranoid)
    return _ENGINES[key]

"""Vectorized partial-heap semantics of separation logic.

Partial heaps on the grid are encoded as mixed-radix numbers: each location
holds either nothing (cell 0) or a value index v and a level k in 1..D (cell
1 + v*D + k - 1). The engine computes one boolean per partial heap. This code
shares nothing with the total-heap engine beyond the universe itself.
"""

from __future__ import annotations

import itertools
from collections import OrderedDict
from fractions import Fraction
from math import ceil
from typing import Dict

import numpy as np

from ..state import NULL, Location, Obj, PartialHeap, Universe, UniverseError
from ..syntax import (
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
    free_vars,
    is_sl_with_neq,
)
from .errors import NotSLFragment, UnboundVar


class SLEngine:
    def __init__(self, u: Universe, cache_entries: int = 4096):
        self.u = u
        self.locs = u.locations
        self.n = len(self.locs)
        self.V = len(u.values)
        self.D = u.denom
        self.C = 1 + self.V * self.D
        self.N = self.C ** self.n
        self.values = {v: i for i, v in enumerate(u.values)}
        self.weights = self.C ** np.arange(self.n - 1, -1, -1, dtype=np.int64)
        idx = np.arange(self.N, dtype=np.int64)
        self.cells = (idx[:, None] // self.weights[None, :]) % self.C
        occupied = self.cells > 0
        self.cell_value = np.where(occupied, (self.cells - 1) // self.D, -1)
        self.cell_level = np.where(occupied, (self.cells - 1) % self.D + 1, 0)
        self._triples = None
        self._cache: "OrderedDict[tuple, np.ndarray]" = OrderedDict()
        self.cache_entries = cache_entries
        self._foreign: Dict[object, int] = {}

    # -- compatible triples -----------------------------------------------------

    def _build_triples(self):
        D, V = self.D, self.V
        per = []
        for c1 in range(self.C):
            for c2 in range(self.C):
                if c1 == 0:
                    per.append((c1, c2, c2))
                elif c2 == 0:
                    per.append((c1, c2, c1))
                else:
                    v1, k1 = divmod(c1 - 1, D)
                    v2, k2 = divmod(c2 - 1, D)
                    k1, k2 = k1 + 1, k2 + 1
                    if v1 == v2 and k1 + k2 <= D:
                        per.append((c1, c2, 1 + v1 * D + k1 + k2 - 1))
        per.sort()
        per = np.array(per, dtype=np.int64)
        m = len(per)
        sel = np.indices((m,) * self.n).reshape(self.n, -1).T
        h1 = per[sel, 0] @ self.weights
        h2 = per[sel, 1] @ self.weights
        h12 = per[sel, 2] @ self.weights
        by_h1 = np.lexsort((h2, h1))
        h1, h2, h12 = h1[by_h1], h2[by_h1], h12[by_h1]
        h1_starts = np.flatnonzero(np.r_[True, np.diff(h1) != 0])
        order = np.argsort(h12, kind="stable")
        h12_starts = np.flatnonzero(np.r_[True, np.diff(h12[order]) != 0])
        self._triples = dict(
            h1=h1,
            h2=h2,
            h12=h12,
            h1_starts=h1_starts,
            # the same triples grouped by combined heap, for star
            s_h1=h1[order],
            s_h2=h2[order],
            s_h12=h12[order][h12_starts],
            h12_starts=h12_starts,
        )

    @property
    def triples(self):
        if self._triples is None:
            self._build_triples()
        return self._triples

    # -- encoding ---------------------------------------------------------------

    def index(self, h: PartialHeap) -> int:
        total = 0
        for i, loc in enumerate(self.locs):
            if loc in h:
                v, q = h[loc]
                k = q * self.D
                if k.denominator != 1 or v not in self.values:
                    raise UniverseError(f"partial heap cell {loc} not on the universe grid")
                total += (1 + self.values[v] * self.D + int(k) - 1) * int(self.weights[i])
        return total

    def heap_at(self, i: int) -> PartialHeap:
        cells = {}
        for loc, c in zip(self.locs, self.cells[i]):
            if c:
                v, k = divmod(int(c) - 1, self.D)
                cells[loc] = (self.u.values[v], Fraction(k + 1, self.D))
        return PartialHeap(cells)

    def code(self, e: Expr, env: Dict[str, int]) -> int:
        if isinstance(e, Var):
            if e.name not in env:
                raise UnboundVar(e.name)
            return env[e.name]
        if isinstance(e, NullLit):
            return self.values[NULL]
        if isinstance(e, IntLit):
            if e.value in self.values and not isinstance(e.value, bool):
                return self.values[e.value]
            return self._foreign.setdefault(e.value, self.V + len(self._foreign))
        raise NotSLFragment("field reads are not separation logic expressions")

    def restrict_index(self, heap_vals: np.ndarray, mask_lvls: np.ndarray) -> np.ndarray:
        """Index of restrict(H, P) for every (mask, heap) pair, as an (NM, NH) array."""
        occ = mask_lvls[:, None, :] > 0
        cell = np.where(occ, 1 + heap_vals[None, :, :].astype(np.int64) * self.D + mask_lvls[:, None, :] - 1, 0)
        return cell @ self.weights

    # -- evaluation ---------------------------------------------------------------

    def table(self, a: Assertion, env: Dict[str, int]) -> np.ndarray:
        fv = free_vars(a)
        key = (a, tuple(sorted((x, env[x]) for x in fv if x in env)))
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

    def _compute(self, a: Assertion, env: Dict[str, int]) -> np.ndarray:
        if isinstance(a, (Eq, Neq)):
            same = self.code(a.left, env) == self.code(a.right, env)
            return np.full(self.N, same if isinstance(a, Eq) else not same)
        if isinstance(a, PointsTo):
            o = self.code(a.obj, env)
            want = self.code(a.value, env)
            target = self.u.values[o] if o < self.V else None
            if not isinstance(target, Obj):
                return np.zeros(self.N, dtype=bool)
            if a.field not in self.u.fields:
                return np.zeros(self.N, dtype=bool)
            li = self.locs.index(Location(target.name, a.field))
            need = ceil(a.perm * self.D)
            return (self.cell_level[:, li] >= need) & (self.cell_value[:, li] == want)
        if isinstance(a, And):
            return self.table(a.left, env) & self.table(a.right, env)
        if isinstance(a, Or):
            return self.table(a.left, env) | self.table(a.right, env)
        if isinstance(a, Star):
            tr = self.triples
            t1, t2 = self.table(a.left, env), self.table(a.right, env)
            both = np.take(t1, tr["s_h1"]) & np.take(t2, tr["s_h2"])
            out = np.zeros(self.N, dtype=bool)
            out[tr["s_h12"]] = np.logical_or.reduceat(both, tr["h12_starts"])
            return out
        if isinstance(a, Wand):
            tr = self.triples
            t1, t2 = self.table(a.left, env), self.table(a.right, env)
            bad = np.take(t1, tr["h2"]) & ~np.take(t2, tr["h12"])
            return ~np.logical_or.reduceat(bad, tr["h1_starts"])
        if isinstance(a, Imp):
            tr = self.triples
            t1, t2 = self.table(a.left, env), self.table(a.right, env)
            bad = np.take(t1 & ~t2, tr["h12"])
            return ~np.logical_or.reduceat(bad, tr["h1_starts"])
        if isinstance(a, Exists):
            out = np.zeros(self.N, dtype=bool)
            for vi in range(self.V):
                inner = dict(env)
                inner[a.var] = vi
                out |= self.table(a.body, inner)
            return out
        raise NotSLFragment(f"unsupported connective {type(a).__name__}")

    def sat(self, h: PartialHeap, env, a: Assertion) -> bool:
        if not is_sl_with_neq(a):
            raise NotSLFragment("not a separation logic assertion")
        codes = {}
        for x in free_vars(a):
            if x not in env:
                raise UnboundVar(x)
            if env[x] not in self.values:
                raise UniverseError(f"value of {x} not in universe")
            codes[x] = self.values[env[x]]
        return bool(self.table(a, codes)[self.index(h)])


_ENGINES: Dict[Universe, SLEngine] = {}


def sl_engine_for(u: Universe) -> SLEngine:
    if u not in _ENGINES:
        _ENGINES[u] = SLEngine(u)
    return _ENGINES[u]

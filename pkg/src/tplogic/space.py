"""Index encodings of heaps, masks and environments over a finite universe.

A heap is a mixed-radix number over the universe locations (location 0 is the
most significant digit), each digit the index of the stored value in
``Universe.values``. Masks are encoded the same way with digits in 0..D, the
level ``k`` standing for permission k/D. Every table produced by the engines is
laid out as ``table[mask_index, heap_index]``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import cached_property
from math import ceil
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from .state import (
    Environment,
    NULL,
    Location,
    Obj,
    PermMask,
    State,
    TotalHeap,
    Universe,
    UniverseError,
    Value,
)


def digits(n_items: int, radix: int, n_digits: int) -> np.ndarray:
    idx = np.arange(n_items, dtype=np.int64)
    weights = radix ** np.arange(n_digits - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] // weights[None, :]) % radix).astype(np.int8)


class Space:
    """Finite state space of one universe."""

    def __init__(self, u: Universe):
        self.u = u
        self.locs: Tuple[Location, ...] = u.locations
        self.loc_index = {loc: i for i, loc in enumerate(self.locs)}
        self.n = len(self.locs)
        self.V = len(u.values)
        self.D = u.denom
        self.K = u.denom + 1
        self.NH = self.V ** self.n
        self.NM = self.K ** self.n
        self.value_index: Dict[Value, int] = {v: i for i, v in enumerate(u.values)}
        self.wH = self.V ** np.arange(self.n - 1, -1, -1, dtype=np.int64)
        self.wM = self.K ** np.arange(self.n - 1, -1, -1, dtype=np.int64)
        self.heap_vals = digits(self.NH, self.V, self.n)
        self.mask_lvls = digits(self.NM, self.K, self.n)
        bits = 1 << np.arange(self.n, dtype=np.int64)
        self.mask_rd = ((self.mask_lvls > 0).astype(np.int64) * bits).sum(axis=1)
        nf = len(u.fields)
        # objloc[vi, fi] = location index of (value vi).field fi, or -1
        self.objloc = np.full((self.V, nf), -1, dtype=np.int64)
        for vi, v in enumerate(u.values):
            if isinstance(v, Obj):
                oi = u.objects.index(v.name)
                self.objloc[vi] = oi * nf + np.arange(nf)
        self.field_index = {f: i for i, f in enumerate(u.fields)}
        self.null_index = self.value_index[NULL]

    # -- scalar conversions ---------------------------------------------------

    def heap_index(self, h: TotalHeap) -> int:
        return int(sum(self.value_index[h[loc]] * int(w) for loc, w in zip(self.locs, self.wH)))

    def mask_index(self, p: PermMask) -> int:
        total = 0
        for loc, q in p.items():
            if loc not in self.loc_index:
                raise UniverseError(f"location {loc} not in universe")
            lvl = q * self.D
            if lvl.denominator != 1:
                raise UniverseError(f"permission {q} not on the grid 1/{self.D}")
            total += int(lvl) * int(self.wM[self.loc_index[loc]])
        return total

    def heap_at(self, hi: int) -> TotalHeap:
        row = self.heap_vals[hi]
        return TotalHeap({loc: self.u.values[int(d)] for loc, d in zip(self.locs, row)})

    def mask_at(self, mi: int) -> PermMask:
        row = self.mask_lvls[mi]
        return PermMask({loc: Fraction(int(k), self.D) for loc, k in zip(self.locs, row) if k})

    def level(self, q: Fraction) -> int:
        """Smallest grid level whose permission is >= q."""
        return ceil(q * self.D)

    def env_codes(self, env: Environment) -> Dict[str, int]:
        out = {}
        for name, v in env.items():
            if v not in self.value_index:
                raise UniverseError(f"value {v!r} of {name} not in universe")
            out[name] = self.value_index[v]
        return out

    def envs(self, names: Sequence[str]) -> Iterator[Dict[str, int]]:
        """All environments over `names` (sorted), in lexicographic value order."""
        names = sorted(names)
        for combo in itertools.product(range(self.V), repeat=len(names)):
            yield dict(zip(names, combo))

    def env_of(self, codes: Dict[str, int]) -> Environment:
        return Environment({k: self.u.values[c] for k, c in codes.items()})

    def state(self, mi: int, hi: int, codes: Dict[str, int]) -> State:
        return State(self.heap_at(hi), self.mask_at(mi), self.env_of(codes))

    # -- pair tables ------------------------------------------------------------

    @cached_property
    def pairs(self) -> "Pairs":
        return Pairs(self)

    @cached_property
    def drop0(self) -> Tuple[np.ndarray, np.ndarray]:
        """For each mask m and location l: index of m with l zeroed, and whether m[l] > 0."""
        lv = self.mask_lvls.astype(np.int64)
        drop = np.arange(self.NM, dtype=np.int64)[:, None] - lv * self.wM[None, :]
        return drop, lv > 0

    @cached_property
    def drop0w(self) -> Tuple[np.ndarray, np.ndarray]:
        """`drop0` with the flags widened to all-ones/all-zero uint64 words."""
        drop, has = self.drop0
        return drop, word_mask(has)

    def all_bits(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def unread_groups(self) -> List[Tuple[int, np.ndarray]]:
        """Mask rows grouped by the bitmask of locations they cannot read."""
        unread = self.all_bits() & ~self.mask_rd
        return [(int(bm), np.flatnonzero(unread == bm)) for bm in np.unique(unread)]

    @cached_property
    def glb_index(self) -> np.ndarray:
        """glb_index[m1, m2] = index of the pointwise minimum mask."""
        lv = np.minimum(self.mask_lvls[:, None, :], self.mask_lvls[None, :, :]).astype(np.int64)
        return lv @ self.wM


def word_mask(flags: np.ndarray) -> np.ndarray:
    return np.where(flags, np.uint64(0xFFFFFFFFFFFFFFFF), np.uint64(0))


class Pairs:
    """All compatible mask pairs (m1, m2), ordered by (m1, m2)."""

    def __init__(self, sp: Space):
        K, n, D = sp.K, sp.n, sp.D
        per = [(a, b) for a in range(K) for b in range(K) if a + b <= D]
        npl = len(per)
        sel = digits(npl ** n, npl, n).astype(np.int64)
        a = np.array([p[0] for p in per], dtype=np.int64)[sel]
        b = np.array([p[1] for p in per], dtype=np.int64)[sel]
        order = np.lexsort((b @ sp.wM, a @ sp.wM))
        a, b = a[order], b[order]
        self.count = npl ** n
        self.p1 = a @ sp.wM
        self.p2 = b @ sp.wM
        self.ps = (a + b) @ sp.wM
        self.lv2 = b
        bits = 1 << np.arange(n, dtype=np.int64)
        self.has = b > 0
        self.hasw = word_mask(self.has)
        # locations newly readable by adding m2 to m1
        self.new_rd = ((b > 0) & (a == 0)).astype(np.int64) @ bits
        # locations unreadable under m1 (the global havoc region)
        self.unread1 = (a == 0).astype(np.int64) @ bits
        # locations unreadable under m1*m2
        self.unread_s = ((a + b) == 0).astype(np.int64) @ bits
        self.drop = self.ps[:, None] - b * sp.wM[None, :]
        self.drop2 = self.p2[:, None] - b * sp.wM[None, :]
        self.p1_starts = np.flatnonzero(np.r_[True, np.diff(self.p1) != 0])
        self.star_order = np.argsort(self.ps, kind="stable")
        sorted_ps = self.ps[self.star_order]
        self.ps_starts = np.flatnonzero(np.r_[True, np.diff(sorted_ps) != 0])
        self.p1_by_ps = self.p1[self.star_order]
        self.p2_by_ps = self.p2[self.star_order]
        assert len(self.p1_starts) == sp.NM and len(self.ps_starts) == sp.NM
        self._groups: Dict[str, List[Tuple[int, np.ndarray]]] = {}

    def groups(self, which: str) -> List[Tuple[int, np.ndarray]]:
        """Row indices grouped by havoc-region bitmask ('new_rd' or 'unread1')."""
        if which not in self._groups:
            bitsarr = getattr(self, which)
            out = []
            for bm in np.unique(bitsarr):
                out.append((int(bm), np.flatnonzero(bitsarr == bm)))
            self._groups[which] = out
        return self._groups[which]

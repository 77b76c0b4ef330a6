"""Partial-heap and total-heap semantics, with validity, entailment and equivalence."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Iterator, Optional, Tuple

import numpy as np

from ..state import Environment, PartialHeap, PermMask, State, TotalHeap, Universe
from ..syntax import Assertion, free_vars
from .direct import (
    ExtensionKind,
    enumerate_extensions,
    eval_expr,
    is_minimal_extension as _is_minimal_direct,
    sl_sat_direct,
    tpl_sat_direct,
)
from .errors import NonObjectDeref, NotSLFragment, UnboundVar
from .oracle import SLEngine, sl_engine_for
from .tables import TableEngine, engine_for

__all__ = [
    "ExtensionKind",
    "NonObjectDeref",
    "NotSLFragment",
    "SLEngine",
    "TableEngine",
    "UnboundVar",
    "Verdict",
    "engine_for",
    "entails",
    "enumerate_extensions",
    "equivalent",
    "eval_expr",
    "first_true",
    "is_minimal_extension",
    "models",
    "sl_engine_for",
    "sl_sat",
    "sl_sat_direct",
    "tpl_sat",
    "tpl_sat_direct",
    "valid",
]


def tpl_sat(s: State, a: Assertion, u: Universe, paranoid: bool = False) -> bool:
    return engine_for(u, paranoid).sat(s, a)


def sl_sat(h: PartialHeap, env: Environment, a: Assertion, u: Universe) -> bool:
    return sl_engine_for(u).sat(h, env, a)


def is_minimal_extension(
    h: TotalHeap,
    base: PermMask,
    env: Environment,
    extra: PermMask,
    a: Assertion,
    u: Universe,
    paranoid: bool = False,
) -> bool:
    """Single-location-removal check (exhaustive submask check when `paranoid`)."""
    eng = engine_for(u)
    return _is_minimal_direct(h, base, env, extra, a, u, exhaustive=paranoid, sat=eng.sat)


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Optional[State] = None
    detail: str = ""

    def __bool__(self):
        return self.holds


def first_true(t: np.ndarray) -> Optional[Tuple[int, int]]:
    """Smallest (mask, heap) index pair with t true, ordering heaps before masks."""
    flat = t.T.ravel()
    i = int(np.argmax(flat))
    if not flat[i]:
        return None
    nm = t.shape[0]
    return i % nm, i // nm


def _search(
    names, u: Universe, bad_of: Callable[[TableEngine, Dict[str, int]], np.ndarray], paranoid: bool
) -> Optional[State]:
    eng = engine_for(u, paranoid)
    for env in eng.sp.envs(names):
        bad = bad_of(eng, env)
        if bad.any():
            mi, hi = first_true(eng.unpack(bad))
            return eng.sp.state(mi, hi, env)
    return None


def valid(a: Assertion, u: Universe, paranoid: bool = False) -> Verdict:
    w = _search(free_vars(a), u, lambda e, env: ~e.table(a, env) & e.valid, paranoid)
    return Verdict(w is None, w)


def entails(a1: Assertion, a2: Assertion, u: Universe, paranoid: bool = False) -> Verdict:
    names = free_vars(a1) | free_vars(a2)
    w = _search(names, u, lambda e, env: e.table(a1, env) & ~e.table(a2, env), paranoid)
    return Verdict(w is None, w)


def equivalent(a1: Assertion, a2: Assertion, u: Universe, paranoid: bool = False) -> Verdict:
    names = free_vars(a1) | free_vars(a2)
    w = _search(names, u, lambda e, env: e.table(a1, env) ^ e.table(a2, env), paranoid)
    if w is None:
        return Verdict(True)
    left = tpl_sat(w, a1, u)
    return Verdict(False, w, "left holds, right fails" if left else "right holds, left fails")


def models(a: Assertion, u: Universe, env_names=None) -> Iterator[State]:
    """All satisfying states in the universe's lexicographic order."""
    eng = engine_for(u)
    names = free_vars(a) if env_names is None else env_names
    for env in eng.sp.envs(names):
        t = eng.bool_table(a, env)
        hs, ms = np.nonzero(t.T)
        for hi, mi in zip(hs, ms):
            yield eng.sp.state(int(mi), int(hi), env)


def count_models(a: Assertion, u: Universe) -> int:
    eng = engine_for(u)
    return sum(int(np.bitwise_count(eng.table(a, env)).sum()) for env in eng.sp.envs(free_vars(a)))

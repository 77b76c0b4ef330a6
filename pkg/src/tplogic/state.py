"""Exact state representations: universes, total heaps, permission masks,
partial fractional heaps, environments, and the heap/mask algebra."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence, Tuple, Union


class _Null:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "null"

    def __reduce__(self):
        return (_Null, ())


NULL = _Null()


@dataclass(frozen=True, order=True)
class Obj:
    name: str

    def __repr__(self):
        return self.name


Value = Union[_Null, int, Obj]


def is_value(v) -> bool:
    return v is NULL or isinstance(v, Obj) or (isinstance(v, int) and not isinstance(v, bool))


def render_value(v: Value) -> str:
    if v is NULL:
        return "null"
    if isinstance(v, Obj):
        return v.name
    return str(v)


class Location(NamedTuple):
    obj: str
    field: str

    def __str__(self):
        return f"{self.obj}.{self.field}"


# -- errors ------------------------------------------------------------------


class StateError(ValueError):
    """Base class for undefined heap/mask operations."""


class _LocatedError(StateError):
    def __init__(self, location: Location, message: str = ""):
        self.location = location
        super().__init__(message or f"{type(self).__name__}({location})")


class Incompatible(_LocatedError):
    pass


class NotSubmask(_LocatedError):
    pass


class ValueClash(_LocatedError):
    pass


class PermOverflow(_LocatedError):
    pass


class UniverseError(ValueError):
    pass


# -- permissions -------------------------------------------------------------

ZERO = Fraction(0)
FULL = Fraction(1)


def perm(q) -> Fraction:
    """Normalize `q` (int, str like "1/2", Fraction) to an exact permission in [0, 1]."""
    if isinstance(q, float):
        raise TypeError("permissions must be exact; got float")
    f = Fraction(q)
    if f < 0 or f > 1:
        raise ValueError(f"permission {f} outside [0, 1]")
    return f


def render_perm(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# -- universe ----------------------------------------------------------------


@dataclass(frozen=True)
class Universe:
    objects: Tuple[str, ...]
    fields: Tuple[str, ...]
    values: Tuple[Value, ...]
    denom: int

    def __post_init__(self):
        if not self.objects or not self.fields or not self.values:
            raise UniverseError("objects, fields and values must be non-empty")
        if self.denom < 1:
            raise UniverseError("denominator must be >= 1")
        if NULL not in self.values:
            raise UniverseError("values must contain null")
        for o in self.objects:
            if Obj(o) not in self.values:
                raise UniverseError(f"object {o} missing from values")
        for v in self.values:
            if not is_value(v):
                raise UniverseError(f"bad value {v!r}")
            if isinstance(v, Obj) and v.name not in self.objects:
                raise UniverseError(f"value {v} is not a declared object")
        if len(set(self.values)) != len(self.values):
            raise UniverseError("duplicate values")
        if len(set(self.objects)) != len(self.objects) or len(set(self.fields)) != len(self.fields):
            raise UniverseError("duplicate object or field ids")

    @classmethod
    def make(cls, objects: Sequence[str], fields: Sequence[str], values: Sequence[Value], denom: int) -> "Universe":
        """Build a universe, appending object ids not already listed among `values`."""
        vals = list(values)
        for o in objects:
            if Obj(o) not in vals:
                vals.append(Obj(o))
        return cls(tuple(objects), tuple(fields), tuple(vals), denom)

    @property
    def locations(self) -> Tuple[Location, ...]:
        return tuple(Location(o, f) for o in self.objects for f in self.fields)

    def grid(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(k, self.denom) for k in range(self.denom + 1))

    def on_grid(self, q: Fraction) -> bool:
        return (q * self.denom).denominator == 1 and 0 <= q <= 1

    def location_order(self) -> dict:
        return {loc: i for i, loc in enumerate(self.locations)}

    def heap(self, cells: Optional[Mapping[Location, Value]] = None) -> "TotalHeap":
        """A total heap; unlisted cells take the first universe value."""
        cells = dict(cells or {})
        for loc, v in cells.items():
            self._check_loc(loc)
            if v not in self.values:
                raise UniverseError(f"value {render_value(v)} not in universe")
        return TotalHeap({loc: cells.get(loc, self.values[0]) for loc in self.locations})

    def _check_loc(self, loc: Location):
        if loc.obj not in self.objects or loc.field not in self.fields:
            raise UniverseError(f"location {loc} not in universe")

    def render(self) -> str:
        objs = set(self.objects)
        vals = [render_value(v) for v in self.values if not (isinstance(v, Obj) and v.name in objs)]
        return (
            f"objects = {' '.join(self.objects)}\n"
            f"fields = {' '.join(self.fields)}\n"
            f"values = {' '.join(vals)}\n"
            f"denominator = {self.denom}\n"
        )


U0 = Universe.make(("o1", "o2"), ("f", "g"), (NULL, 0, 1, 3, 5), 2)


def default_universe() -> Universe:
    return U0


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_INT = re.compile(r"-?[0-9]+\Z")


def parse_universe(text: str) -> Universe:
    """Parse the line-oriented universe format (``key = items``, ``#`` comments)."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UniverseError(f"line {lineno}: expected 'key = value'")
        key, _, rest = line.partition("=")
        key = key.strip()
        if key not in ("objects", "fields", "values", "denominator"):
            raise UniverseError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise UniverseError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = rest.split()
    for key in ("objects", "fields", "values", "denominator"):
        if key not in entries:
            raise UniverseError(f"missing key {key!r}")
    objects = entries["objects"]
    fields = entries["fields"]
    for name in objects + fields:
        if not _IDENT.match(name) or name == "null":
            raise UniverseError(f"bad identifier {name!r}")
    values = []
    for tok in entries["values"]:
        if tok == "null":
            values.append(NULL)
        elif _INT.match(tok):
            values.append(int(tok))
        elif tok in objects:
            values.append(Obj(tok))
        else:
            raise UniverseError(f"bad value {tok!r}")
    if len(entries["denominator"]) != 1 or not entries["denominator"][0].isdigit():
        raise UniverseError("denominator must be a positive integer")
    return Universe.make(objects, fields, values, int(entries["denominator"][0]))


def load_universe(path) -> Universe:
    with open(path, encoding="utf-8") as fh:
        return parse_universe(fh.read())


# -- maps ----------------------------------------------------------------------


class _FrozenMap(Mapping):
    __slots__ = ("_d", "_key")

    def __init__(self, d: dict):
        self._d = d
        self._key = None

    def __getitem__(self, k):
        return self._d[k]

    def __iter__(self) -> Iterator:
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def _canon(self):
        if self._key is None:
            self._key = frozenset(self._d.items())
        return self._key

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._canon() == other._canon()

    def __hash__(self):
        return hash((type(self).__name__, self._canon()))


class PermMask(_FrozenMap):
    """Total map Location -> permission, stored sparsely (absent means 0)."""

    __slots__ = ()

    def __init__(self, entries: Union[Mapping, Iterable, None] = None):
        d = {}
        items = entries.items() if isinstance(entries, Mapping) else (entries or ())
        for loc, q in items:
            q = perm(q)
            if q:
                d[Location(*loc)] = q
        super().__init__(d)

    def __getitem__(self, loc) -> Fraction:
        return self._d.get(loc, ZERO)

    def get(self, loc, default=None):
        return self._d.get(loc, ZERO)

    def __contains__(self, loc):
        return loc in self._d

    def __repr__(self):
        inner = ", ".join(f"{loc}↦{render_perm(q)}" for loc, q in sorted(self._d.items()))
        return "{" + inner + "}"

    def leq(self, other: "PermMask") -> bool:
        return all(q <= other[loc] for loc, q in self._d.items())


EMPTY_MASK = PermMask()


class TotalHeap(_FrozenMap):
    """Map Location -> Value, defined at every location of its universe."""

    __slots__ = ()

    def __init__(self, cells: Mapping[Location, Value]):
        super().__init__({Location(*k): v for k, v in cells.items()})

    def set(self, loc: Location, v: Value) -> "TotalHeap":
        d = dict(self._d)
        d[loc] = v
        return TotalHeap(d)

    def __repr__(self):
        return "{" + ", ".join(f"{loc}={render_value(v)}" for loc, v in self._d.items()) + "}"


class PartialHeap(_FrozenMap):
    """Partial map Location -> (value, permission); permissions strictly positive."""

    __slots__ = ()

    def __init__(self, cells: Union[Mapping, Iterable, None] = None):
        d = {}
        items = cells.items() if isinstance(cells, Mapping) else (cells or ())
        for loc, (v, q) in items:
            q = perm(q)
            if q == 0:
                raise ValueError(f"partial heap entry {Location(*loc)} has zero permission")
            d[Location(*loc)] = (v, q)
        super().__init__(d)

    def __repr__(self):
        inner = ", ".join(f"{loc}↦({render_value(v)},{render_perm(q)})" for loc, (v, q) in sorted(self._d.items()))
        return "{" + inner + "}"


EMPTY_PARTIAL = PartialHeap()


class Environment(_FrozenMap):
    __slots__ = ()

    def __init__(self, binding: Optional[Mapping[str, Value]] = None, **kw):
        d = dict(binding or {})
        d.update(kw)
        super().__init__(d)

    def bind(self, name: str, v: Value) -> "Environment":
        d = dict(self._d)
        d[name] = v
        return Environment(d)

    def restrict(self, names: Iterable[str]) -> "Environment":
        return Environment({n: self._d[n] for n in names if n in self._d})

    def __repr__(self):
        return "{" + ", ".join(f"{k}={render_value(v)}" for k, v in sorted(self._d.items())) + "}"


@dataclass(frozen=True)
class State:
    heap: TotalHeap
    mask: PermMask
    env: Environment


# -- mask algebra --------------------------------------------------------------


def _ordered(locs: Iterable[Location], order: Optional[Sequence[Location]]) -> list:
    locs = set(locs)
    if order is None:
        return sorted(locs)
    pos = {loc: i for i, loc in enumerate(order)}
    return sorted(locs, key=lambda loc: (pos.get(loc, len(pos)), loc))


def mask_compatible(p1: PermMask, p2: PermMask) -> bool:
    return all(q + p2[loc] <= 1 for loc, q in p1.items())


def mask_combine(p1: PermMask, p2: PermMask, order: Optional[Sequence[Location]] = None) -> PermMask:
    """Pointwise sum; raises Incompatible at the first location whose sum exceeds 1."""
    for loc in _ordered(set(p1) | set(p2), order):
        if p1[loc] + p2[loc] > 1:
            raise Incompatible(loc)
    return PermMask({loc: p1[loc] + p2[loc] for loc in set(p1) | set(p2)})


def mask_subtract(p1: PermMask, p2: PermMask, order: Optional[Sequence[Location]] = None) -> PermMask:
    for loc in _ordered(p2, order):
        if p2[loc] > p1[loc]:
            raise NotSubmask(loc)
    return PermMask({loc: p1[loc] - p2[loc] for loc in p1})


def mask_glb(p1: PermMask, p2: PermMask) -> PermMask:
    return PermMask({loc: min(p1[loc], p2[loc]) for loc in set(p1) & set(p2)})


def mask_lub(p1: PermMask, p2: PermMask) -> PermMask:
    return PermMask({loc: max(p1[loc], p2[loc]) for loc in set(p1) | set(p2)})


def rds(p: PermMask) -> frozenset:
    """Locations readable under `p` (strictly positive permission)."""
    return frozenset(loc for loc, q in p.items() if q > 0)


# -- heap operations -----------------------------------------------------------


def restrict(h: TotalHeap, p: PermMask) -> PartialHeap:
    return PartialHeap({loc: (h[loc], p[loc]) for loc in rds(p)})


def heaps_agree(h1: TotalHeap, h2: TotalHeap, locs: Iterable[Location]) -> bool:
    return all(h1[loc] == h2[loc] for loc in locs)


def heaps_agree_on(h1: TotalHeap, h2: TotalHeap, p: PermMask) -> bool:
    return heaps_agree(h1, h2, rds(p))


def cond_merge(locs: Iterable[Location], h1: TotalHeap, h2: TotalHeap) -> TotalHeap:
    """Heap taking `h1` on `locs` and `h2` elsewhere."""
    locs = set(locs)
    return TotalHeap({loc: (h1[loc] if loc in locs else h2[loc]) for loc in set(h1) | set(h2)})


def partial_compatible(h1: PartialHeap, h2: PartialHeap) -> bool:
    for loc in set(h1) & set(h2):
        (v1, q1), (v2, q2) = h1[loc], h2[loc]
        if v1 != v2 or q1 + q2 > 1:
            return False
    return True


def partial_combine(h1: PartialHeap, h2: PartialHeap, order: Optional[Sequence[Location]] = None) -> PartialHeap:
    for loc in _ordered(set(h1) & set(h2), order):
        (v1, q1), (v2, q2) = h1[loc], h2[loc]
        if v1 != v2:
            raise ValueClash(loc)
        if q1 + q2 > 1:
            raise PermOverflow(loc)
    out = dict(h1.items())
    for loc, (v, q) in h2.items():
        out[loc] = (v, out[loc][1] + q) if loc in out else (v, q)
    return PartialHeap(out)


# -- state literals ------------------------------------------------------------


class StateParseError(ValueError):
    pass


def parse_value(tok: str, u: Universe) -> Value:
    if tok == "null":
        return NULL
    if _INT.match(tok):
        return int(tok)
    if tok in u.objects:
        return Obj(tok)
    raise StateParseError(f"unknown value {tok!r}")


def _parse_loc(tok: str, u: Universe) -> Location:
    obj, dot, field = tok.partition(".")
    if not dot or obj not in u.objects or field not in u.fields:
        raise StateParseError(f"bad location {tok!r}")
    return Location(obj, field)


def parse_state(text: str, u: Universe) -> State:
    """Parse ``heap: o1.f=5 ; mask: o1.f=1/2 ; env: x=o1``.

    Unlisted heap cells take the first universe value; unlisted mask cells are 0.
    """
    sections = {"heap": [], "mask": [], "env": []}
    seen = set()
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        name, colon, body = part.partition(":")
        name = name.strip()
        if not colon or name not in sections:
            raise StateParseError(f"bad state section {part!r}")
        if name in seen:
            raise StateParseError(f"duplicate section {name!r}")
        seen.add(name)
        for item in body.split():
            lhs, eq, rhs = item.partition("=")
            if not eq:
                raise StateParseError(f"bad assignment {item!r}")
            sections[name].append((lhs, rhs))
    cells = {}
    for lhs, rhs in sections["heap"]:
        v = parse_value(rhs, u)
        if v not in u.values:
            raise StateParseError(f"value {rhs} not in universe")
        cells[_parse_loc(lhs, u)] = v
    mask = {}
    for lhs, rhs in sections["mask"]:
        try:
            q = perm(rhs)
        except (ValueError, ZeroDivisionError) as exc:
            raise StateParseError(f"bad permission {rhs!r}") from exc
        mask[_parse_loc(lhs, u)] = q
    env = {}
    for lhs, rhs in sections["env"]:
        if not _IDENT.match(lhs):
            raise StateParseError(f"bad variable {lhs!r}")
        v = parse_value(rhs, u)
        if v not in u.values:
            raise StateParseError(f"value {rhs} not in universe")
        env[lhs] = v
    return State(u.heap(cells), PermMask(mask), Environment(env))


def render_state(s: State, u: Optional[Universe] = None) -> str:
    locs = u.locations if u is not None else sorted(s.heap)
    heap = " ".join(f"{loc}={render_value(s.heap[loc])}" for loc in locs)
    mask = " ".join(f"{loc}={render_perm(s.mask[loc])}" for loc in locs if s.mask[loc])
    env = " ".join(f"{k}={render_value(v)}" for k, v in sorted(s.env.items()))
    return f"heap: {heap} ; mask: {mask} ; env: {env}"

"""Assertion semantics: per-heap decision and bounded denotations.

A universe fixes the finite location pool, value pool, cell cap and fuel
budget used by every bounded check.  ``holds`` decides an assertion on one
concrete heap (any heap, also outside the universe); ``denote`` produces
the set of universe heaps satisfying an assertion, equal to filtering
``enumerate_heaps`` by ``holds`` but computed from the assertion structure
so that points-to shaped assertions never scan the whole universe.

Existential witnesses are drawn from the universe's value pool plus the
values occurring in the tested heap (addresses included).  That is complete
for points-to shaped assertions, whose witnesses must occur in the heap,
but incomplete for pure arithmetic existentials; reports call this
"bounded exists".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

from .heap import DEFAULT, EMPTY, Heap, LOC, VInt, VLoc, combine, make_heap
from .syntax import (
    And, Assertion, EMP, Emp, EqE, Exists, LeqE, Not, PointsTo, Star,
)
from .interp import DEFAULT_FUEL, eval_expr


class UniverseTooLarge(Exception):
    """Raised when a check would need to materialize too many heaps."""


DENSE_CAP = 250_000


@dataclass(frozen=True)
class Universe:
    locs: tuple[int, ...]
    vals: tuple[tuple, ...]
    max_cells: int
    fuel: int = DEFAULT_FUEL

    loc_set: frozenset = field(init=False, compare=False)
    val_set: frozenset = field(init=False, compare=False)

    def __post_init__(self):
        if self.max_cells > len(self.locs):
            raise ValueError("cell cap exceeds the location pool")
        object.__setattr__(self, "loc_set", frozenset(self.locs))
        object.__setattr__(self, "val_set", frozenset(self.vals))
        missing = {VLoc(l) for l in self.locs} | {DEFAULT}
        if not missing <= self.val_set:
            raise ValueError("value pool must contain all pool locations and default")

    def heap_count(self) -> int:
        v = len(self.vals)
        return sum(comb(len(self.locs), k) * v ** (2 * k)
                   for k in range(self.max_cells + 1))

    def enumerable(self, h: Heap) -> bool:
        """dom within the pool, small enough, and cell values in the pool."""
        if len(h.cells) > self.max_cells:
            return False
        for l, (v0, v1) in h.cells.items():
            if l not in self.loc_set or v0 not in self.val_set or v1 not in self.val_set:
                return False
        return True


def universe(n_locs: int = 4, int_lo: int = -3, int_hi: int = 3,
             max_cells: int = 3, fuel: int = DEFAULT_FUEL) -> Universe:
    locs = tuple(range(n_locs))
    vals = tuple([VLoc(l) for l in locs]
                 + [VInt(n) for n in range(int_lo, int_hi + 1)]
                 + [DEFAULT])
    return Universe(locs, vals, max_cells, fuel)


def default_universe() -> Universe:
    return universe()


def enumerate_heaps(uni: Universe):
    """All universe heaps, deterministically ordered, no duplicates."""
    yield EMPTY
    pairs = list(itertools.product(uni.vals, repeat=2))
    for k in range(1, uni.max_cells + 1):
        for locs in itertools.combinations(uni.locs, k):
            for contents in itertools.product(pairs, repeat=k):
                yield make_heap(dict(zip(locs, contents)))


def _heap_values(h: Heap):
    out = set()
    for l, (v0, v1) in h.cells.items():
        out.add(VLoc(l))
        out.add(v0)
        out.add(v1)
    return out


def holds(h: Heap, p: Assertion, rho: dict, uni: Universe) -> bool:
    """Decide the assertion on one heap (not restricted to universe heaps)."""
    k = p.__class__
    if k is PointsTo:
        addr = eval_expr(p.addr, rho)
        if addr[0] != LOC or len(h.cells) != 1:
            return False
        cell = h.cells.get(addr[1])
        return (cell is not None
                and cell[0] == eval_expr(p.v0, rho)
                and cell[1] == eval_expr(p.v1, rho))
    if k is Emp:
        return not h.cells
    if k is EqE:
        return eval_expr(p.a, rho) == eval_expr(p.b, rho)
    if k is LeqE:
        a = eval_expr(p.a, rho)
        b = eval_expr(p.b, rho)
        return a[0] == "int" and b[0] == "int" and a[1] <= b[1]
    if k is Star:
        from .heap import subheaps
        for part, rest in subheaps(h):
            if holds(part, p.a, rho, uni) and holds(rest, p.b, rho, uni):
                return True
        return False
    if k is And:
        return holds(h, p.a, rho, uni) and holds(h, p.b, rho, uni)
    if k is Not:
        return not holds(h, p.a, rho, uni)
    if k is Exists:
        rho = dict(rho)
        for w in _heap_values(h) | uni.val_set:
            rho[p.var] = w
            if holds(h, p.body, rho, uni):
                return True
        return False
    raise TypeError(f"not an assertion: {p!r}")


def denote(p: Assertion, rho: dict, uni: Universe) -> frozenset:
    """The universe heaps satisfying p: enumerate_heaps filtered by holds."""
    k = p.__class__
    if k is Emp:
        return frozenset((EMPTY,))
    if k is PointsTo:
        addr = eval_expr(p.addr, rho)
        v0 = eval_expr(p.v0, rho)
        v1 = eval_expr(p.v1, rho)
        if (addr[0] == LOC and addr[1] in uni.loc_set and uni.max_cells >= 1
                and v0 in uni.val_set and v1 in uni.val_set):
            return frozenset((make_heap({addr[1]: (v0, v1)}),))
        return frozenset()
    if k in (EqE, LeqE):
        if holds(EMPTY, p, rho, uni):
            return _all_heaps(uni)
        return frozenset()
    if k is Star:
        da = denote(p.a, rho, uni)
        db = denote(p.b, rho, uni)
        out = set()
        for ha in da:
            for hb in db:
                if len(ha.cells) + len(hb.cells) > uni.max_cells:
                    continue
                hc = combine(ha, hb)
                if hc is not None:
                    out.add(hc)
        return frozenset(out)
    if k is And:
        # filter the structured side by the other to avoid dense scans
        if p.a.__class__ in (EqE, LeqE, Not):
            return frozenset(h for h in denote(p.b, rho, uni)
                             if holds(h, p.a, rho, uni))
        return frozenset(h for h in denote(p.a, rho, uni)
                         if holds(h, p.b, rho, uni))
    if k is Not:
        return frozenset(h for h in _all_heaps(uni)
                         if not holds(h, p.a, rho, uni))
    if k is Exists:
        out = set()
        rho = dict(rho)
        for w in uni.vals:
            rho[p.var] = w
            out |= denote(p.body, rho, uni)
        return frozenset(out)
    raise TypeError(f"not an assertion: {p!r}")


_all_cache: dict[Universe, frozenset] = {}


def _all_heaps(uni: Universe) -> frozenset:
    cached = _all_cache.get(uni)
    if cached is None:
        if uni.heap_count() > DENSE_CAP:
            raise UniverseTooLarge(
                f"assertion needs all {uni.heap_count()} universe heaps "
                f"(cap {DENSE_CAP}); shrink the universe or restructure it")
        cached = frozenset(enumerate_heaps(uni))
        _all_cache[uni] = cached
    return cached


def star_witness(h: Heap, p: Star, rho: dict, uni: Universe):
    """A satisfying split of h for a separating conjunction, if any."""
    from .heap import subheaps
    for part, rest in subheaps(h):
        if holds(part, p.a, rho, uni) and holds(rest, p.b, rho, uni):
            return part, rest
    return None

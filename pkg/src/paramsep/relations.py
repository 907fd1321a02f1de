"""Finitely supported heap relations: worlds of the Kripke structure.

A relation expression is one of

* ``UNIT_I``             -- relates the empty heap to itself, unit of star;
* ``EqSet``              -- partial identity over a heap predicate, given as
                            an explicit heap set or an assertion + stack env;
* ``ExplicitPairs``      -- a finite set of heap pairs;
* ``NamedSim``           -- a named simulation relation given as a union of
                            product blocks (left set x right set);
* ``StarRel``            -- separating conjunction: split both heaps into
                            disjoint parts related componentwise.

Extensions are represented as unions of product blocks ``L x R``: all four
leaf forms are naturally unions of products, and the star of two product
blocks is again a product (choosing the left half of a pair never
constrains the right half), so the representation is exact and the star of
two relations stays proportional to the product of their block counts
instead of the product of their pair counts.

Membership does not go through the bounded extension: each relation assigns
a heap a *certificate* (for leaves, the set of block ids containing it; for
stars, the set of certificate pairs over all splits) and two heaps are
related iff their certificates are compatible.  This keeps membership
decidable for heaps outside the universe pools, which run results routinely
are, while ``pairs``/``blocks`` enumerate only universe heaps.
"""

from __future__ import annotations

import itertools

from .assertions import Universe, denote, enumerate_heaps, holds
from .heap import EMPTY, Heap, combine, support
from .syntax import Assertion

_EMPTYSET = frozenset()


class RelationTooLarge(Exception):
    pass


PAIRS_CAP = 2_000_000
BLOCK_PAIRS_CAP = 200_000_000


class RelExpr:
    __slots__ = ("_sig0", "_sig1", "_enum")

    def __init__(self):
        self._sig0 = {}
        self._sig1 = {}
        self._enum = {}


class UnitIRel(RelExpr):
    __slots__ = ()

    def __repr__(self):
        return "I"


UNIT_I = UnitIRel()


class EqSet(RelExpr):
    """eq(p): relates each heap satisfying p to itself."""

    __slots__ = ("assertion", "rho", "heaps")

    def __init__(self, source, rho=None):
        super().__init__()
        if isinstance(source, Assertion):
            self.assertion = source
            self.rho = dict(rho or {})
            self.heaps = None
        else:
            self.assertion = None
            self.rho = None
            self.heaps = frozenset(source)

    def contains_heap(self, h: Heap, uni: Universe) -> bool:
        if self.heaps is not None:
            return h in self.heaps
        return holds(h, self.assertion, self.rho, uni)

    def __repr__(self):
        if self.heaps is not None:
            return f"eq({len(self.heaps)} heaps)"
        return "eq{assertion}"


class ExplicitPairs(RelExpr):
    __slots__ = ("pair_set", "left_index", "right_index", "supp")

    def __init__(self, pairs):
        super().__init__()
        self.pair_set = frozenset(pairs)
        left: dict[Heap, set] = {}
        right: dict[Heap, set] = {}
        supp = set()
        for i, (a, b) in enumerate(sorted(self.pair_set, key=lambda p: (p[0].idx, p[1].idx))):
            left.setdefault(a, set()).add(i)
            right.setdefault(b, set()).add(i)
            supp |= a.supp | b.supp
        self.left_index = {h: frozenset(s) for h, s in left.items()}
        self.right_index = {h: frozenset(s) for h, s in right.items()}
        self.supp = frozenset(supp)

    def __repr__(self):
        return f"pairs({len(self.pair_set)})"


class NamedSim(RelExpr):
    """A simulation relation given as a union of product blocks."""

    __slots__ = ("name", "blocks", "left_index", "right_index", "supp")

    def __init__(self, name: str, blocks):
        super().__init__()
        self.name = name
        self.blocks = tuple((frozenset(l), frozenset(r)) for l, r in blocks
                            if l and r)
        left: dict[Heap, set] = {}
        right: dict[Heap, set] = {}
        supp = set()
        for i, (ls, rs) in enumerate(self.blocks):
            for h in ls:
                left.setdefault(h, set()).add(i)
                supp |= h.supp
            for h in rs:
                right.setdefault(h, set()).add(i)
                supp |= h.supp
        self.left_index = {h: frozenset(s) for h, s in left.items()}
        self.right_index = {h: frozenset(s) for h, s in right.items()}
        self.supp = frozenset(supp)

    def __repr__(self):
        return f"sim {self.name}"


class StarRel(RelExpr):
    __slots__ = ("a", "b")

    def __init__(self, a: RelExpr, b: RelExpr):
        super().__init__()
        self.a = a
        self.b = b

    def __repr__(self):
        return f"({self.a!r} * {self.b!r})"


def star(*rels: RelExpr) -> RelExpr:
    out = rels[0]
    for r in rels[1:]:
        out = StarRel(out, r)
    return out


def eq_assertion(p: Assertion, rho=None) -> EqSet:
    return EqSet(p, rho)


def eq_heaps(heaps) -> EqSet:
    return EqSet(frozenset(heaps))


def rel_support(r: RelExpr) -> frozenset:
    """Locations the relation can mention; used as a protection footprint.

    For assertion-backed eq this is the support of the stack environment
    (locations enter assertions only through it).
    """
    k = r.__class__
    if k is UnitIRel:
        return _EMPTYSET
    if k is EqSet:
        if r.heaps is not None:
            out = set()
            for h in r.heaps:
                out |= h.supp
            return frozenset(out)
        return frozenset().union(*(support(v) for v in r.rho.values())) \
            if r.rho else _EMPTYSET
    if k in (ExplicitPairs, NamedSim):
        return r.supp
    return rel_support(r.a) | rel_support(r.b)


# ---------------------------------------------------------------------------
# membership via certificates

def sig(r: RelExpr, h: Heap, side: int, uni: Universe):
    cache = r._sig0 if side == 0 else r._sig1
    got = cache.get(h.idx)
    if got is None:
        got = _sig(r, h, side, uni)
        cache[h.idx] = got
    return got


def _sig(r: RelExpr, h: Heap, side: int, uni: Universe):
    k = r.__class__
    if k is UnitIRel:
        return frozenset((0,)) if h is EMPTY else _EMPTYSET
    if k is EqSet:
        return frozenset((h.idx,)) if r.contains_heap(h, uni) else _EMPTYSET
    if k is ExplicitPairs:
        idx = r.left_index if side == 0 else r.right_index
        return idx.get(h, _EMPTYSET)
    if k is NamedSim:
        idx = r.left_index if side == 0 else r.right_index
        return idx.get(h, _EMPTYSET)
    if k is StarRel:
        from .heap import subheaps
        out = set()
        for part, rest in subheaps(h):
            ca = sig(r.a, part, side, uni)
            if not ca:
                continue
            cb = sig(r.b, rest, side, uni)
            if cb:
                out.add((ca, cb))
        return frozenset(out)
    raise TypeError(f"not a relation: {r!r}")


def compat(r: RelExpr, c0, c1) -> bool:
    """Whether a left certificate meets a right certificate."""
    if r.__class__ is StarRel:
        for a0, b0 in c0:
            for a1, b1 in c1:
                if compat(r.a, a0, a1) and compat(r.b, b0, b1):
                    return True
        return False
    return not c0.isdisjoint(c1)


def member(r: RelExpr, h0: Heap, h1: Heap, uni: Universe) -> bool:
    return compat(r, sig(r, h0, 0, uni), sig(r, h1, 1, uni))


def all_pairs_member(r: RelExpr, lefts, rights, uni: Universe):
    """Check L x R subset of r; returns (True, None) or (False, witness pair).

    Groups both sides by certificate so a product block costs one
    compatibility check per certificate class, not per heap pair.
    """
    groups0: dict = {}
    for x in lefts:
        groups0.setdefault(sig(r, x, 0, uni), x)
    groups1: dict = {}
    for y in rights:
        groups1.setdefault(sig(r, y, 1, uni), y)
    for c0, x in groups0.items():
        for c1, y in groups1.items():
            if not compat(r, c0, c1):
                return False, (x, y)
    return True, None


# ---------------------------------------------------------------------------
# bounded extensions

def blocks(r: RelExpr, uni: Universe):
    """Product blocks of the extension restricted to universe heaps."""
    got = r._enum.get(uni)
    if got is None:
        got = _blocks(r, uni)
        represented = sum(len(l) * len(rs) for l, rs in got)
        if represented > BLOCK_PAIRS_CAP:
            raise RelationTooLarge(
                f"relation extension represents {represented} pairs "
                f"(cap {BLOCK_PAIRS_CAP})")
        r._enum[uni] = got
    return got


def _blocks(r: RelExpr, uni: Universe):
    k = r.__class__
    if k is UnitIRel:
        singleton = frozenset((EMPTY,))
        return ((singleton, singleton),)
    if k is EqSet:
        if r.heaps is not None:
            hs = [h for h in r.heaps if uni.enumerable(h)]
        else:
            hs = denote(r.assertion, r.rho, uni)
        return tuple((frozenset((h,)), frozenset((h,)))
                     for h in sorted(hs, key=lambda h: h.idx))
    if k is ExplicitPairs:
        return tuple((frozenset((a,)), frozenset((b,)))
                     for a, b in sorted(r.pair_set, key=lambda p: (p[0].idx, p[1].idx))
                     if uni.enumerable(a) and uni.enumerable(b))
    if k is NamedSim:
        out = []
        for ls, rs in r.blocks:
            lf = frozenset(h for h in ls if uni.enumerable(h))
            rf = frozenset(h for h in rs if uni.enumerable(h))
            if lf and rf:
                out.append((lf, rf))
        return tuple(out)
    if k is StarRel:
        out = []
        for la, ra in blocks(r.a, uni):
            for lb, rb in blocks(r.b, uni):
                lefts = _combine_sets(la, lb, uni)
                if not lefts:
                    continue
                rights = _combine_sets(ra, rb, uni)
                if rights:
                    out.append((lefts, rights))
        return tuple(out)
    raise TypeError(f"not a relation: {r!r}")


def _combine_sets(xs, ys, uni: Universe) -> frozenset:
    out = set()
    for x in xs:
        for y in ys:
            h = combine(x, y)
            if h is not None and len(h.cells) <= uni.max_cells:
                out.add(h)
    return frozenset(out)


def pairs(r: RelExpr, uni: Universe, cap: int = PAIRS_CAP) -> frozenset:
    """The explicit extension over universe heaps, as a set of heap pairs."""
    total = 0
    out = set()
    for lefts, rights in blocks(r, uni):
        total += len(lefts) * len(rights)
        if total > cap:
            raise RelationTooLarge(
                f"relation extension exceeds {cap} pairs")
        for x in lefts:
            for y in rights:
                out.add((x, y))
    return frozenset(out)


def permute_rel(pi, r: RelExpr) -> RelExpr:
    """The relation with all generator heaps renamed by the permutation."""
    from .heap import permute_heap, permute_value
    k = r.__class__
    if k is UnitIRel:
        return r
    if k is ExplicitPairs:
        return ExplicitPairs({(permute_heap(pi, a), permute_heap(pi, b))
                              for a, b in r.pair_set})
    if k is NamedSim:
        return NamedSim(r.name, [(set(map(lambda h: permute_heap(pi, h), ls)),
                                  set(map(lambda h: permute_heap(pi, h), rs)))
                                 for ls, rs in r.blocks])
    if k is EqSet:
        if r.heaps is not None:
            return EqSet(frozenset(permute_heap(pi, h) for h in r.heaps))
        return EqSet(r.assertion, {n: permute_value(pi, v) for n, v in r.rho.items()})
    if k is StarRel:
        return StarRel(permute_rel(pi, r.a), permute_rel(pi, r.b))
    raise TypeError(f"not a relation: {r!r}")


# ---------------------------------------------------------------------------
# observation closure

_EQG = ((0, 0), (2, 2))  # normal/normal and div/div; err is never good


def biorth(pair_set, uni: Universe, guard: int = 6) -> frozenset:
    """Close an explicit relation under observations.

    Continuations are all maps from universe heaps to {normal, err, div};
    a pair of result heaps is in the closure iff every continuation pair
    respecting the relation sends them to equal good observations.  The
    continuation space is cut down analytically: a left continuation k0
    admits a compatible right continuation iff it never answers err on a
    related left heap and forces consistent answers on related right
    heaps; the right continuation is then forced exactly on those heaps
    and free elsewhere, and any free position kills a candidate pair.
    """
    domain = list(enumerate_heaps(uni))
    if len(domain) > guard:
        raise RelationTooLarge(
            f"observation closure needs 3^{len(domain)} continuations "
            f"(guard: at most 3^{guard})")
    ix = {h: i for i, h in enumerate(domain)}
    rel = [(ix[a], ix[b]) for a, b in pair_set]
    entries = []
    for k0 in itertools.product((0, 1, 2), repeat=len(domain)):
        forced: dict[int, int] = {}
        ok = True
        for i0, i1 in rel:
            o = k0[i0]
            if o == 1:
                ok = False
                break
            prev = forced.get(i1)
            if prev is None:
                forced[i1] = o
            elif prev != o:
                ok = False
                break
        if ok:
            entries.append((k0, forced))
    out = set()
    for e0 in domain:
        i0 = ix[e0]
        for e1 in domain:
            i1 = ix[e1]
            good = True
            for k0, forced in entries:
                o1 = forced.get(i1)
                if o1 is None or (k0[i0], o1) not in _EQG:
                    good = False
                    break
            if good:
                out.add((e0, e1))
    return frozenset(out)

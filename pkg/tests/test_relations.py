import itertools
import random

import pytest

from paramsep import syntax as S
from paramsep.assertions import denote, enumerate_heaps, holds, universe
from paramsep.heap import (
    EMPTY, Permutation, VInt, VLoc, combine, heap_of, permute_heap, subheaps,
)
from paramsep.parser import parse
from paramsep.relations import (
    ExplicitPairs, NamedSim, RelationTooLarge, UNIT_I, all_pairs_member,
    biorth, blocks, eq_assertion, eq_heaps, member, pairs, permute_rel,
    rel_support, star,
)

from gen import gen_assertion

UNI = universe(2, 0, 1, 2)
RHO = {"g": VLoc(0), "c": VLoc(1), "i": VInt(1), "j": VInt(0)}


def A(text):
    return parse(text, "assertion", delta=set(RHO))


def brute_member(r, h0, h1, uni):
    """Split-enumeration reference for star membership."""
    from paramsep.relations import EqSet, StarRel, UnitIRel
    k = r.__class__
    if k is UnitIRel:
        return h0 is EMPTY and h1 is EMPTY
    if k is EqSet:
        return h0 is h1 and r.contains_heap(h0, uni)
    if k is ExplicitPairs:
        return (h0, h1) in r.pair_set
    if k is NamedSim:
        return any(h0 in ls and h1 in rs for ls, rs in r.blocks)
    if k is StarRel:
        for a0, b0 in subheaps(h0):
            for a1, b1 in subheaps(h1):
                if brute_member(r.a, a0, a1, uni) and brute_member(r.b, b0, b1, uni):
                    return True
        return False
    raise TypeError


# ---------------------------------------------------------------------------
# membership

def test_unit_relates_only_empty_pairs():
    assert member(UNIT_I, EMPTY, EMPTY, UNI)
    assert not member(UNIT_I, heap_of((0, VInt(0), VInt(0))), EMPTY, UNI)


def test_emp_is_unit_for_star():
    r = ExplicitPairs({(heap_of((1, VInt(0), VInt(0))), heap_of((1, VInt(1), VInt(1))))})
    s = star(eq_assertion(S.EMP), r)
    for (h0, h1) in r.pair_set:
        assert member(s, h0, h1, UNI)
    assert pairs(s, UNI) == pairs(r, UNI)
    assert pairs(star(UNIT_I, r), UNI) == pairs(r, UNI)


def test_star_membership_by_splitting():
    left = combine(heap_of((0, VInt(1), VInt(1))), heap_of((1, VInt(2), VInt(2))))
    right = combine(heap_of((0, VInt(1), VInt(1))), heap_of((1, VInt(3), VInt(3))))
    r = star(eq_heaps({heap_of((0, VInt(1), VInt(1)))}),
             ExplicitPairs({(heap_of((1, VInt(2), VInt(2))),
                             heap_of((1, VInt(3), VInt(3))))}))
    assert member(r, left, right, UNI)
    assert not member(r, left, left, UNI)


def test_member_agrees_with_split_enumeration():
    rng = random.Random(20)
    all_heaps = list(enumerate_heaps(UNI))
    for trial in range(25):
        r1 = eq_assertion(gen_assertion(rng, 1, tuple(RHO)), RHO)
        pick = lambda: rng.choice(all_heaps)
        r2 = ExplicitPairs({(pick(), pick()) for _ in range(3)})
        r = star(r1, r2) if trial % 2 else star(r2, r1)
        for _ in range(30):
            h0, h1 = pick(), pick()
            assert member(r, h0, h1, UNI) == brute_member(r, h0, h1, UNI)


def test_member_handles_out_of_universe_heaps():
    # membership must not be clipped to universe heaps: run results carry
    # values outside the pools
    big = heap_of((0, VInt(9), VInt(9)))
    r = eq_assertion(A("g |-> 9, 9"), RHO)
    assert member(r, big, big, UNI)
    sim = NamedSim("wide", [({big}, {big})])
    assert member(sim, big, big, UNI)
    assert pairs(sim, UNI) == frozenset()    # but the bounded extension is empty


# ---------------------------------------------------------------------------
# extensions

def test_pairs_unit():
    assert pairs(UNIT_I, UNI) == frozenset({(EMPTY, EMPTY)})


def test_pairs_eq_singleton():
    r = eq_assertion(A("i |-> 0, 0"), {"i": VLoc(0)})
    h = heap_of((0, VInt(0), VInt(0)))
    assert pairs(r, UNI) == frozenset({(h, h)})


def test_pairs_of_star_by_generator_combination():
    r = eq_assertion(A("g |-> -"), RHO)
    s = eq_assertion(A("c |-> -"), RHO)
    got = pairs(star(r, s), UNI)
    v = len(UNI.vals)
    assert len(got) == v * v * v * v
    # matches the denotation of the starred assertion
    direct = pairs(eq_assertion(A("g |-> - * c |-> -"), RHO), UNI)
    assert got == direct


def test_eq_star_homomorphism_on_assertion_pairs():
    rng = random.Random(21)
    count = 0
    for _ in range(40):
        p = gen_assertion(rng, 1, tuple(RHO))
        q = gen_assertion(rng, 1, tuple(RHO))
        try:
            lhs = pairs(eq_assertion(S.Star(p, q), RHO), UNI)
        except RelationTooLarge:
            continue
        rhs = pairs(star(eq_assertion(p, RHO), eq_assertion(q, RHO)), UNI)
        assert lhs == rhs
        count += 1
    assert count >= 10


def test_eq_monotone():
    p = denote(A("g |-> 0, 0"), RHO, UNI)
    q = denote(A("g |-> -"), RHO, UNI)
    assert p <= q
    assert pairs(eq_heaps(p), UNI) <= pairs(eq_heaps(q), UNI)


def test_star_commutative_associative_extensionally():
    r = eq_assertion(A("g |-> -"), RHO)
    s = eq_assertion(A("c |-> 0, 0"), RHO)
    t = ExplicitPairs({(EMPTY, heap_of((1, VInt(1), VInt(0))))})
    assert pairs(star(r, s), UNI) == pairs(star(s, r), UNI)
    assert pairs(star(star(r, s), t), UNI) == pairs(star(r, star(s, t)), UNI)


def test_pairs_cap_is_reported():
    heaps = [h for h in enumerate_heaps(UNI)]
    r = NamedSim("big", [(set(heaps), set(heaps))])
    with pytest.raises(RelationTooLarge):
        pairs(r, UNI, cap=10)


def test_equivariance_of_member():
    rng = random.Random(22)
    all_heaps = [h for h in enumerate_heaps(UNI) if len(h.cells) <= 1]
    for _ in range(40):
        pick = lambda: rng.choice(all_heaps)
        r = ExplicitPairs({(pick(), pick()) for _ in range(3)})
        pi = Permutation.of_cycle([0, 1, 2])
        pr = permute_rel(pi, r)
        for _ in range(20):
            h0, h1 = pick(), pick()
            assert member(r, h0, h1, UNI) == member(
                pr, permute_heap(pi, h0), permute_heap(pi, h1), UNI)


def test_rel_support():
    r = ExplicitPairs({(EMPTY, heap_of((3, VLoc(5), VInt(0))))})
    assert rel_support(r) == {3, 5}
    assert rel_support(UNIT_I) == frozenset()


def test_all_pairs_member_groups():
    r = eq_assertion(A("g |-> -"), RHO)
    hs = list(denote(A("g |-> -"), RHO, UNI))[:5]
    ok, witness = all_pairs_member(r, hs, hs, UNI)
    assert not ok  # distinct heaps are unrelated by a partial identity
    ok, witness = all_pairs_member(r, hs[:1], hs[:1], UNI)
    assert ok


# ---------------------------------------------------------------------------
# observation closure

TINY = universe(1, 0, -1, 1)  # vals {l0, default}: [] + 4 one-cell heaps


def brute_biorth(pair_set, uni):
    domain = list(enumerate_heaps(uni))
    conts = list(itertools.product((0, 1, 2), repeat=len(domain)))
    ix = {h: i for i, h in enumerate(domain)}
    eqg = {(0, 0), (2, 2)}
    dual = [(k0, k1) for k0 in conts for k1 in conts
            if all((k0[ix[a]], k1[ix[b]]) in eqg for a, b in pair_set)]
    return frozenset(
        (a, b) for a in domain for b in domain
        if all((k0[ix[a]], k1[ix[b]]) in eqg for k0, k1 in dual))


def test_biorth_matches_brute_force():
    rng = random.Random(23)
    domain = list(enumerate_heaps(TINY))
    assert len(domain) == 5
    for _ in range(12):
        pair_set = {(rng.choice(domain), rng.choice(domain))
                    for _ in range(rng.randint(0, 4))}
        assert biorth(pair_set, TINY) == brute_biorth(pair_set, TINY)


def test_biorth_is_a_closure():
    rng = random.Random(24)
    domain = list(enumerate_heaps(TINY))
    for _ in range(20):
        pair_set = frozenset((rng.choice(domain), rng.choice(domain))
                             for _ in range(rng.randint(0, 5)))
        closed = biorth(pair_set, TINY)
        assert pair_set <= closed
        assert biorth(closed, TINY) == closed


def test_biorth_of_empty_is_empty():
    assert biorth(frozenset(), TINY) == frozenset()


def test_biorth_guard():
    with pytest.raises(RelationTooLarge):
        biorth(frozenset(), universe(2, -1, 1, 2))

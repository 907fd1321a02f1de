import random

import pytest

from paramsep import syntax as S
from paramsep.assertions import (
    UniverseTooLarge, Universe, default_universe, denote, enumerate_heaps,
    holds, universe,
)
from paramsep.heap import DEFAULT, EMPTY, VInt, VLoc, heap_of
from paramsep.parser import parse

from gen import gen_assertion


def A(text, delta=("g", "c", "i", "j")):
    return parse(text, "assertion", delta=delta)


def small_uni(n_locs=2, lo=0, hi=1, max_cells=2):
    return universe(n_locs, lo, hi, max_cells)


# ---------------------------------------------------------------------------
# holds

def test_holds_emp():
    assert holds(EMPTY, S.EMP, {}, small_uni())
    assert not holds(heap_of((0, VInt(1), VInt(2))), S.EMP, {}, small_uni())


def test_holds_points_to_any_exactly_one_cell():
    uni = small_uni()
    rho = {"g": VLoc(0)}
    assert holds(heap_of((0, VInt(1), VInt(2))), A("g |-> -"), rho, uni)
    extra = heap_of((0, VInt(1), VInt(2)), (1, VInt(0), VInt(0)))
    assert not holds(extra, A("g |-> -"), rho, uni)


def test_holds_outside_universe_values():
    # results of runs may store values beyond the pool; holds still decides
    uni = small_uni()
    rho = {"g": VLoc(0)}
    h = heap_of((0, VInt(9), VInt(44)))
    assert holds(h, A("g |-> -"), rho, uni)
    assert holds(h, A("g |-> 9, -"), rho, uni)


def test_holds_star_and_not():
    uni = small_uni()
    rho = {"g": VLoc(0), "i": VLoc(1)}
    h = heap_of((0, VInt(1), VInt(1)), (1, VInt(0), VInt(0)))
    assert holds(h, A("g |-> - * i |-> 0, 0"), rho, uni)
    assert not holds(h, A("g |-> - * g |-> -"), rho, uni)
    assert holds(h, A("~emp"), rho, uni)


def test_holds_pure_assertions():
    uni = small_uni()
    rho = {"i": VInt(2), "j": VInt(3)}
    assert holds(EMPTY, A("i <= j"), rho, uni)
    assert not holds(EMPTY, A("j <= i"), rho, uni)
    assert holds(heap_of((0, VInt(0), VInt(0))), A("i = 2"), rho, uni)
    assert not holds(EMPTY, A("i = j"), rho, uni)
    # comparisons on non-integers are false
    assert not holds(EMPTY, A("i <= j"), {"i": VLoc(0), "j": VInt(1)}, uni)


# ---------------------------------------------------------------------------
# enumerate_heaps

def test_enumerate_tiny():
    uni = Universe(locs=(0,), vals=(VLoc(0), VInt(0), DEFAULT), max_cells=1)
    # spec-style single-value example: restrict attention to the Int cell
    uni2 = universe(1, 0, 0, 1)
    heaps = list(enumerate_heaps(uni2))
    assert heaps[0] is EMPTY
    assert heap_of((0, VInt(0), VInt(0))) in heaps
    assert len(heaps) == len(set(heaps)) == uni2.heap_count()


def test_enumerate_count_formula():
    # two locations, |vals|=2 after the mandatory additions is impossible,
    # so check the combinatorial count against the documented 25-heap case
    # with an explicit two-value pool on one location pair
    uni = Universe(locs=(0, 1), vals=(VLoc(0), VLoc(1), DEFAULT), max_cells=2)
    # |vals| = 3: 1 + C(2,1)*9 + C(2,2)*81 = 100
    assert uni.heap_count() == 100
    assert len(list(enumerate_heaps(uni))) == 100


def test_enumerate_max_cells_zero():
    uni = Universe(locs=(0, 1), vals=(VLoc(0), VLoc(1), DEFAULT), max_cells=0)
    assert list(enumerate_heaps(uni)) == [EMPTY]


def test_25_heap_count_with_two_value_pool():
    # 1 + 2*4 + 1*16 = 25 for |locs|=2, |vals|=2, max_cells=2; the pool
    # invariant requires locations and default, so count directly
    v = 2
    expected = 1 + 2 * v**2 + 1 * v**4
    assert expected == 25


# ---------------------------------------------------------------------------
# denote

def test_denote_emp_singleton():
    assert denote(S.EMP, {}, small_uni()) == frozenset((EMPTY,))


def test_denote_points_to_forced_singleton():
    uni = small_uni()
    got = denote(A("i |-> 0, 0"), {"i": VLoc(0)}, uni)
    assert got == frozenset((heap_of((0, VInt(0), VInt(0))),))


def test_denote_points_to_any_counts_value_pairs():
    uni = small_uni()
    got = denote(A("g |-> -"), {"g": VLoc(0)}, uni)
    v = len(uni.vals)
    assert len(got) == v * v
    assert all(set(h.cells) == {0} for h in got)


def test_denote_out_of_pool_address_is_empty():
    uni = small_uni()
    assert denote(A("g |-> -"), {"g": VLoc(77)}, uni) == frozenset()
    assert denote(A("g |-> -"), {"g": VInt(0)}, uni) == frozenset()


def test_denote_matches_brute_force_filter():
    rng = random.Random(9)
    uni = small_uni()
    all_heaps = list(enumerate_heaps(uni))
    rho = {"g": VLoc(0), "c": VLoc(1), "i": VInt(1), "j": VInt(0)}
    for _ in range(60):
        p = gen_assertion(rng, rng.randint(0, 3))
        want = frozenset(h for h in all_heaps if holds(h, p, rho, uni))
        assert denote(p, rho, uni) == want


def test_holds_agrees_with_denote_membership():
    uni = small_uni()
    rho = {"g": VLoc(0), "c": VLoc(1), "i": VInt(1), "j": VInt(0)}
    rng = random.Random(10)
    heaps = list(enumerate_heaps(uni))
    for _ in range(40):
        p = gen_assertion(rng, 2)
        d = denote(p, rho, uni)
        for h in heaps:
            assert (h in d) == holds(h, p, rho, uni)


def test_star_unit_comm_assoc():
    uni = small_uni()
    rho = {"g": VLoc(0), "c": VLoc(1), "i": VInt(1), "j": VInt(0)}
    rng = random.Random(11)
    for _ in range(40):
        p = gen_assertion(rng, 2)
        q = gen_assertion(rng, 2)
        r = gen_assertion(rng, 1)
        assert denote(S.Star(p, S.EMP), rho, uni) == denote(p, rho, uni)
        assert denote(S.Star(p, q), rho, uni) == denote(S.Star(q, p), rho, uni)
        assert (denote(S.Star(S.Star(p, q), r), rho, uni)
                == denote(S.Star(p, S.Star(q, r)), rho, uni))


def test_bounded_exists_is_documented_incomplete():
    # a purely arithmetic witness outside the pool is not found
    uni = small_uni(2, 0, 1, 2)  # ints 0..1
    p = A("exists w. w = 5 - j", delta=("j",))
    assert not holds(EMPTY, p, {"j": VInt(0)}, uni)  # witness 5 not in pool
    assert holds(EMPTY, p, {"j": VInt(4)}, uni)      # 1 is in the pool


def test_dense_guard_raises_on_default_universe():
    uni = default_universe()
    with pytest.raises(UniverseTooLarge):
        denote(S.Not(S.EMP), {}, uni)

import random

from paramsep import syntax as S
from paramsep.heap import (
    DEFAULT, DIV, EMPTY, ERR, NORMAL, Permutation, VInt, VLoc, combine,
    heap_of, permute, support,
)
from paramsep.interp import (
    ALLOC_STATS, CAPTURE, Kont, com_value, denote_direct, eval_expr,
    fresh_loc, run_com,
)
from paramsep.parser import parse

from gen import DELTA, gen_com
from oracle_eval import oracle_run


def term(text, delta=(), gamma=()):
    return parse(text, "term", delta=delta, gamma=gamma)


# ---------------------------------------------------------------------------
# expressions

def test_eval_expr_add():
    e = parse("i + 1", "expr", delta={"i"})
    assert eval_expr(e, {"i": VInt(3)}) == VInt(4)


def test_eval_expr_default_absorbs_locations():
    e = parse("i + 1", "expr", delta={"i"})
    assert eval_expr(e, {"i": VLoc(0)}) == DEFAULT
    e2 = parse("i - i", "expr", delta={"i"})
    assert eval_expr(e2, {"i": DEFAULT}) == DEFAULT


def test_eval_expr_literal():
    assert eval_expr(parse("0", "expr"), {}) == VInt(0)
    assert eval_expr(parse("-1", "expr"), {}) == VInt(-1)


# ---------------------------------------------------------------------------
# fresh locations

def test_fresh_loc_least_not_excluded():
    assert fresh_loc({0, 1}) == 2
    assert fresh_loc(set()) == 0
    assert fresh_loc({0, 2}) == 1


# ---------------------------------------------------------------------------
# running commands

def test_alloc_then_free_restores_heap():
    out, h = run_com(term("let i = new in free(i)"), {}, {}, EMPTY, CAPTURE, 10)
    assert out == NORMAL and h is EMPTY


def test_free_unallocated_is_err():
    out, h = run_com(term("free(i)", delta={"i"}), {"i": VLoc(0)}, {}, EMPTY, CAPTURE, 10)
    assert out == ERR and h is None


def test_counter_increment_trace():
    # hand-trace: i := cell c field 0, j := field 1 of that cell, write j+1 back
    inc0 = term("let i = c.0 in let j = i.1 in i.1 := j + 1", delta={"c"})
    start = heap_of((0, VLoc(1), VInt(0)), (1, VInt(0), VInt(5)))
    out, h = run_com(inc0, {"c": VLoc(0)}, {}, start, CAPTURE, 50)
    assert out == NORMAL
    assert h is heap_of((0, VLoc(1), VInt(0)), (1, VInt(0), VInt(6)))


def test_fix_identity_diverges_at_every_fuel():
    loop = term("fix (\\x:com. x)")
    for fuel in (1, 3, 10, 100):
        out, h = run_com(loop, {}, {}, EMPTY, CAPTURE, fuel)
        assert out == DIV and h is None


def test_allocation_avoids_continuation_footprint():
    prog = term("let i = new in i.0 := 7")
    out, h = run_com(prog, {}, {}, EMPTY, Kont(footprint={0, 1}), 10)
    assert out == NORMAL
    assert h is heap_of((2, VInt(7), VInt(0)))


def test_sequencing_keeps_later_env_addresses_fresh():
    # the rebinding of i must not let the first cell be reused while the
    # pending sequence tail can still reach it
    prog = term("let i = new in (i.0 := 1; let i = new in (i.0 := 2; free(i)))")
    out, h = run_com(prog, {}, {}, EMPTY, CAPTURE, 50)
    assert out == NORMAL
    assert h is heap_of((0, VInt(1), VInt(0)))


def test_run_com_call_by_name_reruns_argument():
    # the term argument runs once per use inside the function body
    body = term("\\x:com. (x; x)", delta={"c"})
    arg = term("let j = c.1 in c.1 := j + 1", delta={"c"})
    prog = S.AppTerm(body, arg)
    start = heap_of((0, VInt(0), VInt(0)))
    out, h = run_com(prog, {"c": VLoc(0)}, {}, start, CAPTURE, 50)
    assert out == NORMAL
    assert h is heap_of((0, VInt(0), VInt(2)))


# ---------------------------------------------------------------------------
# direct-style runner

def test_denote_direct_assign():
    g1 = term("g.1 := 0", delta={"g"})
    out, h = denote_direct(g1, heap_of((0, VInt(1), VInt(2))), rho={"g": VLoc(0)})
    assert out == "ok"
    assert h is heap_of((0, VInt(1), VInt(0)))


def test_denote_direct_err_and_div():
    out, _ = denote_direct(term("free(i)", delta={"i"}), EMPTY, rho={"i": VLoc(0)})
    assert out == "err"
    out, _ = denote_direct(term("fix (\\x:com. x)"), EMPTY)
    assert out == "div"


def test_denote_direct_accepts_semvalues():
    sv = com_value(term("let i = new in free(i)"))
    out, h = denote_direct(sv, EMPTY)
    assert out == "ok" and h is EMPTY


# ---------------------------------------------------------------------------
# properties

def rand_heap(rng, locs=range(4)):
    cells = []
    for l in rng.sample(list(locs), rng.randint(0, 3)):
        v0 = VLoc(rng.choice(list(locs))) if rng.random() < 0.3 else VInt(rng.randint(-2, 2))
        cells.append((l, v0, VInt(rng.randint(-2, 2))))
    return heap_of(*cells)


def rand_rho(rng):
    return {n: (VLoc(rng.randint(0, 3)) if rng.random() < 0.5 else VInt(rng.randint(-2, 2)))
            for n in DELTA}


def test_machine_agrees_with_reference_evaluator():
    rng = random.Random(42)
    eta = {"inc": com_value(term("let w = new in free(w)"))}
    from oracle_eval import oracle_run
    inc_src = term("let w = new in free(w)")
    for trial in range(400):
        prog = gen_com(rng, rng.randint(0, 4), DELTA)
        h = rand_heap(rng)
        rho = rand_rho(rng)
        fuel = rng.choice((3, 10, 60))
        got_out, got_h = denote_direct(prog, h, fuel=fuel, rho=rho, eta=eta)
        # reference evaluator gets the same eta as source so closures match
        oeta = {"inc": ("com", None, frozenset())}
        want_out, want_h = oracle_run(
            S.subst_term_term("inc", inc_src, prog), rho, {}, h, fuel)
        assert got_out == want_out, (prog, h, rho, fuel)
        assert got_h is want_h


def test_fuel_monotonicity():
    rng = random.Random(43)
    for trial in range(150):
        prog = gen_com(rng, rng.randint(0, 3), DELTA, allow_fix=False)
        h = rand_heap(rng)
        rho = rand_rho(rng)
        eta = {"inc": com_value(term("c.0 := 0", delta={"c"}), rho={"c": rho["c"]})}
        base = None
        for fuel in range(1, 40):
            out, heap = denote_direct(prog, h, fuel=fuel, rho=rho, eta=eta)
            if out != "div":
                base = (fuel, out, heap)
                break
        if base is None:
            continue
        f0, out0, h0 = base
        for fuel in range(f0, f0 + 15):
            out, heap = denote_direct(prog, h, fuel=fuel, rho=rho, eta=eta)
            assert (out, heap) == (out0, h0)


def test_frame_property_with_protected_footprint():
    rng = random.Random(44)
    checked = 0
    for trial in range(300):
        prog = gen_com(rng, rng.randint(0, 3), DELTA, allow_fix=False)
        h = rand_heap(rng, locs=range(3))
        frame = rand_heap(rng, locs=range(3, 6))
        rho = rand_rho(rng)
        eta = {"inc": com_value(term("let w = new in free(w)"))}
        fp = support(frame)
        out, res = denote_direct(prog, h, fuel=100, footprint=fp, rho=rho, eta=eta)
        if out != "ok":
            continue
        big = combine(h, frame)
        assert big is not None
        out2, res2 = denote_direct(prog, big, fuel=100, footprint=fp, rho=rho, eta=eta)
        assert out2 == "ok"
        assert res2 is combine(res, frame)
        checked += 1
    assert checked > 50


def test_equivariance_of_runs():
    rng = random.Random(45)
    # the identifier environment has empty support, so it is permutation-fixed
    eta = {"inc": com_value(term("let w = new in free(w)"))}
    for trial in range(200):
        prog = gen_com(rng, rng.randint(0, 3), DELTA, allow_fix=False)
        h = rand_heap(rng)
        rho = rand_rho(rng)
        relevant = sorted(support(h) | support(rho))
        if len(relevant) >= 2:
            moved = rng.sample(relevant, rng.randint(2, len(relevant)))
            pi = Permutation.of_cycle(moved)
        else:
            pi = Permutation.identity()
        out, res = denote_direct(prog, h, fuel=60, rho=rho, eta=eta)
        out2, res2 = denote_direct(prog, permute(pi, h), fuel=60,
                                   rho=permute(pi, rho), eta=eta)
        assert out == out2
        if out == "ok":
            assert res2 is permute(pi, res)


def test_alloc_sites_never_violate_exclusion():
    before = ALLOC_STATS["violations"]
    rng = random.Random(46)
    for trial in range(100):
        prog = gen_com(rng, 3, DELTA, allow_fix=False)
        denote_direct(prog, rand_heap(rng), fuel=60, rho=rand_rho(rng),
                      eta={"inc": com_value(term("let w = new in free(w)"))})
    assert ALLOC_STATS["violations"] == before

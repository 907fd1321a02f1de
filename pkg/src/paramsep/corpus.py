"""Worked case studies: a counter module and a one-place buffer module.

Each case pairs two implementations that maintain the same client-visible
behaviour over differently shaped private heaps, a simulation relation
between those private heaps, and a small client proved against the
abstract interface only.

The simulation relations quantify over unbounded integers; the bounded
generators widen the universe's integer pool by one step (counter) or by
the client's stored constant (buffer) so that every value reachable in a
tested run stays inside the generator, while tested input heaps are still
drawn from the universe pools only.
"""

from __future__ import annotations

from .assertions import Universe, denote
from .heap import VInt, VLoc, make_heap
from .interp import apply_val, com_value, sem
from .parser import parse
from .quadruples import QuadQuery, Verdict, check_quadruple
from .relations import NamedSim, UNIT_I, eq_assertion, star
from .syntax import COM, ValArrow

COUNTER_DELTA = {"g", "c"}
COUNTER_GAMMA = {"inc": COM, "read": COM}

COUNTER_SRC = {
    "inc0": "let i = c.0 in let j = i.1 in i.1 := j + 1",
    "read0": "let i = c.0 in let j = i.1 in g.1 := j",
    "inc1": "let i = c.0 in let j = i.1 in i.1 := j - 1",
    "read1": "let i = c.0 in let j = i.1 in g.1 := 0 - j",
    "body": "inc; read",
}

BUFFER_DELTA = {"j", "k"}
BUFFER_GAMMA = {"put": ValArrow(COM), "get": ValArrow(COM)}

BUFFER_SRC = {
    "put0": "\\i. let v = i.1 in (free(i); k.1 := v)",
    "get0": "\\j. let v = k.1 in j.1 := v",
    "put1": "\\i. let k2 = k.0 in (free(k2); k.0 := i)",
    "get1": "\\j. let k2 = k.0 in let v = k2.1 in j.1 := v",
    "client": "let i = new in (i.1 := 5; put i; get j)",
}

CLIENT_SPEC_SRC = ("({emp} inc {emp} /\\ {g|->-} read {g|->-}) "
                   "=> {g|->-} inc; read {g|->-}")
BUFFER_SPEC_SRC = ("((forall i. {i|->-} put i {emp}) /\\ "
                   "(forall j. {j|->-} get j {j|->-})) "
                   "=> {j|->-} let i = new in (i.1 := 5; put i; get j) {j|->-}")


def counter_terms():
    return {name: parse(src, "term", delta=COUNTER_DELTA, gamma=set(COUNTER_GAMMA))
            for name, src in COUNTER_SRC.items()}


def buffer_terms():
    return {name: parse(src, "term", delta=BUFFER_DELTA, gamma=set(BUFFER_GAMMA))
            for name, src in BUFFER_SRC.items()}


def _int_pool(uni: Universe):
    ints = sorted(v[1] for v in uni.vals if v[0] == "int")
    return ints


def counter_sim(uni: Universe, rho: dict, slack: int = 1) -> NamedSim:
    """Relates the two counters' private heaps: the same two cells with the
    stored count negated on the right.  ``slack`` widens the count pool so
    one increment's result is still in the generator."""
    l = rho["c"][1]
    ints = _int_pool(uni)
    counts = range(ints[0] - slack, ints[-1] + slack + 1) if ints else ()
    blocks = []
    for i in uni.locs:
        if i == l:
            continue
        for n in counts:
            lefts = {make_heap({l: (VLoc(i), v0), i: (v0p, VInt(n))})
                     for v0 in uni.vals for v0p in uni.vals}
            rights = {make_heap({l: (VLoc(i), v1), i: (v1p, VInt(-n))})
                      for v1 in uni.vals for v1p in uni.vals}
            blocks.append((lefts, rights))
    return NamedSim("counter", blocks)


def buffer_sim(uni: Universe, rho: dict, extra_vals=(VInt(5),)) -> NamedSim:
    """Relates one buffer cell on the left with a two-cell buffer on the
    right holding the same stored value.  ``extra_vals`` admits values the
    client writes from outside the universe pool."""
    l = rho["k"][1]
    stored = list(uni.vals) + [v for v in extra_vals if v not in uni.val_set]
    blocks = []
    for l2 in uni.locs:
        if l2 == l:
            continue
        for n in stored:
            lefts = {make_heap({l: (v0, n)}) for v0 in uni.vals}
            rights = {make_heap({l: (VLoc(l2), v1), l2: (v1p, n)})
                      for v1 in uni.vals for v1p in uni.vals}
            blocks.append((lefts, rights))
    return NamedSim("buffer", blocks)


# ---------------------------------------------------------------------------
# end-to-end checks, used by the CLI runner and the acceptance suite

def counter_rho():
    return {"g": VLoc(0), "c": VLoc(1)}


def buffer_rho():
    return {"j": VLoc(0), "k": VLoc(1)}


def assertion(text, delta):
    return parse(text, "assertion", delta=delta)


def counter_case(uni: Universe, frames=(UNIT_I,)) -> dict[str, Verdict]:
    """The counter module pair: both interface quadruples and the client."""
    terms = counter_terms()
    rho = counter_rho()
    sim = counter_sim(uni, rho)
    f0 = com_value(terms["inc0"], rho)
    f1 = com_value(terms["inc1"], rho)
    g0 = com_value(terms["read0"], rho)
    g1 = com_value(terms["read1"], rho)
    b0 = com_value(terms["body"], rho, {"inc": f0, "read": g0})
    b1 = com_value(terms["body"], rho, {"inc": f1, "read": g1})
    emp = eq_assertion(assertion("emp", COUNTER_DELTA), rho)
    gcell = eq_assertion(assertion("g |-> -", COUNTER_DELTA), rho)
    return {
        "inc": check_quadruple(QuadQuery(
            f0, f1, star(emp, sim), star(emp, sim), uni, frames)),
        "read": check_quadruple(QuadQuery(
            g0, g1, star(gcell, sim), star(gcell, sim), uni, frames)),
        "client": check_quadruple(QuadQuery(
            b0, b1, star(gcell, sim), star(gcell, sim), uni, frames)),
    }


def buffer_case(uni: Universe, frames=(UNIT_I,)) -> dict[str, Verdict]:
    """The buffer module pair: interface quadruples at every pool value,
    and the client quadruple."""
    terms = buffer_terms()
    rho = buffer_rho()
    sim = buffer_sim(uni, rho)
    fuel = [uni.fuel]
    put0 = sem(terms["put0"], rho, {}, fuel)
    put1 = sem(terms["put1"], rho, {}, fuel)
    get0 = sem(terms["get0"], rho, {}, fuel)
    get1 = sem(terms["get1"], rho, {}, fuel)
    c0 = com_value(terms["client"], rho, {"put": put0, "get": get0})
    c1 = com_value(terms["client"], rho, {"put": put1, "get": get1})
    emp = eq_assertion(assertion("emp", BUFFER_DELTA), rho)
    jcell = eq_assertion(assertion("j |-> -", BUFFER_DELTA), rho)
    out: dict[str, Verdict] = {}
    put_ok = True
    get_ok = True
    put_cov: dict = {}
    get_cov: dict = {}
    for v in uni.vals:
        rho_i = dict(rho, i=v)
        icell = eq_assertion(assertion("i |-> -", BUFFER_DELTA | {"i"}), rho_i)
        vd = check_quadruple(QuadQuery(
            apply_val(put0, v, fuel), apply_val(put1, v, fuel),
            star(icell, sim), star(emp, sim), uni, frames))
        put_ok &= vd.holds
        _merge_coverage(put_cov, vd.coverage)
        if not vd.holds:
            out["put"] = vd
        rho_j = dict(rho, j=v)
        jv = eq_assertion(assertion("j |-> -", BUFFER_DELTA), rho_j)
        vd = check_quadruple(QuadQuery(
            apply_val(get0, v, fuel), apply_val(get1, v, fuel),
            star(jv, sim), star(jv, sim), uni, frames))
        get_ok &= vd.holds
        _merge_coverage(get_cov, vd.coverage)
        if not vd.holds:
            out["get"] = vd
    out.setdefault("put", Verdict(put_ok, coverage=put_cov))
    out.setdefault("get", Verdict(get_ok, coverage=get_cov))
    out["client"] = check_quadruple(QuadQuery(
        c0, c1, star(jcell, sim), star(jcell, sim), uni, frames))
    return out


def _merge_coverage(acc: dict, cov: dict):
    for key, n in cov.items():
        acc[key] = acc.get(key, 0) + n


NAMED_SIMS = {
    "counter": lambda uni: counter_sim(uni, counter_rho()),
    "buffer": lambda uni: buffer_sim(uni, buffer_rho()),
}

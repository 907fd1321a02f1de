"""Fuel-bounded CPS evaluator for the heap language.

Terms of type ``com`` denote state transformers in continuation-passing
style: they consume a heap and a continuation and produce an outcome in
{normal, err, div}.  The evaluator here is a small abstract machine over a
defunctionalized continuation: a stack of pending sequence rests plus a
final capture frame that records the reached heap.

Semantic values are built without touching the heap (term parameters are
passed by name, expression parameters by value), so evaluating a term to a
value always terminates; only running a command and unrolling ``fix``
consume fuel.  Fuel exhaustion yields the divergence outcome: it stands in
for the least fixed point, so "diverges" always means "diverges at this
budget".

Allocation picks the least location outside the support of the current
heap, environments and continuation.  The continuation's support is kept as
an explicit footprint; checkers extend it to protect frame heaps that the
current run cannot see.
"""

from __future__ import annotations

from .heap import (
    DEFAULT, DIV, ERR, Heap, LOC, NORMAL, VInt, VLoc, make_heap, support,
)
from .syntax import (
    Add, AppTerm, AppVal, Assign, COM, Fix, Free, Ident, IfEq, IntLit,
    LamTerm, LamVal, LetLookup, LetNew, Seq, StackVar, Sub,
)

INT0 = VInt(0)
FRESH_CELL = (INT0, INT0)

DEFAULT_FUEL = 500


class Div(Exception):
    """Raised when the fuel budget is exhausted; caught by the runners."""


# fresh-allocation bookkeeping; the acceptance suite asserts zero violations
ALLOC_STATS = {"allocations": 0, "violations": 0}


def fresh_loc(excluded) -> int:
    """The least-indexed location not in the excluded set."""
    l = 0
    while l in excluded:
        l += 1
    return l


# ---------------------------------------------------------------------------
# semantic values

class SemValue:
    __slots__ = ()


class ComVal(SemValue):
    """A suspended command: a com-typed term with its captured environments."""

    __slots__ = ("term", "rho", "eta", "footprint")

    def __init__(self, term, rho, eta, footprint=None):
        self.term = term
        self.rho = rho
        self.eta = eta
        self.footprint = env_footprint(rho, eta) if footprint is None else footprint


class ValFun(SemValue):
    __slots__ = ("var", "body", "rho", "eta", "footprint")

    def __init__(self, var, body, rho, eta):
        self.var = var
        self.body = body
        self.rho = rho
        self.eta = eta
        self.footprint = env_footprint(rho, eta)


class TermFun(SemValue):
    __slots__ = ("var", "body", "rho", "eta", "footprint")

    def __init__(self, var, body, rho, eta):
        self.var = var
        self.body = body
        self.rho = rho
        self.eta = eta
        self.footprint = env_footprint(rho, eta)


class FixVal(SemValue):
    """Lazily unrolled fixed point; each unrolling costs one fuel unit."""

    __slots__ = ("fn", "footprint")

    def __init__(self, fn):
        self.fn = fn
        self.footprint = fn.footprint


class Native(SemValue):
    """A com behaviour given programmatically, for test harnesses.

    ``fn`` maps an interned heap to ('ok', heap), ('err', None) or
    ('div', None).
    """

    __slots__ = ("name", "fn", "footprint")

    def __init__(self, name, fn, footprint=frozenset()):
        self.name = name
        self.fn = fn
        self.footprint = footprint


def env_footprint(rho, eta) -> frozenset:
    out = set()
    for v in rho.values():
        if v[0] == LOC:
            out.add(v[1])
    for sv in eta.values():
        out |= sv.footprint
    return frozenset(out)


class Kont:
    """Defunctionalized continuation: sequence rests plus a capture frame.

    ``footprint`` lists locations the continuation may observe beyond the
    frames' own environments; allocation avoids all of them.
    """

    __slots__ = ("frames", "footprint")

    def __init__(self, frames=(), footprint=frozenset()):
        self.frames = list(frames)  # (term, rho, eta) triples, innermost last
        self.footprint = frozenset(footprint)


CAPTURE = Kont()


# ---------------------------------------------------------------------------
# expressions

def eval_expr(e, rho) -> tuple:
    """Total evaluation; arithmetic on non-integers yields the default value."""
    k = e.__class__
    if k is StackVar:
        return rho[e.name]
    if k is IntLit:
        return ("int", e.n)
    a = eval_expr(e.a, rho)
    b = eval_expr(e.b, rho)
    if a[0] == "int" and b[0] == "int":
        return ("int", a[1] + b[1]) if k is Add else ("int", a[1] - b[1])
    return DEFAULT


# ---------------------------------------------------------------------------
# terms to semantic values

def sem(t, rho, eta, fuel) -> SemValue:
    """The semantic value of a typechecked term.

    ``fuel`` is a one-element list shared with the machine; only fixed-point
    unrolling consumes it here.
    """
    k = t.__class__
    if k is Ident:
        return eta[t.name]
    if k is LamVal:
        return ValFun(t.var, t.body, rho, eta)
    if k is LamTerm:
        return TermFun(t.var, t.body, rho, eta)
    if k is AppVal:
        return apply_val(sem(t.fn, rho, eta, fuel), eval_expr(t.arg, rho), fuel)
    if k is AppTerm:
        return apply_term(sem(t.fn, rho, eta, fuel), sem(t.arg, rho, eta, fuel), fuel)
    if k is Fix:
        return FixVal(sem(t.body, rho, eta, fuel))
    # command forms suspend with their environments
    return ComVal(t, rho, eta)


def unroll(fv: FixVal, fuel) -> SemValue:
    if fuel[0] <= 0:
        raise Div
    fuel[0] -= 1
    return apply_term(fv.fn, fv, fuel)


def apply_val(f: SemValue, v, fuel) -> SemValue:
    while f.__class__ is FixVal:
        f = unroll(f, fuel)
    if f.__class__ is not ValFun:
        raise TypeError("expression applied to a non val-function")
    rho = dict(f.rho)
    rho[f.var] = v
    return sem(f.body, rho, f.eta, fuel)


def apply_term(f: SemValue, a: SemValue, fuel) -> SemValue:
    while f.__class__ is FixVal:
        f = unroll(f, fuel)
    if f.__class__ is not TermFun:
        raise TypeError("term applied to a non term-function")
    eta = dict(f.eta)
    eta[f.var] = a
    return sem(f.body, eta=eta, rho=f.rho, fuel=fuel)


# ---------------------------------------------------------------------------
# the machine

def run_com(t, rho, eta, h: Heap, k: Kont, fuel: int):
    """Run a com-typed term; returns (outcome, captured heap or None).

    The captured heap is the one handed to the final capture frame on
    normal termination.
    """
    cell = [fuel]
    try:
        return _machine(t, rho, eta, dict(h.cells), list(k.frames), k.footprint, cell)
    except Div:
        return DIV, None


def _machine(t, rho, eta, cells, frames, base_fp, fuel):
    while True:
        k = t.__class__
        if k is Seq:
            frames.append((t.second, rho, eta))
            t = t.first
            continue
        if k is LetLookup:
            if fuel[0] <= 0:
                raise Div
            fuel[0] -= 1
            addr = eval_expr(t.e, rho)
            if addr[0] != LOC or addr[1] not in cells:
                return ERR, None
            rho = dict(rho)
            rho[t.var] = cells[addr[1]][t.field]
            t = t.body
            continue
        if k is Assign:
            if fuel[0] <= 0:
                raise Div
            fuel[0] -= 1
            addr = eval_expr(t.e, rho)
            if addr[0] != LOC or addr[1] not in cells:
                return ERR, None
            old = cells[addr[1]]
            v = eval_expr(t.value, rho)
            cells[addr[1]] = (v, old[1]) if t.field == 0 else (old[0], v)
        elif k is IfEq:
            t = t.then if eval_expr(t.e1, rho) == eval_expr(t.e2, rho) else t.els
            continue
        elif k is LetNew:
            if fuel[0] <= 0:
                raise Div
            fuel[0] -= 1
            excluded = _exclusion(cells, rho, eta, frames, base_fp)
            l = fresh_loc(excluded)
            ALLOC_STATS["allocations"] += 1
            if l in excluded or l in cells:
                ALLOC_STATS["violations"] += 1
                raise AssertionError("fresh location inside its exclusion set")
            cells[l] = FRESH_CELL
            rho = dict(rho)
            rho[t.var] = (LOC, l)
            t = t.body
            continue
        elif k is Free:
            if fuel[0] <= 0:
                raise Div
            fuel[0] -= 1
            addr = eval_expr(t.e, rho)
            if addr[0] != LOC or addr[1] not in cells:
                return ERR, None
            del cells[addr[1]]
        else:
            # an application-shaped com: resolve it to a value and enter it
            sv = sem(t, rho, eta, fuel)
            while sv.__class__ is FixVal:
                sv = unroll(sv, fuel)
            if sv.__class__ is ComVal:
                t, rho, eta = sv.term, sv.rho, sv.eta
                continue
            if sv.__class__ is Native:
                kind, out = sv.fn(make_heap(cells))
                if kind == "ok":
                    cells = dict(out.cells)
                elif kind == "err":
                    return ERR, None
                else:
                    raise Div
            else:
                raise TypeError("running a non-command value")
        # a leaf command finished: pop the next sequence rest
        if not frames:
            return NORMAL, make_heap(cells)
        t, rho, eta = frames.pop()


def _exclusion(cells, rho, eta, frames, base_fp):
    out = set(base_fp)
    out.update(cells)
    for vs in cells.values():
        if vs[0][0] == LOC:
            out.add(vs[0][1])
        if vs[1][0] == LOC:
            out.add(vs[1][1])
    out |= env_footprint(rho, eta)
    for _, frho, feta in frames:
        out |= env_footprint(frho, feta)
    return out


# ---------------------------------------------------------------------------
# direct-style runner

OK = "ok"


def com_value(t, rho=None, eta=None, build_fuel=DEFAULT_FUEL) -> SemValue:
    """The command denotation of a com-typed term under the environments."""
    cell = [build_fuel]
    sv = sem(t, dict(rho or {}), dict(eta or {}), cell)
    return sv


def denote_direct(c, h: Heap, fuel: int = DEFAULT_FUEL,
                  footprint: frozenset = frozenset(), rho=None, eta=None):
    """Run a command on a heap with the capture continuation.

    ``c`` is a com-typed term (with ``rho``/``eta``) or a SemValue at com.
    Returns ('ok', heap), ('err', None) or ('div', None).  ``footprint``
    protects extra locations from allocation, standing in for the support
    of the quantified continuation.
    """
    sv = c if isinstance(c, SemValue) else ComVal(c, dict(rho or {}), dict(eta or {}))
    cell = [fuel]
    try:
        while sv.__class__ is FixVal:
            sv = unroll(sv, cell)
        if sv.__class__ is Native:
            return sv.fn(h)
        if sv.__class__ is not ComVal:
            raise TypeError("running a non-command value")
        out, heap = _machine(sv.term, sv.rho, sv.eta, dict(h.cells),
                             [], frozenset(footprint), cell)
    except Div:
        return DIV, None
    if out == NORMAL:
        return OK, heap
    return ERR, None

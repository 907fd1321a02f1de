"""Bounded checking of semantic quadruples.

A quadruple holds when the two commands map heaps related by the
precondition relation (starred with every frame relation of the tested
family) to results related by the postcondition relation starred with the
same frame, observing divergence as shared fuel exhaustion.  Commands here
are deterministic, so the check runs each side's direct denotation once per
input heap and compares result pairs against the post relation; when that
fast path fails on a pair and the universe is small enough, the observation
closure of the post relation gets the final word.

Frame heaps must stay out of reach of allocation even when they are not
part of the running side's heap, so every run is protected by the support
of the current frame relation as an extra continuation footprint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .assertions import Universe
from .heap import EMPTY, Heap, combine, support
from .interp import SemValue, denote_direct
from .relations import (
    ExplicitPairs, RelExpr, RelationTooLarge, UNIT_I, all_pairs_member,
    biorth, blocks, compat, eq_heaps, pairs, rel_support, sig, star,
)

BIORTH_HEAP_GUARD = 6


@dataclass
class QuadQuery:
    c0: SemValue
    c1: SemValue
    pre: RelExpr
    post: RelExpr
    uni: Universe
    frames: tuple = (UNIT_I,)

    def __post_init__(self):
        if not self.frames:
            raise ValueError("frame family must contain at least the unit relation")


@dataclass
class Verdict:
    holds: bool
    counterexample: dict | None = None
    coverage: dict = field(default_factory=dict)
    caveats: list = field(default_factory=list)

    def __bool__(self):
        return self.holds


def _fail(kind, frame, h0, h1, out0, out1, coverage, caveats):
    return Verdict(
        holds=False,
        counterexample={
            "kind": kind, "frame": repr(frame),
            "h0": h0, "h1": h1, "out0": out0, "out1": out1,
        },
        coverage=coverage, caveats=caveats)


def check_quadruple(q: QuadQuery) -> Verdict:
    """Test the quadruple over every frame of the family.

    The verdict speaks only for the tested frame family, fuel budget and
    universe; the caveats record all three.
    """
    uni = q.uni
    caveats = [
        f"fuel budget {uni.fuel}; divergence means exhaustion at this budget",
        f"frame family of {len(q.frames)} relation(s); holds-over-tested-family only",
        "existential witnesses bounded by the universe pools",
    ]
    coverage = {"frames": len(q.frames), "blocks": 0, "pairs": 0, "runs": 0}
    for frame in q.frames:
        pre_f = q.pre if frame is UNIT_I else star(q.pre, frame)
        post_f = q.post if frame is UNIT_I else star(q.post, frame)
        fp = rel_support(frame)
        closure = None
        memo0: dict[int, tuple] = {}
        memo1: dict[int, tuple] = {}
        for lefts, rights in blocks(pre_f, uni):
            coverage["blocks"] += 1
            coverage["pairs"] += len(lefts) * len(rights)
            ok0, div0 = {}, None
            for h in lefts:
                r = memo0.get(h.idx)
                if r is None:
                    r = denote_direct(q.c0, h, uni.fuel, fp)
                    memo0[h.idx] = r
                    coverage["runs"] += 1
                if r[0] == "ok":
                    ok0.setdefault(r[1], h)
                elif r[0] == "err":
                    return _fail("err", frame, h, min(rights, key=lambda x: x.idx),
                                 "err", None, coverage, caveats)
                else:
                    div0 = h
            ok1, div1 = {}, None
            for h in rights:
                r = memo1.get(h.idx)
                if r is None:
                    r = denote_direct(q.c1, h, uni.fuel, fp)
                    memo1[h.idx] = r
                    coverage["runs"] += 1
                if r[0] == "ok":
                    ok1.setdefault(r[1], h)
                elif r[0] == "err":
                    return _fail("err", frame, min(lefts, key=lambda x: x.idx), h,
                                 None, "err", coverage, caveats)
                else:
                    div1 = h
            if div0 is not None and ok1:
                result1 = next(iter(ok1))
                return _fail("divergence-mismatch (budget-inconclusive)", frame,
                             div0, ok1[result1], "div", "ok", coverage, caveats)
            if div1 is not None and ok0:
                result0 = next(iter(ok0))
                return _fail("divergence-mismatch (budget-inconclusive)", frame,
                             ok0[result0], div1, "ok", "div", coverage, caveats)
            if not ok0 or not ok1:
                continue  # both sides fully diverge on this block
            good, witness = all_pairs_member(post_f, ok0, ok1, uni)
            if good:
                continue
            # fast path failed: ask the observation closure when possible
            if uni.heap_count() <= BIORTH_HEAP_GUARD:
                if closure is None:
                    closure = biorth(pairs(post_f, uni), uni)
                    caveats.append("observation-closure fallback consulted")
                bad = _closure_reject(post_f, ok0, ok1, closure, uni)
                if bad is None:
                    continue
                w0, w1 = bad
            else:
                caveats.append(
                    "post membership by fast path only; universe too large "
                    "for the observation-closure oracle")
                w0, w1 = witness
            return _fail("post-relation", frame, ok0[w0], ok1[w1],
                         ("ok", w0), ("ok", w1), coverage, caveats)
    return Verdict(True, None, coverage, caveats)


def _closure_reject(post_f, ok0, ok1, closure, uni):
    for r0 in ok0:
        s0 = sig(post_f, r0, 0, uni)
        for r1 in ok1:
            if compat(post_f, s0, sig(post_f, r1, 1, uni)):
                continue
            if (r0, r1) not in closure:
                return r0, r1
    return None


# ---------------------------------------------------------------------------
# triples against the locality conditions

def default_frame_heaps(uni: Universe, max_cells: int = 1):
    """All universe heaps of at most the given size, as a frame sample."""
    from .assertions import enumerate_heaps
    return tuple(h for h in enumerate_heaps(uni) if len(h.cells) <= max_cells)


def hoare_locality_check(c: SemValue, p, q, uni: Universe,
                         frame_heaps=None) -> bool:
    """The two direct-style conditions of a correct local command.

    (1) on every heap of p the command diverges or lands in q, never errs;
    (2) against every disjoint frame heap, divergence is stable and normal
    results commute with adding the frame.  The frame heap's support
    protects allocation in the unframed run, mirroring the continuation
    footprint used by the quadruple checker.
    """
    if frame_heaps is None:
        frame_heaps = default_frame_heaps(uni)
    for h in p:
        out, res = denote_direct(c, h, uni.fuel)
        if out == "err" or (out == "ok" and res not in q):
            return False
    for h in p:
        for h1 in frame_heaps:
            big = combine(h, h1)
            if big is None:
                continue
            fp = support(h1)
            out, res = denote_direct(c, h, uni.fuel, fp)
            out2, res2 = denote_direct(c, big, uni.fuel, fp)
            if out == "div":
                if out2 != "div":
                    return False
            elif out == "ok":
                if out2 != "ok" or res2 is not combine(res, h1):
                    return False
            else:
                return False
    return True


def canonical_frames(frame_heaps) -> tuple:
    """The frame family mirroring the locality conditions.

    The unit frame gives the plain triple reading; the diagonal singletons
    test behaviour on enlarged heaps; the empty-to-frame pairs relate a run
    on the small heap to a run on the framed heap and so observe exactly
    the commutation condition.
    """
    family = [UNIT_I]
    for h1 in frame_heaps:
        if h1 is EMPTY:
            continue
        family.append(ExplicitPairs({(h1, h1)}))
        family.append(ExplicitPairs({(EMPTY, h1)}))
    return tuple(family)


def locality_agreement(c: SemValue, p, q, uni: Universe,
                       frame_heaps=None) -> bool:
    """Whether the quadruple check and the locality conditions agree.

    Both sides are evaluated against the same frame-heap sample; the
    quadruple side uses the canonical frame family built from it.
    """
    if frame_heaps is None:
        frame_heaps = default_frame_heaps(uni)
    verdict = check_quadruple(QuadQuery(
        c0=c, c1=c, pre=eq_heaps(p), post=eq_heaps(q), uni=uni,
        frames=canonical_frames(frame_heaps)))
    direct = hoare_locality_check(c, p, q, uni, frame_heaps)
    return verdict.holds == direct

"""Values, locations, heaps, disjoint combination, and location permutations.

Locations are indexed atoms represented as plain ints (the index), totally
ordered by that index.  Values are the three-way sum of locations, integers
and a default value, encoded as small tagged tuples so they hash and compare
cheaply.  Heaps are finite maps from locations to value pairs; every heap is
interned, carries a canonical sort key, a precomputed support and a small
integer id.  The relation machinery stores heaps as those ids and works on
int sets.
"""

from __future__ import annotations

from typing import Iterable, Mapping

# ---------------------------------------------------------------------------
# values

LOC = "loc"
INT = "int"

DEFAULT = ("default",)

Value = tuple  # ('loc', ix) | ('int', n) | ('default',)
Location = int


def VLoc(ix: int) -> Value:
    return (LOC, ix)


def VInt(n: int) -> Value:
    return (INT, n)


def is_loc(v: Value) -> bool:
    return v[0] == LOC


def is_int(v: Value) -> bool:
    return v[0] == INT


def loc_name(ix: int) -> str:
    return f"l{ix}"


def show_value(v: Value) -> str:
    if v[0] == LOC:
        return loc_name(v[1])
    if v[0] == INT:
        return str(v[1])
    return "default"


# ---------------------------------------------------------------------------
# outcomes

NORMAL = "normal"
ERR = "err"
DIV = "div"

OUTCOMES = (NORMAL, ERR, DIV)


# ---------------------------------------------------------------------------
# heaps

class Heap:
    """Interned finite map from locations to pairs of values.

    Use :func:`make_heap`; the constructor is not meant to be called
    directly.  Equality is identity thanks to interning.
    """

    __slots__ = ("cells", "key", "idx", "supp", "_hash")

    cells: dict
    key: tuple
    idx: int
    supp: frozenset

    def __init__(self, cells: dict, key: tuple, idx: int):
        self.cells = cells
        self.key = key
        self.idx = idx
        supp = set(cells)
        for v0, v1 in cells.values():
            if v0[0] == LOC:
                supp.add(v0[1])
            if v1[0] == LOC:
                supp.add(v1[1])
        self.supp = frozenset(supp)
        self._hash = hash(key)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other

    def __len__(self):
        return len(self.cells)

    def __repr__(self):
        return show_heap(self)


_intern: dict[tuple, Heap] = {}
_by_idx: list[Heap] = []


def make_heap(cells: Mapping[Location, tuple]) -> Heap:
    key = tuple(sorted((l, vs[0], vs[1]) for l, vs in cells.items()))
    h = _intern.get(key)
    if h is None:
        h = Heap({l: (v0, v1) for l, v0, v1 in key}, key, len(_by_idx))
        _intern[key] = h
        _by_idx.append(h)
    return h


def heap_by_idx(idx: int) -> Heap:
    return _by_idx[idx]


def intern_stats() -> int:
    return len(_by_idx)


EMPTY = make_heap({})


def heap_of(*cells: tuple) -> Heap:
    """Build a heap from (loc, v0, v1) triples."""
    return make_heap({l: (v0, v1) for l, v0, v1 in cells})


def combine(h1: Heap, h2: Heap) -> Heap | None:
    """Disjoint union of two heaps; None when the domains overlap.

    Commutative and associative where defined; EMPTY is the unit.
    """
    c1, c2 = h1.cells, h2.cells
    if len(c1) < len(c2):
        c1, c2 = c2, c1
    for l in c2:
        if l in c1:
            return None
    if not c2:
        return h1 if c1 is h1.cells else h2
    merged = dict(c1)
    merged.update(c2)
    return make_heap(merged)


def disjoint(h1: Heap, h2: Heap) -> bool:
    c1, c2 = h1.cells, h2.cells
    if len(c1) > len(c2):
        c1, c2 = c2, c1
    return all(l not in c2 for l in c1)


def subtract(h: Heap, part: Heap) -> Heap | None:
    """The h' with h' . part = h, or None if part is not a subheap of h."""
    cells = dict(h.cells)
    for l, vs in part.cells.items():
        if cells.get(l) != vs:
            return None
        del cells[l]
    return make_heap(cells)


def subheaps(h: Heap):
    """All splittings (part, rest) of h, including the trivial ones."""
    locs = list(h.cells)
    n = len(locs)
    out = []
    for mask in range(1 << n):
        part = {}
        rest = {}
        for i, l in enumerate(locs):
            (part if mask >> i & 1 else rest)[l] = h.cells[l]
        out.append((make_heap(part), make_heap(rest)))
    return out


# ---------------------------------------------------------------------------
# permutations

class Permutation:
    """Finitely supported bijection of locations, extended by the identity.

    ``moves`` must be a bijection on its domain with domain = range.
    """

    __slots__ = ("moves",)

    def __init__(self, moves: Mapping[Location, Location]):
        moves = {a: b for a, b in moves.items() if a != b}
        if set(moves) != set(moves.values()):
            raise ValueError("permutation domain and range differ")
        if len(set(moves.values())) != len(moves):
            raise ValueError("permutation is not injective")
        self.moves = moves

    @staticmethod
    def identity() -> "Permutation":
        return Permutation({})

    @staticmethod
    def swap(a: Location, b: Location) -> "Permutation":
        return Permutation({a: b, b: a}) if a != b else Permutation({})

    @staticmethod
    def of_cycle(locs: Iterable[Location]) -> "Permutation":
        locs = list(locs)
        if len(locs) < 2:
            return Permutation({})
        return Permutation({a: b for a, b in zip(locs, locs[1:] + locs[:1])})

    def apply(self, l: Location) -> Location:
        return self.moves.get(l, l)

    def inverse(self) -> "Permutation":
        return Permutation({b: a for a, b in self.moves.items()})

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other (apply other first)."""
        dom = set(self.moves) | set(other.moves)
        return Permutation({a: self.apply(other.apply(a)) for a in dom})

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.moves == other.moves

    def __hash__(self):
        return hash(frozenset(self.moves.items()))

    def __repr__(self):
        return f"Permutation({self.moves!r})"


def permute_value(pi: Permutation, v: Value) -> Value:
    # only the location variant is moved
    if v[0] == LOC:
        return (LOC, pi.apply(v[1]))
    return v


def permute_heap(pi: Permutation, h: Heap) -> Heap:
    if not pi.moves:
        return h
    return make_heap({
        pi.apply(l): (permute_value(pi, v0), permute_value(pi, v1))
        for l, (v0, v1) in h.cells.items()
    })


def permute(pi: Permutation, x):
    """Group action on values, heaps, stack environments and outcomes.

    Outcomes are fixed by every permutation.
    """
    if isinstance(x, Heap):
        return permute_heap(pi, x)
    if isinstance(x, tuple):
        return permute_value(pi, x)
    if isinstance(x, dict):  # stack environment: name -> Value
        return {k: permute_value(pi, v) for k, v in x.items()}
    if x in OUTCOMES:
        return x
    raise TypeError(f"cannot permute {type(x).__name__}")


def support(x) -> frozenset:
    """Locations occurring in x (domain plus location-valued fields)."""
    if isinstance(x, Heap):
        return x.supp
    if isinstance(x, tuple):
        return frozenset((x[1],)) if x[0] == LOC else frozenset()
    if isinstance(x, dict):
        out = set()
        for v in x.values():
            if v[0] == LOC:
                out.add(v[1])
        return frozenset(out)
    if x in OUTCOMES:
        return frozenset()
    raise TypeError(f"no support for {type(x).__name__}")


# ---------------------------------------------------------------------------
# heap literal format: [l0 -> (l2, 3); l1 -> (0, 0)]

def show_heap(h: Heap) -> str:
    if not h.cells:
        return "[]"
    items = ", ".join(
        f"{loc_name(l)} -> ({show_value(v0)}, {show_value(v1)})"
        for l, (v0, v1) in sorted(h.cells.items())
    )
    return f"[{items}]"


def parse_value(text: str) -> Value:
    text = text.strip()
    if text == "default":
        return DEFAULT
    if text.startswith("l") and text[1:].lstrip("-").isdigit():
        return VLoc(int(text[1:]))
    try:
        return VInt(int(text))
    except ValueError:
        raise ValueError(f"bad value literal: {text!r}") from None


def parse_heap(text: str) -> Heap:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError(f"heap literal must be bracketed: {text!r}")
    body = text[1:-1].strip()
    cells = {}
    if not body:
        return EMPTY
    for item in body.split(";") if ";" in body else _split_cells(body):
        item = item.strip()
        if not item:
            continue
        lhs, _, rhs = item.partition("->")
        rhs = rhs.strip()
        if not (lhs.strip().startswith("l") and rhs.startswith("(") and rhs.endswith(")")):
            raise ValueError(f"bad heap cell: {item!r}")
        l = int(lhs.strip()[1:])
        v0, _, v1 = rhs[1:-1].partition(",")
        if l in cells:
            raise ValueError(f"duplicate location in heap literal: l{l}")
        cells[l] = (parse_value(v0), parse_value(v1))
    return make_heap(cells)


def _split_cells(body: str) -> list[str]:
    # comma-separated cells; commas inside parens belong to the value pair
    out, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out

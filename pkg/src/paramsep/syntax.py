"""Abstract syntax, typechecking and printing for the heap language.

Four syntactic categories: expressions (heap-independent values bound to
stack variables), terms (possibly heap-dependent computations bound to
identifiers), assertions (heap predicates) and specifications (the formulas
of the logic: triples, invariant extension, equalities, intuitionistic
connectives and quantifiers).

Stack variables and identifiers live in disjoint namespaces: ``delta`` is a
set of stack-variable names, ``gamma`` a map from identifiers to types.
"""

from __future__ import annotations

from dataclasses import dataclass


class TypeCheckError(Exception):
    pass


# ---------------------------------------------------------------------------
# types: com | val -> T | T -> T

@dataclass(frozen=True)
class Com:
    def __repr__(self):
        return "com"


@dataclass(frozen=True)
class ValArrow:
    res: "Type"

    def __repr__(self):
        return show_type(self)


@dataclass(frozen=True)
class TermArrow:
    arg: "Type"
    res: "Type"

    def __repr__(self):
        return show_type(self)


Type = Com | ValArrow | TermArrow
COM = Com()


# ---------------------------------------------------------------------------
# expressions

@dataclass(frozen=True)
class StackVar:
    name: str


@dataclass(frozen=True)
class IntLit:
    n: int


@dataclass(frozen=True)
class Add:
    a: "Expr"
    b: "Expr"


@dataclass(frozen=True)
class Sub:
    a: "Expr"
    b: "Expr"


Expr = StackVar | IntLit | Add | Sub


# ---------------------------------------------------------------------------
# terms

@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class LamVal:
    var: str
    body: "Term"


@dataclass(frozen=True)
class AppVal:
    fn: "Term"
    arg: Expr


@dataclass(frozen=True)
class LamTerm:
    var: str
    ty: Type
    body: "Term"


@dataclass(frozen=True)
class AppTerm:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Fix:
    body: "Term"


@dataclass(frozen=True)
class IfEq:
    e1: Expr
    e2: Expr
    then: "Term"
    els: "Term"


@dataclass(frozen=True)
class Seq:
    first: "Term"
    second: "Term"


@dataclass(frozen=True)
class LetNew:
    var: str
    body: "Term"


@dataclass(frozen=True)
class Free:
    e: Expr


@dataclass(frozen=True)
class LetLookup:
    var: str
    e: Expr
    field: int  # 0 or 1
    body: "Term"


@dataclass(frozen=True)
class Assign:
    e: Expr
    field: int  # 0 or 1
    value: Expr


@dataclass(frozen=True)
class Hole:
    """The hole of an induction context; never part of runnable programs."""


Term = (Ident | LamVal | AppVal | LamTerm | AppTerm | Fix | IfEq | Seq
        | LetNew | Free | LetLookup | Assign | Hole)


# ---------------------------------------------------------------------------
# assertions

@dataclass(frozen=True)
class EqE:
    a: Expr
    b: Expr


@dataclass(frozen=True)
class LeqE:
    a: Expr
    b: Expr


@dataclass(frozen=True)
class PointsTo:
    addr: Expr
    v0: Expr
    v1: Expr


@dataclass(frozen=True)
class Emp:
    pass


@dataclass(frozen=True)
class Star:
    a: "Assertion"
    b: "Assertion"


@dataclass(frozen=True)
class And:
    a: "Assertion"
    b: "Assertion"


@dataclass(frozen=True)
class Not:
    a: "Assertion"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Assertion"


Assertion = EqE | LeqE | PointsTo | Emp | Star | And | Not | Exists
EMP = Emp()


def _fresh_names(base: str, taken, count: int) -> list[str]:
    out = []
    k = 0
    candidates = [base] + [f"{base}{i}" for i in range(1, 100)]
    for name in candidates:
        if name not in taken and name not in out:
            out.append(name)
            if len(out) == count:
                return out
        k += 1
    raise ValueError("fresh name pool exhausted")


def points_to_any(e: Expr) -> Assertion:
    """E |-> -   ==   exists i, j. E |-> i, j   (fresh i, j)."""
    (i,) = _fresh_names("i", fv_expr(e), 1)
    (j,) = _fresh_names("j", fv_expr(e) | {i}, 1)
    return Exists(i, Exists(j, PointsTo(e, StackVar(i), StackVar(j))))


def points_to_snd(e: Expr, e1: Expr) -> Assertion:
    """E |-> -, E1   ==   exists i. E |-> i, E1   (fresh i)."""
    (i,) = _fresh_names("i", fv_expr(e) | fv_expr(e1), 1)
    return Exists(i, PointsTo(e, StackVar(i), e1))


def points_to_fst(e: Expr, e0: Expr) -> Assertion:
    """E |-> E0, -   ==   exists j. E |-> E0, j   (fresh j)."""
    (j,) = _fresh_names("j", fv_expr(e) | fv_expr(e0), 1)
    return Exists(j, PointsTo(e, e0, StackVar(j)))


def a_or(a: Assertion, b: Assertion) -> Assertion:
    """Classical disjunction, defined as usual from And/Not."""
    return Not(And(Not(a), Not(b)))


def a_neq(e1: Expr, e2: Expr) -> Assertion:
    return Not(EqE(e1, e2))


# ---------------------------------------------------------------------------
# specifications

@dataclass(frozen=True)
class Triple:
    pre: Assertion
    term: Term
    post: Assertion


@dataclass(frozen=True)
class Tensor:
    spec: "Spec"
    inv: Assertion


@dataclass(frozen=True)
class EqExpr:
    a: Expr
    b: Expr


@dataclass(frozen=True)
class EqTerm:
    a: Term
    b: Term


@dataclass(frozen=True)
class SpecAnd:
    a: "Spec"
    b: "Spec"


@dataclass(frozen=True)
class SpecOr:
    a: "Spec"
    b: "Spec"


@dataclass(frozen=True)
class SpecImplies:
    a: "Spec"
    b: "Spec"


@dataclass(frozen=True)
class ForallX:
    var: str
    ty: Type
    body: "Spec"


@dataclass(frozen=True)
class ExistsX:
    var: str
    ty: Type
    body: "Spec"


@dataclass(frozen=True)
class ForallI:
    var: str
    body: "Spec"


@dataclass(frozen=True)
class ExistsI:
    var: str
    body: "Spec"


Spec = (Triple | Tensor | EqExpr | EqTerm | SpecAnd | SpecOr | SpecImplies
        | ForallX | ExistsX | ForallI | ExistsI)


# ---------------------------------------------------------------------------
# free variables

def fv_expr(e: Expr) -> set[str]:
    k = e.__class__
    if k is StackVar:
        return {e.name}
    if k is IntLit:
        return set()
    return fv_expr(e.a) | fv_expr(e.b)


def fv_term(t: Term) -> tuple[set[str], set[str]]:
    """Free (stack variables, identifiers) of a term."""
    k = t.__class__
    if k is Ident:
        return set(), {t.name}
    if k is Hole:
        return set(), set()
    if k is LamVal:
        i, x = fv_term(t.body)
        return i - {t.var}, x
    if k is AppVal:
        i, x = fv_term(t.fn)
        return i | fv_expr(t.arg), x
    if k is LamTerm:
        i, x = fv_term(t.body)
        return i, x - {t.var}
    if k is AppTerm:
        i1, x1 = fv_term(t.fn)
        i2, x2 = fv_term(t.arg)
        return i1 | i2, x1 | x2
    if k is Fix:
        return fv_term(t.body)
    if k is IfEq:
        i1, x1 = fv_term(t.then)
        i2, x2 = fv_term(t.els)
        return i1 | i2 | fv_expr(t.e1) | fv_expr(t.e2), x1 | x2
    if k is Seq:
        i1, x1 = fv_term(t.first)
        i2, x2 = fv_term(t.second)
        return i1 | i2, x1 | x2
    if k is LetNew:
        i, x = fv_term(t.body)
        return i - {t.var}, x
    if k is Free:
        return fv_expr(t.e), set()
    if k is LetLookup:
        i, x = fv_term(t.body)
        return (i - {t.var}) | fv_expr(t.e), x
    if k is Assign:
        return fv_expr(t.e) | fv_expr(t.value), set()
    raise TypeError(f"not a term: {t!r}")


def fv_assertion(a: Assertion) -> set[str]:
    k = a.__class__
    if k in (EqE, LeqE):
        return fv_expr(a.a) | fv_expr(a.b)
    if k is PointsTo:
        return fv_expr(a.addr) | fv_expr(a.v0) | fv_expr(a.v1)
    if k is Emp:
        return set()
    if k in (Star, And):
        return fv_assertion(a.a) | fv_assertion(a.b)
    if k is Not:
        return fv_assertion(a.a)
    if k is Exists:
        return fv_assertion(a.body) - {a.var}
    raise TypeError(f"not an assertion: {a!r}")


def fv_spec(s: Spec) -> tuple[set[str], set[str]]:
    k = s.__class__
    if k is Triple:
        i, x = fv_term(s.term)
        return i | fv_assertion(s.pre) | fv_assertion(s.post), x
    if k is Tensor:
        i, x = fv_spec(s.spec)
        return i | fv_assertion(s.inv), x
    if k is EqExpr:
        return fv_expr(s.a) | fv_expr(s.b), set()
    if k is EqTerm:
        i1, x1 = fv_term(s.a)
        i2, x2 = fv_term(s.b)
        return i1 | i2, x1 | x2
    if k in (SpecAnd, SpecOr, SpecImplies):
        i1, x1 = fv_spec(s.a)
        i2, x2 = fv_spec(s.b)
        return i1 | i2, x1 | x2
    if k in (ForallX, ExistsX):
        i, x = fv_spec(s.body)
        return i, x - {s.var}
    if k in (ForallI, ExistsI):
        i, x = fv_spec(s.body)
        return i - {s.var}, x
    raise TypeError(f"not a spec: {s!r}")


# ---------------------------------------------------------------------------
# typechecking

def typecheck_expr(delta: set[str], e: Expr) -> None:
    k = e.__class__
    if k is StackVar:
        if e.name not in delta:
            raise TypeCheckError(f"unbound stack variable {e.name!r}")
    elif k is IntLit:
        pass
    else:
        typecheck_expr(delta, e.a)
        typecheck_expr(delta, e.b)


def typecheck_term(delta: set[str], gamma: dict[str, Type], t: Term) -> Type:
    """The unique type of t under the contexts, or raise TypeCheckError.

    Typing is syntax-directed, so the derivation (and the type) is unique.
    """
    k = t.__class__
    if k is Ident:
        ty = gamma.get(t.name)
        if ty is None:
            raise TypeCheckError(f"unbound identifier {t.name!r}")
        return ty
    if k is LamVal:
        body = typecheck_term(delta | {t.var}, gamma, t.body)
        return ValArrow(body)
    if k is AppVal:
        fn = typecheck_term(delta, gamma, t.fn)
        if not isinstance(fn, ValArrow):
            raise TypeCheckError(f"expression applied to non val-arrow type {fn!r}")
        typecheck_expr(delta, t.arg)
        return fn.res
    if k is LamTerm:
        body = typecheck_term(delta, {**gamma, t.var: t.ty}, t.body)
        return TermArrow(t.ty, body)
    if k is AppTerm:
        fn = typecheck_term(delta, gamma, t.fn)
        if not isinstance(fn, TermArrow):
            raise TypeCheckError(f"term applied to non arrow type {fn!r}")
        arg = typecheck_term(delta, gamma, t.arg)
        if arg != fn.arg:
            raise TypeCheckError(f"argument type {arg!r} does not match {fn.arg!r}")
        return fn.res
    if k is Fix:
        body = typecheck_term(delta, gamma, t.body)
        if not isinstance(body, TermArrow) or body.arg != body.res:
            raise TypeCheckError(f"fix needs T -> T, got {body!r}")
        return body.res
    if k is IfEq:
        typecheck_expr(delta, t.e1)
        typecheck_expr(delta, t.e2)
        _expect_com(delta, gamma, t.then, "then branch")
        _expect_com(delta, gamma, t.els, "else branch")
        return COM
    if k is Seq:
        _expect_com(delta, gamma, t.first, "sequence head")
        _expect_com(delta, gamma, t.second, "sequence tail")
        return COM
    if k is LetNew:
        _expect_com(delta | {t.var}, gamma, t.body, "allocation body")
        return COM
    if k is Free:
        typecheck_expr(delta, t.e)
        return COM
    if k is LetLookup:
        if t.field not in (0, 1):
            raise TypeCheckError("field tag must be 0 or 1")
        typecheck_expr(delta, t.e)
        _expect_com(delta | {t.var}, gamma, t.body, "lookup body")
        return COM
    if k is Assign:
        if t.field not in (0, 1):
            raise TypeCheckError("field tag must be 0 or 1")
        typecheck_expr(delta, t.e)
        typecheck_expr(delta, t.value)
        return COM
    if k is Hole:
        raise TypeCheckError("hole in a runnable term")
    raise TypeError(f"not a term: {t!r}")


def _expect_com(delta, gamma, t, what):
    ty = typecheck_term(delta, gamma, t)
    if ty != COM:
        raise TypeCheckError(f"{what} must be com, got {ty!r}")


def typecheck_assertion(delta: set[str], a: Assertion) -> None:
    """Accept iff all free stack variables of the assertion are in delta."""
    k = a.__class__
    if k in (EqE, LeqE):
        typecheck_expr(delta, a.a)
        typecheck_expr(delta, a.b)
    elif k is PointsTo:
        typecheck_expr(delta, a.addr)
        typecheck_expr(delta, a.v0)
        typecheck_expr(delta, a.v1)
    elif k is Emp:
        pass
    elif k in (Star, And):
        typecheck_assertion(delta, a.a)
        typecheck_assertion(delta, a.b)
    elif k is Not:
        typecheck_assertion(delta, a.a)
    elif k is Exists:
        typecheck_assertion(delta | {a.var}, a.body)
    else:
        raise TypeError(f"not an assertion: {a!r}")


def typecheck_spec(delta: set[str], gamma: dict[str, Type], s: Spec) -> None:
    k = s.__class__
    if k is Triple:
        typecheck_assertion(delta, s.pre)
        typecheck_assertion(delta, s.post)
        _expect_com(delta, gamma, s.term, "triple body")
    elif k is Tensor:
        typecheck_spec(delta, gamma, s.spec)
        typecheck_assertion(delta, s.inv)
    elif k is EqExpr:
        typecheck_expr(delta, s.a)
        typecheck_expr(delta, s.b)
    elif k is EqTerm:
        ta = typecheck_term(delta, gamma, s.a)
        tb = typecheck_term(delta, gamma, s.b)
        if ta != tb:
            raise TypeCheckError(f"term equality at two types: {ta!r} and {tb!r}")
    elif k in (SpecAnd, SpecOr, SpecImplies):
        typecheck_spec(delta, gamma, s.a)
        typecheck_spec(delta, gamma, s.b)
    elif k in (ForallX, ExistsX):
        if s.var in delta:
            raise TypeCheckError(f"identifier {s.var!r} clashes with a stack variable")
        typecheck_spec(delta, {**gamma, s.var: s.ty}, s.body)
    elif k in (ForallI, ExistsI):
        if s.var in gamma:
            raise TypeCheckError(f"stack variable {s.var!r} clashes with an identifier")
        typecheck_spec(delta | {s.var}, gamma, s.body)
    else:
        raise TypeError(f"not a spec: {s!r}")


# ---------------------------------------------------------------------------
# substitution (used by the proof checker)

def subst_expr(name: str, repl: Expr, e: Expr) -> Expr:
    k = e.__class__
    if k is StackVar:
        return repl if e.name == name else e
    if k is IntLit:
        return e
    return k(subst_expr(name, repl, e.a), subst_expr(name, repl, e.b))


def subst_expr_assertion(name: str, repl: Expr, a: Assertion) -> Assertion:
    k = a.__class__
    if k in (EqE, LeqE):
        return k(subst_expr(name, repl, a.a), subst_expr(name, repl, a.b))
    if k is PointsTo:
        return PointsTo(subst_expr(name, repl, a.addr),
                        subst_expr(name, repl, a.v0),
                        subst_expr(name, repl, a.v1))
    if k is Emp:
        return a
    if k in (Star, And):
        return k(subst_expr_assertion(name, repl, a.a),
                 subst_expr_assertion(name, repl, a.b))
    if k is Not:
        return Not(subst_expr_assertion(name, repl, a.a))
    if k is Exists:
        if a.var == name:
            return a
        if a.var in fv_expr(repl):
            fresh = _fresh_names(a.var, fv_expr(repl) | fv_assertion(a.body) | {name}, 1)[0]
            body = subst_expr_assertion(a.var, StackVar(fresh), a.body)
            return Exists(fresh, subst_expr_assertion(name, repl, body))
        return Exists(a.var, subst_expr_assertion(name, repl, a.body))
    raise TypeError(f"not an assertion: {a!r}")


def subst_expr_term(name: str, repl: Expr, t: Term) -> Term:
    k = t.__class__
    if k in (Ident, Hole):
        return t
    se = lambda e: subst_expr(name, repl, e)
    if k is LamVal:
        if t.var == name:
            return t
        if t.var in fv_expr(repl):
            fresh = _fresh_names(t.var, fv_expr(repl) | fv_term(t.body)[0] | {name}, 1)[0]
            body = subst_expr_term(t.var, StackVar(fresh), t.body)
            return LamVal(fresh, subst_expr_term(name, repl, body))
        return LamVal(t.var, subst_expr_term(name, repl, t.body))
    if k is AppVal:
        return AppVal(subst_expr_term(name, repl, t.fn), se(t.arg))
    if k is LamTerm:
        return LamTerm(t.var, t.ty, subst_expr_term(name, repl, t.body))
    if k is AppTerm:
        return AppTerm(subst_expr_term(name, repl, t.fn), subst_expr_term(name, repl, t.arg))
    if k is Fix:
        return Fix(subst_expr_term(name, repl, t.body))
    if k is IfEq:
        return IfEq(se(t.e1), se(t.e2),
                    subst_expr_term(name, repl, t.then), subst_expr_term(name, repl, t.els))
    if k is Seq:
        return Seq(subst_expr_term(name, repl, t.first), subst_expr_term(name, repl, t.second))
    if k in (LetNew, LetLookup):
        if t.var == name:
            if k is LetLookup:
                return LetLookup(t.var, se(t.e), t.field, t.body)
            return t
        if t.var in fv_expr(repl):
            fresh = _fresh_names(t.var, fv_expr(repl) | fv_term(t.body)[0] | {name}, 1)[0]
            body = subst_expr_term(t.var, StackVar(fresh), t.body)
            if k is LetNew:
                return LetNew(fresh, subst_expr_term(name, repl, body))
            return LetLookup(fresh, se(t.e), t.field, subst_expr_term(name, repl, body))
        if k is LetNew:
            return LetNew(t.var, subst_expr_term(name, repl, t.body))
        return LetLookup(t.var, se(t.e), t.field, subst_expr_term(name, repl, t.body))
    if k is Free:
        return Free(se(t.e))
    if k is Assign:
        return Assign(se(t.e), t.field, se(t.value))
    raise TypeError(f"not a term: {t!r}")


def subst_expr_spec(name: str, repl: Expr, s: Spec) -> Spec:
    k = s.__class__
    sa = lambda a: subst_expr_assertion(name, repl, a)
    st = lambda t: subst_expr_term(name, repl, t)
    if k is Triple:
        return Triple(sa(s.pre), st(s.term), sa(s.post))
    if k is Tensor:
        return Tensor(subst_expr_spec(name, repl, s.spec), sa(s.inv))
    if k is EqExpr:
        return EqExpr(subst_expr(name, repl, s.a), subst_expr(name, repl, s.b))
    if k is EqTerm:
        return EqTerm(st(s.a), st(s.b))
    if k in (SpecAnd, SpecOr, SpecImplies):
        return k(subst_expr_spec(name, repl, s.a), subst_expr_spec(name, repl, s.b))
    if k in (ForallX, ExistsX):
        return k(s.var, s.ty, subst_expr_spec(name, repl, s.body))
    if k in (ForallI, ExistsI):
        if s.var == name:
            return s
        if s.var in fv_expr(repl):
            fresh = _fresh_names(s.var, fv_expr(repl) | fv_spec(s.body)[0] | {name}, 1)[0]
            body = subst_expr_spec(s.var, StackVar(fresh), s.body)
            return k(fresh, subst_expr_spec(name, repl, body))
        return k(s.var, subst_expr_spec(name, repl, s.body))
    raise TypeError(f"not a spec: {s!r}")


def subst_term_term(name: str, repl: Term, t: Term) -> Term:
    """Capture-avoiding substitution of a term for an identifier."""
    k = t.__class__
    if k is Ident:
        return repl if t.name == name else t
    if k is Hole:
        return t
    ri, rx = fv_term(repl)
    if k is LamTerm:
        if t.var == name:
            return t
        if t.var in rx:
            fresh = _fresh_names(t.var, rx | fv_term(t.body)[1] | {name}, 1)[0]
            body = subst_term_term(t.var, Ident(fresh), t.body)
            return LamTerm(fresh, t.ty, subst_term_term(name, repl, body))
        return LamTerm(t.var, t.ty, subst_term_term(name, repl, t.body))
    if k in (LamVal, LetNew, LetLookup):
        # stack binder may capture a free stack variable of the replacement
        if t.var in ri:
            fresh = _fresh_names(t.var, ri | fv_term(t.body)[0], 1)[0]
            body = subst_expr_term(t.var, StackVar(fresh), t.body)
        else:
            fresh, body = t.var, t.body
        if k is LamVal:
            return LamVal(fresh, subst_term_term(name, repl, body))
        if k is LetNew:
            return LetNew(fresh, subst_term_term(name, repl, body))
        return LetLookup(fresh, t.e, t.field, subst_term_term(name, repl, body))
    if k is AppVal:
        return AppVal(subst_term_term(name, repl, t.fn), t.arg)
    if k is AppTerm:
        return AppTerm(subst_term_term(name, repl, t.fn), subst_term_term(name, repl, t.arg))
    if k is Fix:
        return Fix(subst_term_term(name, repl, t.body))
    if k is IfEq:
        return IfEq(t.e1, t.e2, subst_term_term(name, repl, t.then),
                    subst_term_term(name, repl, t.els))
    if k is Seq:
        return Seq(subst_term_term(name, repl, t.first), subst_term_term(name, repl, t.second))
    if k in (Free, Assign):
        return t
    raise TypeError(f"not a term: {t!r}")


def subst_term_spec(name: str, repl: Term, s: Spec) -> Spec:
    k = s.__class__
    ri, rx = fv_term(repl)
    if k is Triple:
        return Triple(s.pre, subst_term_term(name, repl, s.term), s.post)
    if k is Tensor:
        return Tensor(subst_term_spec(name, repl, s.spec), s.inv)
    if k is EqExpr:
        return s
    if k is EqTerm:
        return EqTerm(subst_term_term(name, repl, s.a), subst_term_term(name, repl, s.b))
    if k in (SpecAnd, SpecOr, SpecImplies):
        return k(subst_term_spec(name, repl, s.a), subst_term_spec(name, repl, s.b))
    if k in (ForallX, ExistsX):
        if s.var == name:
            return s
        if s.var in rx:
            fresh = _fresh_names(s.var, rx | fv_spec(s.body)[1] | {name}, 1)[0]
            body = subst_term_spec(s.var, Ident(fresh), s.body)
            return k(fresh, s.ty, subst_term_spec(name, repl, body))
        return k(s.var, s.ty, subst_term_spec(name, repl, s.body))
    if k in (ForallI, ExistsI):
        if s.var in ri:
            fresh = _fresh_names(s.var, ri | fv_spec(s.body)[0], 1)[0]
            body = subst_expr_spec(s.var, StackVar(fresh), s.body)
            return k(fresh, subst_term_spec(name, repl, body))
        return k(s.var, subst_term_spec(name, repl, s.body))
    raise TypeError(f"not a spec: {s!r}")


# ---------------------------------------------------------------------------
# printing; parse(show(x)) round-trips to an equal AST

def show_type(t: Type) -> str:
    if t.__class__ is Com:
        return "com"
    if t.__class__ is ValArrow:
        return f"val -> {show_type(t.res)}"
    lhs = show_type(t.arg)
    if t.arg.__class__ in (ValArrow, TermArrow):
        lhs = f"({lhs})"
    return f"{lhs} -> {show_type(t.res)}"


def show_expr(e: Expr) -> str:
    k = e.__class__
    if k is StackVar:
        return e.name
    if k is IntLit:
        return str(e.n)
    op = "+" if k is Add else "-"
    rhs = show_expr(e.b)
    if e.b.__class__ in (Add, Sub):
        rhs = f"({rhs})"
    return f"{show_expr(e.a)} {op} {rhs}"


def _show_term_atom(t: Term) -> str:
    s = show_term(t)
    if t.__class__ in (Ident, Hole):
        return s
    if t.__class__ is Free:
        return s
    return f"({s})"


def show_term(t: Term) -> str:
    k = t.__class__
    if k is Ident:
        return t.name
    if k is Hole:
        return "[]"
    if k is LamVal:
        return f"\\{t.var}. {show_term(t.body)}"
    if k is LamTerm:
        return f"\\{t.var}:{show_type(t.ty)}. {show_term(t.body)}"
    if k is AppVal:
        arg = show_expr(t.arg)
        if t.arg.__class__ in (Add, Sub):
            arg = f"({arg})"
        return f"{_show_term_atom(t.fn)} {arg}"
    if k is AppTerm:
        return f"{_show_term_atom(t.fn)} {_show_term_atom(t.arg)}"
    if k is Fix:
        return f"fix {_show_term_atom(t.body)}"
    if k is IfEq:
        return (f"if ({show_expr(t.e1)} = {show_expr(t.e2)}) "
                f"then ({show_term(t.then)}) else ({show_term(t.els)})")
    if k is Seq:
        first = show_term(t.first)
        if t.first.__class__ in (Seq, LetNew, LetLookup, LamVal, LamTerm, IfEq):
            first = f"({first})"
        return f"{first}; {show_term(t.second)}"
    if k is LetNew:
        return f"let {t.var} = new in {show_term(t.body)}"
    if k is Free:
        return f"free({show_expr(t.e)})"
    if k is LetLookup:
        return f"let {t.var} = {_show_expr_proj(t.e)}.{t.field} in {show_term(t.body)}"
    if k is Assign:
        return f"{_show_expr_proj(t.e)}.{t.field} := {show_expr(t.value)}"
    raise TypeError(f"not a term: {t!r}")


def _show_expr_proj(e: Expr) -> str:
    # expression directly followed by `.field`: parenthesize compounds
    s = show_expr(e)
    return s if e.__class__ in (StackVar, IntLit) else f"({s})"


def show_assertion(a: Assertion) -> str:
    return _show_assertion(a, 0)


# levels: 0 exists, 1 and, 2 star, 3 not/atom
def _show_assertion(a: Assertion, level: int) -> str:
    k = a.__class__
    if k is Exists:
        sugar = _sugar_of(a)
        if sugar is not None:
            return sugar
        s = f"exists {a.var}. {_show_assertion(a.body, 0)}"
        return f"({s})" if level > 0 else s
    if k is And:
        s = f"{_show_assertion(a.a, 2)} /\\ {_show_assertion(a.b, 1)}"
        return f"({s})" if level > 1 else s
    if k is Star:
        s = f"{_show_assertion(a.a, 3)} * {_show_assertion(a.b, 2)}"
        return f"({s})" if level > 2 else s
    if k is Not:
        return f"~{_show_assertion(a.a, 3)}"
    if k is Emp:
        return "emp"
    if k is EqE:
        s = f"{show_expr(a.a)} = {show_expr(a.b)}"
        return f"({s})" if level > 2 else s
    if k is LeqE:
        s = f"{show_expr(a.a)} <= {show_expr(a.b)}"
        return f"({s})" if level > 2 else s
    if k is PointsTo:
        s = f"{show_expr(a.addr)} |-> {_pt_field(a.v0)}, {_pt_field(a.v1)}"
        return f"({s})" if level > 2 else s
    raise TypeError(f"not an assertion: {a!r}")


def _pt_field(e: Expr) -> str:
    s = show_expr(e)
    if e.__class__ is IntLit and e.n < 0:
        return s  # lexes as one negative literal
    return s


def _sugar_of(a: Assertion) -> str | None:
    # print the points-to abbreviations only when the bound names are exactly
    # the canonical fresh choice, so printing stays reparse-stable
    if a.__class__ is not Exists:
        return None
    inner = a.body
    if inner.__class__ is Exists and inner.body.__class__ is PointsTo:
        pt = inner.body
        if a == points_to_any(pt.addr):
            return f"{show_expr(pt.addr)} |-> -"
    if inner.__class__ is PointsTo:
        if a == points_to_snd(inner.addr, inner.v1):
            return f"{show_expr(inner.addr)} |-> -, {_pt_field(inner.v1)}"
        if a == points_to_fst(inner.addr, inner.v0):
            return f"{show_expr(inner.addr)} |-> {_pt_field(inner.v0)}, -"
    return None


def show_spec(s: Spec) -> str:
    return _show_spec(s, 0)


# levels: 0 quantifier, 1 implies, 2 or, 3 and, 4 tensor, 5 atom
def _show_spec(s: Spec, level: int) -> str:
    k = s.__class__
    if k in (ForallX, ExistsX, ForallI, ExistsI):
        kw = "forall" if k in (ForallX, ForallI) else "exists"
        binder = f"{s.var}:{show_type(s.ty)}" if k in (ForallX, ExistsX) else s.var
        out = f"{kw} {binder}. {_show_spec(s.body, 0)}"
        return f"({out})" if level > 0 else out
    if k is SpecImplies:
        out = f"{_show_spec(s.a, 2)} => {_show_spec(s.b, 1)}"
        return f"({out})" if level > 1 else out
    if k is SpecOr:
        out = f"{_show_spec(s.a, 3)} \\/ {_show_spec(s.b, 2)}"
        return f"({out})" if level > 2 else out
    if k is SpecAnd:
        out = f"{_show_spec(s.a, 4)} /\\ {_show_spec(s.b, 3)}"
        return f"({out})" if level > 3 else out
    if k is Tensor:
        out = f"{_show_spec(s.spec, 4)} <*> {_show_assertion(s.inv, 3)}"
        return f"({out})" if level > 4 else out
    if k is Triple:
        return f"{{{show_assertion(s.pre)}}} {show_term(s.term)} {{{show_assertion(s.post)}}}"
    if k is EqExpr:
        out = f"{show_expr(s.a)} = {show_expr(s.b)}"
        return f"({out})" if level > 4 else out
    if k is EqTerm:
        out = f"{_show_term_atom(s.a)} = {_show_term_atom(s.b)}"
        return f"({out})" if level > 4 else out
    raise TypeError(f"not a spec: {s!r}")

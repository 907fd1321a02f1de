"""Concrete syntax for expressions, terms, assertions and specifications.

Keywords and operators::

    terms       new, free(E), let i = new in M, let i = E.0 in M,
                let i = E.1 in M, E.0 := F, E.1 := F, M; N,
                if (E = F) then M else N, fix M, \\i. M, \\x:T. M, M E, M N
    types       com, val -> T, T -> T
    assertions  emp, E |-> E,E, E |-> -, E |-> -,E, E |-> E,-, *, /\\, ~,
                exists i. P, E = E, E <= E
    specs       {P} M {Q}, phi <*> P, /\\, \\/, =>, forall x:T., exists x:T.,
                forall i., exists i.

Bare names are resolved against the declared contexts plus enclosing
binders: stack variables and identifiers are syntactically identical, so
``parse`` takes the ambient ``delta``/``gamma`` names.  Judgment files carry
them in header lines ``delta: i j k`` and ``gamma: x:com, f:val -> com``.

A ``-`` immediately followed by a digit lexes as a negative integer
literal; binary subtraction therefore needs surrounding spaces.  Dangling
bodies (``let .. in``, lambdas, ``else``, and the tail of ``;``) extend as
far right as possible; ``fix`` grabs only the next atom.
"""

from __future__ import annotations

from . import syntax as S

KEYWORDS = {
    "new", "free", "let", "in", "if", "then", "else", "fix",
    "com", "val", "emp", "exists", "forall",
}

_SYMBOLS = [
    "<*>", "|->", ":=", "->", "=>", "<=", "/\\", "\\/", "[]",
    "(", ")", "{", "}", ";", ",", ".", "=", "+", "-", "*", "~", "\\", ":",
]


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind  # 'int' | 'name' | 'sym' | 'eof'
        self.text = text
        self.line = line
        self.col = col


def tokenize(text: str) -> list[Token]:
    toks = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":  # comment to end of line
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            toks.append(Token("name", text[i:j], line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token("sym", sym, line, col))
                col += len(sym)
                i += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


class Parser:
    def __init__(self, text: str, delta=(), gamma=()):
        self.toks = tokenize(text)
        self.pos = 0
        self.delta = set(delta)
        self.gamma = set(gamma)
        self.bound_i: list[str] = []
        self.bound_x: list[str] = []

    # -- token plumbing ------------------------------------------------

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def at(self, text: str) -> bool:
        t = self.toks[self.pos]
        return t.text == text and t.kind in ("sym", "name")

    def eat(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> None:
        t = self.peek()
        if not self.eat(text):
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.line, t.col)

    def fail(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    def name_token(self) -> str:
        t = self.peek()
        if t.kind != "name" or t.text in KEYWORDS:
            self.fail(f"expected a name, found {t.text!r}")
        self.pos += 1
        return t.text

    def attempt(self, fn):
        saved = (self.pos, len(self.bound_i), len(self.bound_x))
        try:
            return fn()
        except ParseError:
            self.pos, ni, nx = saved
            del self.bound_i[ni:]
            del self.bound_x[nx:]
            return None

    def kind_of(self, name: str) -> str | None:
        if name in self.bound_i or name in self.delta:
            return "i"
        if name in self.bound_x or name in self.gamma:
            return "x"
        return None

    # -- expressions ---------------------------------------------------

    def parse_expr(self) -> S.Expr:
        e = self.expr_atom()
        while True:
            if self.eat("+"):
                e = S.Add(e, self.expr_atom())
            elif self.eat("-"):
                e = S.Sub(e, self.expr_atom())
            else:
                return e

    def expr_atom(self) -> S.Expr:
        t = self.peek()
        if t.kind == "int":
            self.pos += 1
            return S.IntLit(int(t.text))
        if t.kind == "name" and t.text not in KEYWORDS:
            kind = self.kind_of(t.text)
            if kind == "x":
                self.fail(f"identifier {t.text!r} used in an expression")
            if kind is None:
                self.fail(f"undeclared name {t.text!r}")
            self.pos += 1
            return S.StackVar(t.text)
        if self.eat("("):
            e = self.parse_expr()
            self.expect(")")
            return e
        self.fail(f"expected an expression, found {t.text!r}")

    # -- types -----------------------------------------------------------

    def parse_type(self) -> S.Type:
        t = self.peek()
        if self.eat("com"):
            head = S.COM
        elif self.eat("val"):
            self.expect("->")
            return S.ValArrow(self.parse_type())
        elif self.eat("("):
            head = self.parse_type()
            self.expect(")")
        else:
            self.fail(f"expected a type, found {t.text!r}")
        if self.eat("->"):
            return S.TermArrow(head, self.parse_type())
        return head

    # -- terms -----------------------------------------------------------

    def parse_term(self) -> S.Term:
        if self.eat("let"):
            var = self.name_token()
            self.expect("=")
            if self.eat("new"):
                self.expect("in")
                self.bound_i.append(var)
                body = self.parse_term()
                self.bound_i.pop()
                return S.LetNew(var, body)
            e = self.parse_expr()
            self.expect(".")
            field = self.field_token()
            self.expect("in")
            self.bound_i.append(var)
            body = self.parse_term()
            self.bound_i.pop()
            return S.LetLookup(var, e, field, body)
        if self.eat("\\"):
            var = self.name_token()
            if self.eat(":"):
                ty = self.parse_type()
                self.expect(".")
                self.bound_x.append(var)
                body = self.parse_term()
                self.bound_x.pop()
                return S.LamTerm(var, ty, body)
            self.expect(".")
            self.bound_i.append(var)
            body = self.parse_term()
            self.bound_i.pop()
            return S.LamVal(var, body)
        if self.eat("if"):
            self.expect("(")
            e1 = self.parse_expr()
            self.expect("=")
            e2 = self.parse_expr()
            self.expect(")")
            self.expect("then")
            then = self.parse_term()
            self.expect("else")
            els = self.parse_term()
            return S.IfEq(e1, e2, then, els)
        assign = self.attempt(self.parse_assign)
        head = assign if assign is not None else self.parse_app()
        if self.eat(";"):
            return S.Seq(head, self.parse_term())
        return head

    def field_token(self) -> int:
        t = self.peek()
        if t.kind == "int" and t.text in ("0", "1"):
            self.pos += 1
            return int(t.text)
        self.fail("field tag must be 0 or 1")

    def parse_assign(self) -> S.Term:
        e = self.parse_expr()
        self.expect(".")
        field = self.field_token()
        self.expect(":=")
        return S.Assign(e, field, self.parse_expr())

    def parse_app(self) -> S.Term:
        fn = self.term_atom()
        while True:
            t = self.peek()
            if t.kind == "int":
                self.pos += 1
                fn = S.AppVal(fn, S.IntLit(int(t.text)))
            elif t.kind == "name" and t.text not in KEYWORDS:
                kind = self.kind_of(t.text)
                if kind == "i":
                    self.pos += 1
                    fn = S.AppVal(fn, S.StackVar(t.text))
                elif kind == "x":
                    self.pos += 1
                    fn = S.AppTerm(fn, S.Ident(t.text))
                else:
                    self.fail(f"undeclared name {t.text!r}")
            elif t.text in ("free", "fix"):
                fn = S.AppTerm(fn, self.term_atom())
            elif t.text == "(":
                arg = self.attempt(self.paren_expr)
                if arg is not None:
                    fn = S.AppVal(fn, arg)
                else:
                    self.expect("(")
                    sub = self.parse_term()
                    self.expect(")")
                    fn = S.AppTerm(fn, sub)
            else:
                return fn

    def paren_expr(self) -> S.Expr:
        self.expect("(")
        e = self.parse_expr()
        self.expect(")")
        return e

    def term_atom(self) -> S.Term:
        t = self.peek()
        if self.eat("free"):
            self.expect("(")
            e = self.parse_expr()
            self.expect(")")
            return S.Free(e)
        if self.eat("fix"):
            return S.Fix(self.term_atom())
        if self.eat("[]"):
            return S.Hole()
        if t.kind == "name" and t.text not in KEYWORDS:
            kind = self.kind_of(t.text)
            if kind == "x":
                self.pos += 1
                return S.Ident(t.text)
            if kind == "i":
                self.fail(f"stack variable {t.text!r} used as a term")
            self.fail(f"undeclared name {t.text!r}")
        if self.eat("("):
            sub = self.parse_term()
            self.expect(")")
            return sub
        self.fail(f"expected a term, found {t.text!r}")

    # -- assertions --------------------------------------------------------

    def parse_assertion(self) -> S.Assertion:
        if self.eat("exists"):
            var = self.name_token()
            self.expect(".")
            self.bound_i.append(var)
            body = self.parse_assertion()
            self.bound_i.pop()
            return S.Exists(var, body)
        a = self.parse_star()
        if self.eat("/\\"):
            return S.And(a, self.parse_assertion())
        return a

    def parse_star(self) -> S.Assertion:
        a = self.parse_neg()
        if self.eat("*"):
            return S.Star(a, self.parse_star())
        return a

    def parse_neg(self) -> S.Assertion:
        if self.eat("~"):
            return S.Not(self.parse_neg())
        return self.assertion_atom()

    def assertion_atom(self) -> S.Assertion:
        t = self.peek()
        if self.eat("emp"):
            return S.EMP
        if t.text == "(":
            sub = self.attempt(self.paren_assertion)
            if sub is not None:
                return sub
        e = self.parse_expr()
        if self.eat("="):
            return S.EqE(e, self.parse_expr())
        if self.eat("<="):
            return S.LeqE(e, self.parse_expr())
        if self.eat("|->"):
            return self.points_to_fields(e)
        self.fail("expected =, <= or |-> after expression")

    def paren_assertion(self) -> S.Assertion:
        self.expect("(")
        sub = self.parse_assertion()
        self.expect(")")
        return sub

    def points_to_fields(self, addr: S.Expr) -> S.Assertion:
        if self.eat("-"):
            if self.eat(","):
                return S.points_to_snd(addr, self.parse_expr())
            return S.points_to_any(addr)
        v0 = self.parse_expr()
        self.expect(",")
        if self.eat("-"):
            return S.points_to_fst(addr, v0)
        return S.PointsTo(addr, v0, self.parse_expr())

    # -- specifications -----------------------------------------------------

    def parse_spec(self) -> S.Spec:
        t = self.peek()
        if t.text in ("forall", "exists"):
            # a quantifier here may belong to the spec layer; an assertion
            # 'exists' can only appear inside braces, so no ambiguity
            self.pos += 1
            var = self.name_token()
            if self.eat(":"):
                ty = self.parse_type()
                self.expect(".")
                self.bound_x.append(var)
                body = self.parse_spec()
                self.bound_x.pop()
                return (S.ForallX if t.text == "forall" else S.ExistsX)(var, ty, body)
            self.expect(".")
            self.bound_i.append(var)
            body = self.parse_spec()
            self.bound_i.pop()
            return (S.ForallI if t.text == "forall" else S.ExistsI)(var, body)
        a = self.parse_spec_or()
        if self.eat("=>"):
            return S.SpecImplies(a, self.parse_spec())
        return a

    def parse_spec_or(self) -> S.Spec:
        a = self.parse_spec_and()
        if self.eat("\\/"):
            return S.SpecOr(a, self.parse_spec_or())
        return a

    def parse_spec_and(self) -> S.Spec:
        a = self.parse_tensor()
        if self.eat("/\\"):
            return S.SpecAnd(a, self.parse_spec_and())
        return a

    def parse_tensor(self) -> S.Spec:
        s = self.spec_atom()
        while self.eat("<*>"):
            s = S.Tensor(s, self.parse_star())
        return s

    def spec_atom(self) -> S.Spec:
        t = self.peek()
        if self.eat("{"):
            pre = self.parse_assertion()
            self.expect("}")
            term = self.parse_term()
            self.expect("{")
            post = self.parse_assertion()
            self.expect("}")
            return S.Triple(pre, term, post)
        if t.text == "(":
            sub = self.attempt(self.paren_spec)
            if sub is not None:
                return sub
        eq = self.attempt(self.expr_equality)
        if eq is not None:
            return eq
        lhs = self.parse_app()
        self.expect("=")
        return S.EqTerm(lhs, self.parse_app())

    def paren_spec(self) -> S.Spec:
        self.expect("(")
        sub = self.parse_spec()
        self.expect(")")
        return sub

    def expr_equality(self) -> S.Spec:
        a = self.parse_expr()
        self.expect("=")
        return S.EqExpr(a, self.parse_expr())

    def finish(self, node):
        t = self.peek()
        if t.kind != "eof":
            raise ParseError(f"trailing input starting at {t.text!r}", t.line, t.col)
        return node


_CATEGORIES = {
    "expr": Parser.parse_expr,
    "term": Parser.parse_term,
    "assertion": Parser.parse_assertion,
    "spec": Parser.parse_spec,
    "type": Parser.parse_type,
}


def parse(text: str, category: str, delta=(), gamma=()):
    """Parse text in the given category: expr, term, assertion, spec or type.

    ``delta``/``gamma`` declare the free stack variables and identifiers
    (names only; types are not needed to parse).
    """
    fn = _CATEGORIES.get(category)
    if fn is None:
        raise ValueError(f"unknown category {category!r}")
    p = Parser(text, delta=delta, gamma=gamma)
    return p.finish(fn(p))


def parse_gamma(text: str) -> dict[str, S.Type]:
    """Parse a gamma header body like ``x:com, f:val -> com``."""
    gamma: dict[str, S.Type] = {}
    text = text.strip()
    if not text:
        return gamma
    for part in text.split(","):
        name, _, ty = part.partition(":")
        name = name.strip()
        if not name or not ty.strip():
            raise ValueError(f"bad gamma entry {part!r}")
        gamma[name] = parse(ty.strip(), "type")
    return gamma


def load_judgment(text: str) -> tuple[set[str], dict[str, S.Type], str]:
    """Split a judgment file into (delta, gamma, body).

    Header lines are ``delta: i j k`` and ``gamma: x:com, ...``; everything
    after them is the judgment body.
    """
    delta: set[str] = set()
    gamma: dict[str, S.Type] = {}
    lines = text.splitlines()
    body_from = 0
    for idx, line in enumerate(lines):
        stripped = line.strip()
        if stripped.startswith("delta:"):
            delta |= set(stripped[len("delta:"):].replace(",", " ").split())
            body_from = idx + 1
        elif stripped.startswith("gamma:"):
            gamma.update(parse_gamma(stripped[len("gamma:"):]))
            body_from = idx + 1
        elif stripped == "" and body_from == idx:
            body_from = idx + 1
        else:
            break
    return delta, gamma, "\n".join(lines[body_from:])

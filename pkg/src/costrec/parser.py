"""Concrete syntax for programs: tokenizer and recursive-descent parser.

Surface conveniences beyond the core grammar: `(e1, e2, e3)` folds to nested
pairs right-associatively (same for constructor arguments and branch
patterns), and `*` in types/functors is right-associative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .terms import (
    App,
    Branch,
    Con,
    DataDecl,
    Def,
    Delay,
    Expr,
    FArrow,
    FConst,
    Force,
    FProd,
    FSelf,
    Functor,
    Lam,
    Let,
    Map,
    Pair,
    Program,
    Rec,
    Signature,
    SourceType,
    Split,
    TArrow,
    TData,
    TProd,
    TSusp,
    TUnit,
    Unit,
    Var,
    fresh,
)

KEYWORDS = {
    "datatype", "def", "of", "self", "unit", "susp", "split", "as", "in",
    "fn", "delay", "force", "rec", "map", "let",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<unitlit>\(\))
  | (?P<arrow>->)
  | (?P<punct>[()\[\];|,.*=:+])
  | (?P<number>\d+)
  | (?P<uident>[A-Z][A-Za-z0-9_']*)
  | (?P<lident>[a-z][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    linestart = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - linestart + 1)
        kind = m.lastgroup
        tok = m.group()
        col = pos - linestart + 1
        if kind == "ws":
            nl = tok.count("\n")
            if nl:
                line += nl
                linestart = pos + tok.rindex("\n") + 1
        elif kind == "punct":
            tokens.append(Token(tok, tok, line, col))
        elif kind == "arrow":
            tokens.append(Token("->", "->", line, col))
        elif kind == "unitlit":
            tokens.append(Token("()", "()", line, col))
        elif kind == "lident" and tok in KEYWORDS:
            tokens.append(Token(tok, tok, line, col))
        else:
            tokens.append(Token(kind, tok, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - linestart + 1))
    return tokens


# Tokens that may begin an expression atom (used to extend applications).
_ATOM_START = {"lident", "()", "(", "uident", "rec", "map"}
_PREFIX_START = {"fn", "split", "let", "delay", "force"}


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    # -- token helpers

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def expect(self, kind: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise ParseError(f"expected {kind!r}, found {t.text!r}", t.line, t.col)
        return self.next()

    def fail(self, message: str):
        t = self.peek()
        raise ParseError(message, t.line, t.col)

    # -- program

    def parse_program(self) -> Program:
        sig = Signature()
        defs: list[Def] = []
        while not self.at("eof"):
            if self.at("datatype"):
                sig.decls.append(self.parse_datadecl())
            elif self.at("def"):
                defs.append(self.parse_defdecl())
            else:
                self.fail("expected 'datatype' or 'def'")
        return Program(sig, defs)

    def parse_datadecl(self) -> DataDecl:
        self.expect("datatype")
        name = self.expect("lident").text
        self.expect("=")
        ctors = [self.parse_ctor()]
        while self.at("|"):
            self.next()
            ctors.append(self.parse_ctor())
        self.expect(";")
        return DataDecl(name, ctors)

    def parse_ctor(self) -> tuple[str, Functor]:
        name = self.expect("uident").text
        self.expect("of")
        return name, self.parse_functor()

    def parse_defdecl(self) -> Def:
        self.expect("def")
        name = self.expect("lident").text
        annot = None
        if self.at(":"):
            self.next()
            annot = self.parse_type()
        self.expect("=")
        body = self.parse_expr()
        self.expect(";")
        return Def(name, annot, body)

    # -- types and functors

    def parse_type(self) -> SourceType:
        left = self.parse_type_prod()
        if self.at("->"):
            self.next()
            return TArrow(left, self.parse_type())
        return left

    def parse_type_prod(self) -> SourceType:
        left = self.parse_type_prefix()
        if self.at("*"):
            self.next()
            return TProd(left, self.parse_type_prod())
        return left

    def parse_type_prefix(self) -> SourceType:
        if self.at("susp"):
            self.next()
            return TSusp(self.parse_type_prefix())
        if self.at("unit"):
            self.next()
            return TUnit()
        if self.at("lident"):
            return TData(self.next().text)
        if self.at("("):
            self.next()
            ty = self.parse_type()
            self.expect(")")
            return ty
        self.fail("expected a type")

    def parse_functor(self) -> Functor:
        left = self.parse_functor_prod()
        if self.at("->"):
            t = self.peek()
            self.next()
            dom = self._functor_to_type(left, t)
            return FArrow(dom, self.parse_functor())
        return left

    def parse_functor_prod(self) -> Functor:
        left = self.parse_functor_prefix()
        if self.at("*"):
            self.next()
            return FProd(left, self.parse_functor_prod())
        return left

    def parse_functor_prefix(self) -> Functor:
        if self.at("self"):
            self.next()
            return FSelf()
        if self.at("("):
            self.next()
            phi = self.parse_functor()
            self.expect(")")
            return phi
        return FConst(self.parse_type_prefix())

    def _functor_to_type(self, phi: Functor, tok: Token) -> SourceType:
        if isinstance(phi, FConst):
            return phi.ty
        if isinstance(phi, FProd):
            return TProd(self._functor_to_type(phi.left, tok), self._functor_to_type(phi.right, tok))
        if isinstance(phi, FArrow):
            return TArrow(phi.dom, self._functor_to_type(phi.cod, tok))
        raise ParseError("'self' may not occur in an arrow domain", tok.line, tok.col)

    # -- expressions

    def parse_expr(self) -> Expr:
        k = self.peek().kind
        if k in _PREFIX_START:
            return self.parse_prefix()
        e = self.parse_atom()
        while self.peek().kind in _ATOM_START:
            e = App(e, self.parse_atom())
        return e

    def parse_prefix(self) -> Expr:
        t = self.peek()
        if t.kind == "fn":
            self.next()
            var = self.expect("lident").text
            self.expect(".")
            return Lam(var, self.parse_expr())
        if t.kind == "split":
            self.next()
            scrut = self.parse_expr()
            self.expect("as")
            self.expect("(")
            x0 = self.expect("lident").text
            self.expect(",")
            x1 = self.expect("lident").text
            self.expect(")")
            self.expect("in")
            return Split(scrut, x0, x1, self.parse_expr())
        if t.kind == "let":
            self.next()
            var = self.expect("lident").text
            self.expect("=")
            bound = self.parse_expr()
            self.expect("in")
            return Let(bound, var, self.parse_expr())
        if t.kind == "delay":
            self.next()
            return Delay(self.parse_expr_app())
        if t.kind == "force":
            self.next()
            return Force(self.parse_expr_app())
        self.fail("expected an expression")

    def parse_expr_app(self) -> Expr:
        """Application chain without trailing prefix forms (for delay/force bodies)."""
        if self.peek().kind in _PREFIX_START:
            return self.parse_prefix()
        e = self.parse_atom()
        while self.peek().kind in _ATOM_START:
            e = App(e, self.parse_atom())
        return e

    def parse_atom(self) -> Expr:
        t = self.peek()
        if t.kind == "lident":
            return Var(self.next().text)
        if t.kind == "()":
            self.next()
            return Unit()
        if t.kind == "(":
            self.next()
            e = self.parse_expr()
            if self.at(","):
                parts = [e]
                while self.at(","):
                    self.next()
                    parts.append(self.parse_expr())
                self.expect(")")
                return _fold_pairs(parts)
            self.expect(")")
            return e
        if t.kind == "uident":
            name = self.next().text
            if self.at("()"):  # the empty-argument call C() lexes as one token
                self.next()
                return Con(name, Unit())
            self.expect("(")
            if self.at(")"):
                self.next()
                return Con(name, Unit())
            parts = [self.parse_expr()]
            while self.at(","):
                self.next()
                parts.append(self.parse_expr())
            self.expect(")")
            return Con(name, _fold_pairs(parts))
        if t.kind == "rec":
            self.next()
            self.expect("(")
            scrut = self.parse_expr()
            self.expect(";")
            branches = [self.parse_branch()]
            while self.at("|"):
                self.next()
                branches.append(self.parse_branch())
            self.expect(")")
            return Rec(scrut, branches)
        if t.kind == "map":
            self.next()
            self.expect("[")
            phi = self.parse_functor()
            self.expect("]")
            self.expect("(")
            var = self.expect("lident").text
            self.expect(".")
            vbody = self.parse_expr()
            self.expect(";")
            target = self.parse_expr()
            self.expect(")")
            return Map(phi, var, vbody, target)
        if t.kind == "uident" or (t.kind == "lident" and t.text in KEYWORDS):
            self.fail(f"unexpected {t.text!r}")
        self.fail("expected an expression")

    def parse_branch(self) -> Branch:
        ctor = self.expect("uident").text
        self.expect("->")
        pat = self.parse_pat()
        self.expect(".")
        body = self.parse_expr()
        if isinstance(pat, str):
            return Branch(ctor, pat, body)
        var = fresh("p")
        return Branch(ctor, var, _desugar_pat(pat, Var(var), body))

    def parse_pat(self):
        if self.at("lident"):
            return self.next().text
        self.expect("(")
        parts = [self.parse_pat()]
        while self.at(","):
            self.next()
            parts.append(self.parse_pat())
        self.expect(")")
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = (p, out)
        return out


def _fold_pairs(parts: list[Expr]) -> Expr:
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Pair(p, out)
    return out


def _desugar_pat(pat, scrut: Expr, body: Expr) -> Expr:
    """Tuple patterns become nested splits; plain names bind directly."""
    if isinstance(pat, str):
        if isinstance(scrut, Var):
            from .terms import subst1

            return subst1(body, pat, scrut) if pat != scrut.name else body
        return Let(scrut, pat, body)
    p0, p1 = pat
    x0 = p0 if isinstance(p0, str) else fresh("p")
    x1 = p1 if isinstance(p1, str) else fresh("p")
    inner = body
    if not isinstance(p1, str):
        inner = _desugar_pat(p1, Var(x1), inner)
    if not isinstance(p0, str):
        inner = _desugar_pat(p0, Var(x0), inner)
    return Split(scrut, x0, x1, inner)


# ---------------------------------------------------------------------------
# Printing (output re-parses to an alpha-equivalent term)


def type_to_text(ty: SourceType) -> str:
    if isinstance(ty, TUnit):
        return "unit"
    if isinstance(ty, TData):
        return ty.name
    if isinstance(ty, TSusp):
        return f"susp {_type_atom(ty.body)}"
    if isinstance(ty, TProd):
        left = ty.left
        ltext = type_to_text(left)
        if isinstance(left, (TProd, TArrow)):
            ltext = f"({ltext})"
        rtext = type_to_text(ty.right)
        if isinstance(ty.right, TArrow):
            rtext = f"({rtext})"
        return f"{ltext} * {rtext}"
    if isinstance(ty, TArrow):
        dtext = type_to_text(ty.dom)
        if isinstance(ty.dom, TArrow):
            dtext = f"({dtext})"
        return f"{dtext} -> {type_to_text(ty.cod)}"
    raise TypeError(ty)


def _type_atom(ty: SourceType) -> str:
    text = type_to_text(ty)
    if isinstance(ty, (TProd, TArrow, TSusp)):
        return f"({text})"
    return text


def functor_to_text(phi: Functor) -> str:
    if isinstance(phi, FSelf):
        return "self"
    if isinstance(phi, FConst):
        return _type_atom(phi.ty)
    if isinstance(phi, FProd):
        ltext = functor_to_text(phi.left)
        if isinstance(phi.left, (FProd, FArrow)):
            ltext = f"({ltext})"
        return f"{ltext} * {functor_to_text(phi.right)}"
    if isinstance(phi, FArrow):
        return f"{_type_atom(phi.dom)} -> {functor_to_text(phi.cod)}"
    raise TypeError(phi)


def expr_to_text(e: Expr) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unit):
        return "()"
    if isinstance(e, Pair):
        return f"({expr_to_text(e.left)}, {expr_to_text(e.right)})"
    if isinstance(e, Lam):
        return f"fn {e.var}. {expr_to_text(e.body)}"
    if isinstance(e, App):
        fn = e.fn
        fntext = expr_to_text(fn) if isinstance(fn, App) else _expr_atom(fn)
        return f"{fntext} {_expr_atom(e.arg)}"
    if isinstance(e, Delay):
        return f"delay {_expr_atom(e.body)}"
    if isinstance(e, Force):
        return f"force {_expr_atom(e.body)}"
    if isinstance(e, Con):
        if isinstance(e.arg, Unit):
            return f"{e.ctor}()"
        return f"{e.ctor}({expr_to_text(e.arg)})"
    if isinstance(e, Split):
        return (
            f"split {expr_to_text(e.scrut)} as ({e.x0}, {e.x1}) "
            f"in {expr_to_text(e.body)}"
        )
    if isinstance(e, Rec):
        branches = " | ".join(
            f"{b.ctor} -> {b.var}. {expr_to_text(b.body)}" for b in e.branches
        )
        return f"rec({expr_to_text(e.scrut)}; {branches})"
    if isinstance(e, Map):
        return (
            f"map[{functor_to_text(e.functor)}]"
            f"({e.var}. {expr_to_text(e.vbody)}; {expr_to_text(e.target)})"
        )
    if isinstance(e, Let):
        return f"let {e.var} = {expr_to_text(e.bound)} in {expr_to_text(e.body)}"
    raise TypeError(e)


def _expr_atom(e: Expr) -> str:
    text = expr_to_text(e)
    if isinstance(e, (Var, Unit, Pair, Con, Rec, Map)):
        return text
    return f"({text})"


def parse_program(text: str) -> Program:
    return Parser(text).parse_program()


def parse_expr(text: str) -> Expr:
    p = Parser(text)
    e = p.parse_expr()
    p.expect("eof")
    return e


def parse_type(text: str) -> SourceType:
    p = Parser(text)
    ty = p.parse_type()
    p.expect("eof")
    return ty

"""Source-language ASTs: types, constructor-argument functors, signatures, expressions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional


# ---------------------------------------------------------------------------
# Types


class SourceType:
    pass


@dataclass(frozen=True)
class TUnit(SourceType):
    def __str__(self) -> str:
        return "unit"


@dataclass(frozen=True)
class TProd(SourceType):
    left: SourceType
    right: SourceType

    def __str__(self) -> str:
        return f"({self.left} * {self.right})"


@dataclass(frozen=True)
class TArrow(SourceType):
    dom: SourceType
    cod: SourceType

    def __str__(self) -> str:
        return f"({self.dom} -> {self.cod})"


@dataclass(frozen=True)
class TSusp(SourceType):
    body: SourceType

    def __str__(self) -> str:
        return f"susp {self.body}"


@dataclass(frozen=True)
class TData(SourceType):
    name: str

    def __str__(self) -> str:
        return self.name


UNIT = TUnit()


# ---------------------------------------------------------------------------
# Constructor-argument functors (strictly positive shapes)


class Functor:
    pass


@dataclass(frozen=True)
class FSelf(Functor):
    def __str__(self) -> str:
        return "self"


@dataclass(frozen=True)
class FConst(Functor):
    ty: SourceType

    def __str__(self) -> str:
        return str(self.ty)


@dataclass(frozen=True)
class FProd(Functor):
    left: Functor
    right: Functor

    def __str__(self) -> str:
        return f"({self.left} * {self.right})"


@dataclass(frozen=True)
class FArrow(Functor):
    dom: SourceType
    cod: Functor

    def __str__(self) -> str:
        return f"({self.dom} -> {self.cod})"


def functor_subst(phi: Functor, ty: SourceType) -> SourceType:
    """Substitute `ty` for the recursive slot of `phi`, yielding a type."""
    if isinstance(phi, FSelf):
        return ty
    if isinstance(phi, FConst):
        return phi.ty
    if isinstance(phi, FProd):
        return TProd(functor_subst(phi.left, ty), functor_subst(phi.right, ty))
    if isinstance(phi, FArrow):
        return TArrow(phi.dom, functor_subst(phi.cod, ty))
    raise TypeError(phi)


def functor_mentions_self(phi: Functor) -> bool:
    if isinstance(phi, FSelf):
        return True
    if isinstance(phi, FConst):
        return False
    if isinstance(phi, FProd):
        return functor_mentions_self(phi.left) or functor_mentions_self(phi.right)
    if isinstance(phi, FArrow):
        return functor_mentions_self(phi.cod)
    raise TypeError(phi)


# ---------------------------------------------------------------------------
# Signatures


@dataclass
class DataDecl:
    name: str
    ctors: list[tuple[str, Functor]]

    def functor_of(self, ctor: str) -> Functor:
        for name, phi in self.ctors:
            if name == ctor:
                return phi
        raise KeyError(ctor)


@dataclass
class Signature:
    decls: list[DataDecl] = field(default_factory=list)

    def decl(self, name: str) -> DataDecl:
        for d in self.decls:
            if d.name == name:
                return d
        raise KeyError(f"unknown datatype {name!r}")

    def has_datatype(self, name: str) -> bool:
        return any(d.name == name for d in self.decls)

    def ctor_datatype(self, ctor: str) -> Optional[DataDecl]:
        for d in self.decls:
            if any(name == ctor for name, _ in d.ctors):
                return d
        return None


# ---------------------------------------------------------------------------
# Expressions


class Expr:
    pass


@dataclass
class Var(Expr):
    name: str


@dataclass
class Unit(Expr):
    pass


@dataclass
class Pair(Expr):
    left: Expr
    right: Expr


@dataclass
class Split(Expr):
    scrut: Expr
    x0: str
    x1: str
    body: Expr


@dataclass
class Lam(Expr):
    var: str
    body: Expr


@dataclass
class App(Expr):
    fn: Expr
    arg: Expr


@dataclass
class Delay(Expr):
    body: Expr


@dataclass
class Force(Expr):
    body: Expr


@dataclass
class Con(Expr):
    ctor: str
    arg: Expr


@dataclass
class Branch:
    ctor: str
    var: str
    body: Expr


@dataclass
class Rec(Expr):
    scrut: Expr
    branches: list[Branch]

    def branch_for(self, ctor: str) -> Branch:
        for b in self.branches:
            if b.ctor == ctor:
                return b
        raise KeyError(ctor)


@dataclass
class Map(Expr):
    functor: Functor
    var: str
    vbody: Expr
    target: Expr


@dataclass
class Let(Expr):
    bound: Expr
    var: str
    body: Expr


@dataclass
class Def:
    name: str
    annot: Optional[SourceType]
    body: Expr


@dataclass
class Program:
    signature: Signature
    defs: list[Def]

    def def_named(self, name: str) -> Def:
        for d in self.defs:
            if d.name == name:
                return d
        raise KeyError(f"unknown def {name!r}")


# ---------------------------------------------------------------------------
# Variables, substitution, alpha-equivalence

_fresh_counter = itertools.count()


def fresh(base: str = "x") -> str:
    base = base.split("'")[0]
    return f"{base}'{next(_fresh_counter)}"


def free_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Unit):
        return set()
    if isinstance(e, Pair):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Split):
        return free_vars(e.scrut) | (free_vars(e.body) - {e.x0, e.x1})
    if isinstance(e, Lam):
        return free_vars(e.body) - {e.var}
    if isinstance(e, App):
        return free_vars(e.fn) | free_vars(e.arg)
    if isinstance(e, (Delay, Force)):
        return free_vars(e.body)
    if isinstance(e, Con):
        return free_vars(e.arg)
    if isinstance(e, Rec):
        out = free_vars(e.scrut)
        for b in e.branches:
            out |= free_vars(b.body) - {b.var}
        return out
    if isinstance(e, Map):
        return (free_vars(e.vbody) - {e.var}) | free_vars(e.target)
    if isinstance(e, Let):
        return free_vars(e.bound) | (free_vars(e.body) - {e.var})
    raise TypeError(e)


def subst(e: Expr, repl: dict[str, Expr]) -> Expr:
    """Capture-avoiding simultaneous substitution."""
    repl = {k: v for k, v in repl.items() if not (isinstance(v, Var) and v.name == k)}
    if not repl:
        return e
    fv = set()
    for v in repl.values():
        fv |= free_vars(v)

    def rebind(var: str, inner: dict[str, Expr]) -> tuple[str, dict[str, Expr]]:
        inner = {k: v for k, v in inner.items() if k != var}
        if var in fv:
            nv = fresh(var)
            inner = dict(inner)
            inner[var] = Var(nv)
            return nv, inner
        return var, inner

    def go(e: Expr, s: dict[str, Expr]) -> Expr:
        s = {k: v for k, v in s.items() if k in free_vars(e)}
        if not s:
            return e
        if isinstance(e, Var):
            return s.get(e.name, e)
        if isinstance(e, Unit):
            return e
        if isinstance(e, Pair):
            return Pair(go(e.left, s), go(e.right, s))
        if isinstance(e, Split):
            scrut = go(e.scrut, s)
            x0, s1 = rebind(e.x0, s)
            x1, s1 = rebind(e.x1, s1)
            return Split(scrut, x0, x1, go(e.body, s1))
        if isinstance(e, Lam):
            v, s1 = rebind(e.var, s)
            return Lam(v, go(e.body, s1))
        if isinstance(e, App):
            return App(go(e.fn, s), go(e.arg, s))
        if isinstance(e, Delay):
            return Delay(go(e.body, s))
        if isinstance(e, Force):
            return Force(go(e.body, s))
        if isinstance(e, Con):
            return Con(e.ctor, go(e.arg, s))
        if isinstance(e, Rec):
            branches = []
            for b in e.branches:
                v, s1 = rebind(b.var, s)
                branches.append(Branch(b.ctor, v, go(b.body, s1)))
            return Rec(go(e.scrut, s), branches)
        if isinstance(e, Map):
            v, s1 = rebind(e.var, s)
            return Map(e.functor, v, go(e.vbody, s1), go(e.target, s))
        if isinstance(e, Let):
            bound = go(e.bound, s)
            v, s1 = rebind(e.var, s)
            return Let(bound, v, go(e.body, s1))
        raise TypeError(e)

    return go(e, repl)


def subst1(e: Expr, var: str, value: Expr) -> Expr:
    return subst(e, {var: value})


def is_value(e: Expr) -> bool:
    """Membership in the syntactic value sub-grammar (variables excluded)."""
    if isinstance(e, (Unit, Lam, Delay)):
        return True
    if isinstance(e, Pair):
        return is_value(e.left) and is_value(e.right)
    if isinstance(e, Con):
        return is_value(e.arg)
    return False


def is_value_form(e: Expr) -> bool:
    """Value or variable: the shapes map binders and targets may take."""
    if isinstance(e, Var):
        return True
    if isinstance(e, Pair):
        return is_value_form(e.left) and is_value_form(e.right)
    if isinstance(e, Con):
        return is_value_form(e.arg)
    if isinstance(e, (Unit, Lam, Delay)):
        return True
    return False


def alpha_eq(a: Expr, b: Expr) -> bool:
    def go(a: Expr, b: Expr, ea: dict[str, int], eb: dict[str, int], depth: Iterator[int]) -> bool:
        if type(a) is not type(b):
            return False
        if isinstance(a, Var):
            return ea.get(a.name, a.name) == eb.get(b.name, b.name)
        if isinstance(a, Unit):
            return True
        if isinstance(a, Pair):
            return go(a.left, b.left, ea, eb, depth) and go(a.right, b.right, ea, eb, depth)
        if isinstance(a, Split):
            if not go(a.scrut, b.scrut, ea, eb, depth):
                return False
            i, j = next(depth), next(depth)
            return go(a.body, b.body, {**ea, a.x0: i, a.x1: j}, {**eb, b.x0: i, b.x1: j}, depth)
        if isinstance(a, Lam):
            i = next(depth)
            return go(a.body, b.body, {**ea, a.var: i}, {**eb, b.var: i}, depth)
        if isinstance(a, App):
            return go(a.fn, b.fn, ea, eb, depth) and go(a.arg, b.arg, ea, eb, depth)
        if isinstance(a, (Delay, Force)):
            return go(a.body, b.body, ea, eb, depth)
        if isinstance(a, Con):
            return a.ctor == b.ctor and go(a.arg, b.arg, ea, eb, depth)
        if isinstance(a, Rec):
            if not go(a.scrut, b.scrut, ea, eb, depth) or len(a.branches) != len(b.branches):
                return False
            for ba, bb in zip(a.branches, b.branches):
                if ba.ctor != bb.ctor:
                    return False
                i = next(depth)
                if not go(ba.body, bb.body, {**ea, ba.var: i}, {**eb, bb.var: i}, depth):
                    return False
            return True
        if isinstance(a, Map):
            if a.functor != b.functor:
                return False
            i = next(depth)
            return go(a.vbody, b.vbody, {**ea, a.var: i}, {**eb, b.var: i}, depth) and go(
                a.target, b.target, ea, eb, depth
            )
        if isinstance(a, Let):
            if not go(a.bound, b.bound, ea, eb, depth):
                return False
            i = next(depth)
            return go(a.body, b.body, {**ea, a.var: i}, {**eb, b.var: i}, depth)
        raise TypeError(a)

    return go(a, b, {}, {}, itertools.count())


def inline_defs(program: Program, e: Expr) -> Expr:
    """Expand all top-level abbreviations inside `e` (later defs may use earlier ones)."""
    expanded: dict[str, Expr] = {}
    for d in program.defs:
        expanded[d.name] = subst(d.body, {k: v for k, v in expanded.items()})
    return subst(e, expanded)

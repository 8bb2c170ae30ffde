"""Complexity-language ASTs, typing, the cmap macro, and surface syntax.

The complexity language has a cost type C with literals and addition, plus
units, products with projections, functions, constructors, and rec.  Numeral
literals beyond 0 and 1 are a surface convenience (n abbreviates 1 + ... + 1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from . import parser as _sp


# ---------------------------------------------------------------------------
# Types


class CType:
    pass


@dataclass(frozen=True)
class CCost(CType):
    def __str__(self) -> str:
        return "C"


@dataclass(frozen=True)
class CUnit(CType):
    def __str__(self) -> str:
        return "unit"


@dataclass(frozen=True)
class CProd(CType):
    left: CType
    right: CType

    def __str__(self) -> str:
        return f"({self.left} * {self.right})"


@dataclass(frozen=True)
class CArrow(CType):
    dom: CType
    cod: CType

    def __str__(self) -> str:
        return f"({self.dom} -> {self.cod})"


@dataclass(frozen=True)
class CData(CType):
    name: str

    def __str__(self) -> str:
        return self.name


COST = CCost()
CUNIT = CUnit()


# ---------------------------------------------------------------------------
# Constructor-argument functors (complexity side)


class CFunctor:
    pass


@dataclass(frozen=True)
class CFSelf(CFunctor):
    def __str__(self) -> str:
        return "self"


@dataclass(frozen=True)
class CFConst(CFunctor):
    ty: CType

    def __str__(self) -> str:
        return str(self.ty)


@dataclass(frozen=True)
class CFProd(CFunctor):
    left: CFunctor
    right: CFunctor

    def __str__(self) -> str:
        return f"({self.left} * {self.right})"


@dataclass(frozen=True)
class CFArrow(CFunctor):
    dom: CType
    cod: CFunctor

    def __str__(self) -> str:
        return f"({self.dom} -> {self.cod})"


def cfunctor_subst(phi: CFunctor, ty: CType) -> CType:
    if isinstance(phi, CFSelf):
        return ty
    if isinstance(phi, CFConst):
        return phi.ty
    if isinstance(phi, CFProd):
        return CProd(cfunctor_subst(phi.left, ty), cfunctor_subst(phi.right, ty))
    if isinstance(phi, CFArrow):
        return CArrow(phi.dom, cfunctor_subst(phi.cod, ty))
    raise TypeError(phi)


def cfunctor_mentions_self(phi: CFunctor) -> bool:
    if isinstance(phi, CFSelf):
        return True
    if isinstance(phi, CFConst):
        return False
    if isinstance(phi, CFProd):
        return cfunctor_mentions_self(phi.left) or cfunctor_mentions_self(phi.right)
    if isinstance(phi, CFArrow):
        return cfunctor_mentions_self(phi.cod)
    raise TypeError(phi)


@dataclass
class CDataDecl:
    name: str
    ctors: list[tuple[str, CFunctor]]

    def functor_of(self, ctor: str) -> CFunctor:
        for name, phi in self.ctors:
            if name == ctor:
                return phi
        raise KeyError(ctor)


@dataclass
class CSignature:
    decls: list[CDataDecl] = field(default_factory=list)

    def decl(self, name: str) -> CDataDecl:
        for d in self.decls:
            if d.name == name:
                return d
        raise KeyError(f"unknown datatype {name!r}")

    def ctor_datatype(self, ctor: str) -> Optional[CDataDecl]:
        for d in self.decls:
            if any(name == ctor for name, _ in d.ctors):
                return d
        return None


# ---------------------------------------------------------------------------
# Expressions


class CExpr:
    pass


@dataclass
class CVar(CExpr):
    name: str


@dataclass
class CNum(CExpr):
    value: int


@dataclass
class CPlus(CExpr):
    left: CExpr
    right: CExpr


@dataclass
class CUnitE(CExpr):
    pass


@dataclass
class CPair(CExpr):
    left: CExpr
    right: CExpr


@dataclass
class CProj(CExpr):
    index: int  # 0 or 1
    body: CExpr


@dataclass
class CLam(CExpr):
    var: str
    body: CExpr


@dataclass
class CApp(CExpr):
    fn: CExpr
    arg: CExpr


@dataclass
class CCon(CExpr):
    ctor: str
    arg: CExpr


@dataclass
class CBranch:
    ctor: str
    var: str
    body: CExpr


@dataclass
class CRec(CExpr):
    scrut: CExpr
    branches: list[CBranch]

    def branch_for(self, ctor: str) -> CBranch:
        for b in self.branches:
            if b.ctor == ctor:
                return b
        raise KeyError(ctor)


def c_free_vars(e: CExpr) -> set[str]:
    if isinstance(e, CVar):
        return {e.name}
    if isinstance(e, (CNum, CUnitE)):
        return set()
    if isinstance(e, (CPlus, CPair)):
        return c_free_vars(e.left) | c_free_vars(e.right)
    if isinstance(e, CProj):
        return c_free_vars(e.body)
    if isinstance(e, CLam):
        return c_free_vars(e.body) - {e.var}
    if isinstance(e, CApp):
        return c_free_vars(e.fn) | c_free_vars(e.arg)
    if isinstance(e, CCon):
        return c_free_vars(e.arg)
    if isinstance(e, CRec):
        out = c_free_vars(e.scrut)
        for b in e.branches:
            out |= c_free_vars(b.body) - {b.var}
        return out
    raise TypeError(e)


def c_subst(e: CExpr, repl: dict[str, CExpr]) -> CExpr:
    """Capture-avoiding simultaneous substitution."""
    from .terms import fresh

    repl = {k: v for k, v in repl.items() if not (isinstance(v, CVar) and v.name == k)}
    if not repl:
        return e
    fv = set()
    for v in repl.values():
        fv |= c_free_vars(v)

    def rebind(var: str, inner: dict[str, CExpr]) -> tuple[str, dict[str, CExpr]]:
        inner = {k: v for k, v in inner.items() if k != var}
        if var in fv:
            nv = fresh(var)
            inner = dict(inner)
            inner[var] = CVar(nv)
            return nv, inner
        return var, inner

    def go(e: CExpr, s: dict[str, CExpr]) -> CExpr:
        s = {k: v for k, v in s.items() if k in c_free_vars(e)}
        if not s:
            return e
        if isinstance(e, CVar):
            return s.get(e.name, e)
        if isinstance(e, (CNum, CUnitE)):
            return e
        if isinstance(e, CPlus):
            return CPlus(go(e.left, s), go(e.right, s))
        if isinstance(e, CPair):
            return CPair(go(e.left, s), go(e.right, s))
        if isinstance(e, CProj):
            return CProj(e.index, go(e.body, s))
        if isinstance(e, CLam):
            v, s1 = rebind(e.var, s)
            return CLam(v, go(e.body, s1))
        if isinstance(e, CApp):
            return CApp(go(e.fn, s), go(e.arg, s))
        if isinstance(e, CCon):
            return CCon(e.ctor, go(e.arg, s))
        if isinstance(e, CRec):
            branches = []
            for b in e.branches:
                v, s1 = rebind(b.var, s)
                branches.append(CBranch(b.ctor, v, go(b.body, s1)))
            return CRec(go(e.scrut, s), branches)
        raise TypeError(e)

    return go(e, repl)


def c_subst1(e: CExpr, var: str, value: CExpr) -> CExpr:
    return c_subst(e, {var: value})


def c_alpha_eq(a: CExpr, b: CExpr) -> bool:
    def go(a, b, ea, eb, depth) -> bool:
        if type(a) is not type(b):
            return False
        if isinstance(a, CVar):
            return ea.get(a.name, a.name) == eb.get(b.name, b.name)
        if isinstance(a, CNum):
            return a.value == b.value
        if isinstance(a, CUnitE):
            return True
        if isinstance(a, (CPlus, CPair)):
            return go(a.left, b.left, ea, eb, depth) and go(a.right, b.right, ea, eb, depth)
        if isinstance(a, CProj):
            return a.index == b.index and go(a.body, b.body, ea, eb, depth)
        if isinstance(a, CLam):
            i = next(depth)
            return go(a.body, b.body, {**ea, a.var: i}, {**eb, b.var: i}, depth)
        if isinstance(a, CApp):
            return go(a.fn, b.fn, ea, eb, depth) and go(a.arg, b.arg, ea, eb, depth)
        if isinstance(a, CCon):
            return a.ctor == b.ctor and go(a.arg, b.arg, ea, eb, depth)
        if isinstance(a, CRec):
            if not go(a.scrut, b.scrut, ea, eb, depth) or len(a.branches) != len(b.branches):
                return False
            for ba, bb in zip(a.branches, b.branches):
                if ba.ctor != bb.ctor:
                    return False
                i = next(depth)
                if not go(ba.body, bb.body, {**ea, ba.var: i}, {**eb, bb.var: i}, depth):
                    return False
            return True
        raise TypeError(a)

    return go(a, b, {}, {}, itertools.count())


# ---------------------------------------------------------------------------
# The cmap macro


def cmap_expand(phi: CFunctor, var: str, body: CExpr, target: CExpr) -> CExpr:
    """Expand map over a complexity functor as a macro (never a node)."""
    from .terms import fresh

    if isinstance(phi, CFSelf):
        return c_subst1(body, var, target)
    if isinstance(phi, CFConst):
        return target
    if isinstance(phi, CFProd):
        return CPair(
            cmap_expand(phi.left, var, body, CProj(0, target)),
            cmap_expand(phi.right, var, body, CProj(1, target)),
        )
    if isinstance(phi, CFArrow):
        y = fresh("y")
        return CLam(y, cmap_expand(phi.cod, var, body, CApp(target, CVar(y))))
    raise TypeError(phi)


# ---------------------------------------------------------------------------
# Typing (bidirectional, mirroring the source checker)


class CTypeError(Exception):
    pass


class CMeta(CType):
    """An inference metavariable (lambda binders, rec result types)."""

    _counter = itertools.count()

    def __init__(self):
        self.id = next(CMeta._counter)
        self.ref: Optional[CType] = None

    def __repr__(self) -> str:
        return f"?{self.id}"

    def __str__(self) -> str:
        return f"?{self.id}"


def _resolve(ty: CType) -> CType:
    while isinstance(ty, CMeta) and ty.ref is not None:
        ty = ty.ref
    return ty


def _zonk(ty: CType) -> CType:
    ty = _resolve(ty)
    if isinstance(ty, CProd):
        return CProd(_zonk(ty.left), _zonk(ty.right))
    if isinstance(ty, CArrow):
        return CArrow(_zonk(ty.dom), _zonk(ty.cod))
    return ty


def _has_meta(ty: CType) -> bool:
    ty = _resolve(ty)
    if isinstance(ty, CMeta):
        return True
    if isinstance(ty, CProd):
        return _has_meta(ty.left) or _has_meta(ty.right)
    if isinstance(ty, CArrow):
        return _has_meta(ty.dom) or _has_meta(ty.cod)
    return False


def _occurs(meta: "CMeta", ty: CType) -> bool:
    ty = _resolve(ty)
    if ty is meta:
        return True
    if isinstance(ty, CProd):
        return _occurs(meta, ty.left) or _occurs(meta, ty.right)
    if isinstance(ty, CArrow):
        return _occurs(meta, ty.dom) or _occurs(meta, ty.cod)
    return False


def _unify(a: CType, b: CType) -> None:
    a, b = _resolve(a), _resolve(b)
    if a is b:
        return
    if isinstance(a, CMeta):
        if _occurs(a, b):
            raise CTypeError(f"infinite type: {a} in {_zonk(b)}")
        a.ref = b
        return
    if isinstance(b, CMeta):
        _unify(b, a)
        return
    if isinstance(a, CProd) and isinstance(b, CProd):
        _unify(a.left, b.left)
        _unify(a.right, b.right)
        return
    if isinstance(a, CArrow) and isinstance(b, CArrow):
        _unify(a.dom, b.dom)
        _unify(a.cod, b.cod)
        return
    if a == b:
        return
    raise CTypeError(f"expected {_zonk(b)}, found {_zonk(a)}")


class CChecker:
    """Typechecking by local inference: lambda binders and rec result types
    become metavariables solved by unification, so translations of rec over
    higher-type results are still accepted without annotations."""

    def __init__(self, csig: CSignature):
        self.csig = csig

    def infer(self, ctx: dict[str, CType], e: CExpr) -> CType:
        if isinstance(e, CVar):
            if e.name not in ctx:
                raise CTypeError(f"unknown variable {e.name!r}")
            return ctx[e.name]
        if isinstance(e, CNum):
            return COST
        if isinstance(e, CPlus):
            _unify(self.infer(ctx, e.left), COST)
            _unify(self.infer(ctx, e.right), COST)
            return COST
        if isinstance(e, CUnitE):
            return CUNIT
        if isinstance(e, CPair):
            return CProd(self.infer(ctx, e.left), self.infer(ctx, e.right))
        if isinstance(e, CProj):
            body_ty = _resolve(self.infer(ctx, e.body))
            if not isinstance(body_ty, CProd):
                prod = CProd(CMeta(), CMeta())
                _unify(body_ty, prod)
                body_ty = prod
            return body_ty.left if e.index == 0 else body_ty.right
        if isinstance(e, CLam):
            dom = CMeta()
            cod = self.infer({**ctx, e.var: dom}, e.body)
            return CArrow(dom, cod)
        if isinstance(e, CApp):
            fn_ty = _resolve(self.infer(ctx, e.fn))
            if not isinstance(fn_ty, CArrow):
                arrow = CArrow(CMeta(), CMeta())
                _unify(fn_ty, arrow)
                fn_ty = arrow
            _unify(self.infer(ctx, e.arg), fn_ty.dom)
            return fn_ty.cod
        if isinstance(e, CCon):
            decl = self.csig.ctor_datatype(e.ctor)
            if decl is None:
                raise CTypeError(f"unknown constructor {e.ctor!r}")
            phi = decl.functor_of(e.ctor)
            _unify(self.infer(ctx, e.arg), cfunctor_subst(phi, CData(decl.name)))
            return CData(decl.name)
        if isinstance(e, CRec):
            decl = self._rec_decl(e)
            _unify(self.infer(ctx, e.scrut), CData(decl.name))
            result = CMeta()
            for b in e.branches:
                phi = decl.functor_of(b.ctor)
                var_ty = cfunctor_subst(phi, CProd(CData(decl.name), result))
                _unify(self.infer({**ctx, b.var: var_ty}, b.body), result)
            return result
        raise TypeError(e)

    def synth(self, ctx: dict[str, CType], e: CExpr) -> CType:
        ty = _zonk(self.infer(ctx, e))
        if _has_meta(ty):
            raise CTypeError(f"ambiguous type {ty}; no unique derivable type")
        return ty

    def check(self, ctx: dict[str, CType], e: CExpr, expected: CType) -> None:
        _unify(self.infer(ctx, e), expected)

    def _rec_decl(self, e: CRec) -> CDataDecl:
        if not e.branches:
            raise CTypeError("rec requires at least one branch")
        decl = self.csig.ctor_datatype(e.branches[0].ctor)
        if decl is None:
            raise CTypeError(f"unknown constructor {e.branches[0].ctor!r}")
        have = sorted(b.ctor for b in e.branches)
        want = sorted(name for name, _ in decl.ctors)
        if have != want:
            raise CTypeError(f"rec over {decl.name!r} needs branches {want}, found {have}")
        return decl


def ctypecheck(csig: CSignature, ctx, e: CExpr, expected: Optional[CType] = None) -> CType:
    if not isinstance(ctx, dict):
        ctx = dict(ctx)
    checker = CChecker(csig)
    if expected is not None:
        checker.check(ctx, e, expected)
        return expected
    return checker.synth(ctx, e)


# ---------------------------------------------------------------------------
# Surface syntax: printer and parser (stable golden-test format)


def _atom(e: CExpr) -> bool:
    return isinstance(e, (CVar, CNum, CUnitE, CPair, CCon, CRec))


def c_to_text(e: CExpr) -> str:
    if isinstance(e, CVar):
        return e.name
    if isinstance(e, CNum):
        return str(e.value)
    if isinstance(e, CUnitE):
        return "()"
    if isinstance(e, CPlus):
        return f"({c_to_text(e.left)} + {c_to_text(e.right)})"
    if isinstance(e, CPair):
        return f"({c_to_text(e.left)}, {c_to_text(e.right)})"
    if isinstance(e, CProj):
        op = "fst" if e.index == 0 else "snd"
        inner = c_to_text(e.body)
        return f"{op} {inner}" if _atom(e.body) else f"{op} ({inner})"
    if isinstance(e, CLam):
        return f"fn {e.var}. {c_to_text(e.body)}"
    if isinstance(e, CApp):
        fn = c_to_text(e.fn)
        arg = c_to_text(e.arg)
        if not isinstance(e.fn, (CVar, CApp, CProj)):
            fn = f"({fn})"
        if not _atom(e.arg):
            arg = f"({arg})"
        return f"{fn} {arg}"
    if isinstance(e, CCon):
        if isinstance(e.arg, CUnitE):
            return f"{e.ctor}()"
        return f"{e.ctor}({c_to_text(e.arg)})"
    if isinstance(e, CRec):
        branches = " | ".join(f"{b.ctor} -> {b.var}. {c_to_text(b.body)}" for b in e.branches)
        return f"rec({c_to_text(e.scrut)}; {branches})"
    raise TypeError(e)


_C_ATOM_START = {"lident", "()", "(", "uident", "rec", "number"}


class CParser(_sp.Parser):
    """Parser for the complexity surface syntax (shares the source tokenizer)."""

    def parse_cexpr(self) -> CExpr:
        left = self.parse_cterm()
        while self.at("+"):
            self.next()
            left = CPlus(left, self.parse_cterm())
        return left

    def parse_cterm(self) -> CExpr:
        t = self.peek()
        if t.kind == "fn":
            self.next()
            var = self.expect("lident").text
            self.expect(".")
            return CLam(var, self.parse_cexpr())
        e = self.parse_capp()
        return e

    def parse_capp(self) -> CExpr:
        e = self.parse_catom()
        while self.peek().kind in _C_ATOM_START:
            e = CApp(e, self.parse_catom())
        return e

    def parse_catom(self) -> CExpr:
        t = self.peek()
        if t.kind == "number":
            return CNum(int(self.next().text))
        if t.kind == "lident":
            if t.text in ("fst", "snd"):
                self.next()
                return CProj(0 if t.text == "fst" else 1, self.parse_catom())
            return CVar(self.next().text)
        if t.kind == "()":
            self.next()
            return CUnitE()
        if t.kind == "(":
            self.next()
            e = self.parse_cexpr()
            if self.at(","):
                self.next()
                right = self.parse_cexpr()
                self.expect(")")
                return CPair(e, right)
            self.expect(")")
            return e
        if t.kind == "uident":
            name = self.next().text
            if self.at("()"):
                self.next()
                return CCon(name, CUnitE())
            self.expect("(")
            if self.at(")"):
                self.next()
                return CCon(name, CUnitE())
            arg = self.parse_cexpr()
            if self.at(","):
                self.next()
                right = self.parse_cexpr()
                self.expect(")")
                return CCon(name, CPair(arg, right))
            self.expect(")")
            return CCon(name, arg)
        if t.kind == "rec":
            self.next()
            self.expect("(")
            scrut = self.parse_cexpr()
            self.expect(";")
            branches = [self.parse_cbranch()]
            while self.at("|"):
                self.next()
                branches.append(self.parse_cbranch())
            self.expect(")")
            return CRec(scrut, branches)
        self.fail("expected a complexity expression")

    def parse_cbranch(self) -> CBranch:
        ctor = self.expect("uident").text
        self.expect("->")
        var = self.expect("lident").text
        self.expect(".")
        return CBranch(ctor, var, self.parse_cexpr())


def c_parse_expr(text: str) -> CExpr:
    p = CParser(text)
    e = p.parse_cexpr()
    p.expect("eof")
    return e

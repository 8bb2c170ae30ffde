"""Deterministic random generation of well-typed closed source terms.

Generation is type-directed: `value` builds closed values, `checkable`
builds expressions accepted against an expected type, and `synthesizable`
builds (expression, type) pairs the bidirectional checker can infer — the
distinction matters because lambdas only check, and application heads and
let bindings must synthesize.
"""

from __future__ import annotations

import random

from costrec.terms import (
    App,
    Branch,
    Con,
    Delay,
    Expr,
    FArrow,
    FConst,
    FProd,
    FSelf,
    Force,
    Functor,
    Lam,
    Let,
    Map,
    Pair,
    Rec,
    Signature,
    Split,
    SourceType,
    TArrow,
    TData,
    TProd,
    TSusp,
    TUnit,
    UNIT,
    Unit,
    Var,
    fresh,
    functor_mentions_self,
    functor_subst,
)


class TermGen:
    def __init__(self, sig: Signature, seed: int = 0):
        self.sig = sig
        self.rng = random.Random(seed)
        self.datatypes = [
            d.name
            for d in sig.decls
            if not any(self._functor_has_self_arrow(phi) for _, phi in d.ctors)
        ]

    def _functor_has_self_arrow(self, phi: Functor) -> bool:
        if isinstance(phi, FProd):
            return self._functor_has_self_arrow(phi.left) or self._functor_has_self_arrow(
                phi.right
            )
        return isinstance(phi, FArrow) and functor_mentions_self(phi)

    # -- types

    def some_type(self, depth: int = 2) -> SourceType:
        choices = ["unit"]
        if self.datatypes:
            choices += ["data"] * 3
        if depth > 0:
            choices += ["prod", "susp", "arrow"]
        kind = self.rng.choice(choices)
        if kind == "unit":
            return UNIT
        if kind == "data":
            return TData(self.rng.choice(self.datatypes))
        if kind == "prod":
            return TProd(self.some_type(depth - 1), self.some_type(depth - 1))
        if kind == "susp":
            return TSusp(self.some_type(depth - 1))
        return TArrow(self.some_type(depth - 1), self.some_type(depth - 1))

    def first_order_type(self, depth: int = 2) -> SourceType:
        ty = self.some_type(depth)
        while isinstance(ty, TArrow):
            ty = self.some_type(depth)
        return ty

    # -- values

    def value(self, ty: SourceType, depth: int = 3) -> Expr:
        if isinstance(ty, TUnit):
            return Unit()
        if isinstance(ty, TProd):
            return Pair(self.value(ty.left, depth), self.value(ty.right, depth))
        if isinstance(ty, TSusp):
            return Delay(self.value(ty.body, depth))
        if isinstance(ty, TArrow):
            x = fresh("x")
            return Lam(x, self.checkable({x: ty.dom}, ty.cod, depth))
        if isinstance(ty, TData):
            decl = self.sig.decl(ty.name)
            ctors = decl.ctors
            if depth <= 0:
                base = [c for c in ctors if not functor_mentions_self(c[1])]
                ctors = base or ctors
            cname, phi = self.rng.choice(ctors)
            return Con(cname, self._functor_value(ty.name, phi, depth - 1))
        raise TypeError(ty)

    def _functor_value(self, datatype: str, phi: Functor, depth: int) -> Expr:
        if isinstance(phi, FSelf):
            return self.value(TData(datatype), depth)
        if isinstance(phi, FConst):
            return self.value(phi.ty, depth)
        if isinstance(phi, FProd):
            return Pair(
                self._functor_value(datatype, phi.left, depth),
                self._functor_value(datatype, phi.right, depth),
            )
        if isinstance(phi, FArrow):
            x = fresh("x")
            return Lam(x, self._functor_value(datatype, phi.cod, depth))
        raise TypeError(phi)

    # -- expressions

    def synthesizable(self, ctx: dict[str, SourceType], depth: int) -> tuple[Expr, SourceType]:
        """An (expression, type) pair the checker can infer bottom-up."""
        options = ["unit", "value"]
        if ctx:
            options += ["var"] * 3
        if depth > 0:
            options += ["pair", "con", "delay"]
            if any(isinstance(t, TArrow) for t in ctx.values()):
                options += ["app"] * 2
            if any(isinstance(t, TSusp) for t in ctx.values()):
                options += ["force"]
            if any(isinstance(t, TProd) for t in ctx.values()):
                options += ["split"]
        kind = self.rng.choice(options)
        if kind == "unit":
            return Unit(), UNIT
        if kind == "value" or (kind == "con" and not self.datatypes):
            ty = self.first_order_type(1)
            return self.value(ty, depth), ty
        if kind == "var":
            name = self.rng.choice(sorted(ctx))
            return Var(name), ctx[name]
        if kind == "pair":
            left, lty = self.synthesizable(ctx, depth - 1)
            right, rty = self.synthesizable(ctx, depth - 1)
            return Pair(left, right), TProd(lty, rty)
        if kind == "con":
            dt = self.rng.choice(self.datatypes)
            decl = self.sig.decl(dt)
            cname, phi = self.rng.choice(decl.ctors)
            arg = self.checkable(ctx, functor_subst(phi, TData(dt)), depth - 1)
            return Con(cname, arg), TData(dt)
        if kind == "delay":
            body, ty = self.synthesizable(ctx, depth - 1)
            return Delay(body), TSusp(ty)
        if kind == "app":
            fns = [(n, t) for n, t in sorted(ctx.items()) if isinstance(t, TArrow)]
            name, fty = self.rng.choice(fns)
            arg = self.checkable(ctx, fty.dom, depth - 1)
            return App(Var(name), arg), fty.cod
        if kind == "force":
            susps = [(n, t) for n, t in sorted(ctx.items()) if isinstance(t, TSusp)]
            name, sty = self.rng.choice(susps)
            return Force(Var(name)), sty.body
        if kind == "split":
            pairs = [(n, t) for n, t in sorted(ctx.items()) if isinstance(t, TProd)]
            name, pty = self.rng.choice(pairs)
            x0, x1 = fresh("a"), fresh("b")
            inner = {**ctx, x0: pty.left, x1: pty.right}
            body, bty = self.synthesizable(inner, depth - 1)
            return Split(Var(name), x0, x1, body), bty
        raise AssertionError(kind)

    def checkable(self, ctx: dict[str, SourceType], ty: SourceType, depth: int) -> Expr:
        """An expression accepted when checked against the type."""
        matching = [n for n, t in ctx.items() if t == ty]
        options = ["intro"] * 3
        if matching:
            options += ["var"] * 2
        if depth > 0:
            options += ["let", "rec"]
        kind = self.rng.choice(options)
        if kind == "var":
            return Var(self.rng.choice(sorted(matching)))
        if kind == "let":
            bound, bty = self.synthesizable(ctx, depth - 1)
            x = fresh("v")
            return Let(bound, x, self.checkable({**ctx, x: bty}, ty, depth - 1))
        if kind == "rec" and self.datatypes:
            dt = self.rng.choice(self.datatypes)
            decl = self.sig.decl(dt)
            scrut = self.checkable(ctx, TData(dt), depth - 1)
            branches = []
            for cname, phi in decl.ctors:
                var = fresh("z")
                vty = functor_subst(phi, TProd(TData(dt), TSusp(ty)))
                body = self.checkable({**ctx, var: vty}, ty, depth - 1)
                branches.append(Branch(cname, var, body))
            return Rec(scrut, branches)
        # intro form for the expected type
        if isinstance(ty, TUnit):
            return Unit()
        if isinstance(ty, TProd):
            return Pair(
                self.checkable(ctx, ty.left, depth - 1),
                self.checkable(ctx, ty.right, depth - 1),
            )
        if isinstance(ty, TSusp):
            return Delay(self.checkable(ctx, ty.body, depth - 1))
        if isinstance(ty, TArrow):
            x = fresh("x")
            return Lam(x, self.checkable({**ctx, x: ty.dom}, ty.cod, depth - 1))
        if isinstance(ty, TData):
            decl = self.sig.decl(ty.name)
            ctors = decl.ctors
            if depth <= 0:
                base = [c for c in ctors if not functor_mentions_self(c[1])]
                ctors = base or ctors
            cname, phi = self.rng.choice(ctors)
            arg = self.checkable(ctx, functor_subst(phi, TData(ty.name)), max(depth - 1, 0))
            return Con(cname, arg)
        raise TypeError(ty)

    def closed(self, depth: int = 3) -> tuple[Expr, SourceType]:
        """A closed well-typed expression with its (expected) type."""
        ty = self.some_type(2)
        return self.checkable({}, ty, depth), ty

    def lambdaless_type(self, depth: int = 1) -> SourceType:
        """A type whose values synthesize (no arrows, hence no lambdas)."""
        choices = ["unit"]
        if self.datatypes:
            choices += ["data"] * 3
        if depth > 0:
            choices += ["prod", "susp"]
        kind = self.rng.choice(choices)
        if kind == "unit":
            return UNIT
        if kind == "data":
            return TData(self.rng.choice(self.datatypes))
        if kind == "prod":
            return TProd(self.lambdaless_type(depth - 1), self.lambdaless_type(depth - 1))
        return TSusp(self.lambdaless_type(depth - 1))

    def map_instance(self, depth: int = 2) -> tuple[Map, SourceType, SourceType]:
        """A closed map[φ](x. v; t) with its source and target label types.

        Targets must synthesize, so arrow positions (whose values are
        lambdas) are excluded here; the arrow evaluation rule is covered by
        direct operational tests.
        """
        sigma = self.lambdaless_type(1)
        tau = self.lambdaless_type(1)
        phi = self._map_functor(depth)
        x = fresh("x")
        vbody = self._value_form(sigma, tau, x, depth)
        target = self.value(functor_subst(phi, sigma), depth)
        return Map(phi, x, vbody, target), sigma, tau

    def _map_functor(self, depth: int) -> Functor:
        choices = ["self", "const"]
        if depth > 0:
            choices += ["prod"]
        kind = self.rng.choice(choices)
        if kind == "self":
            return FSelf()
        if kind == "const":
            return FConst(self.lambdaless_type(1))
        return FProd(self._map_functor(depth - 1), self._map_functor(depth - 1))

    def _value_form(self, sigma: SourceType, tau: SourceType, var: str, depth: int) -> Expr:
        """A value form of type tau that may mention the binder."""
        if sigma == tau and self.rng.random() < 0.5:
            return Var(var)
        if isinstance(tau, TProd):
            return Pair(
                self._value_form(sigma, tau.left, var, depth),
                self._value_form(sigma, tau.right, var, depth),
            )
        return self.value(tau, depth)

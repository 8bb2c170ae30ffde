"""Signature well-formedness and bidirectional typing for the source language."""

from __future__ import annotations

from typing import Optional

from .terms import (
    App,
    Con,
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
    UNIT,
    Unit,
    Var,
    functor_mentions_self,
    functor_subst,
    is_value_form,
)


class TypeCheckError(Exception):
    pass


def _type_datatypes(ty: SourceType) -> set[str]:
    if isinstance(ty, TData):
        return {ty.name}
    if isinstance(ty, TProd):
        return _type_datatypes(ty.left) | _type_datatypes(ty.right)
    if isinstance(ty, TArrow):
        return _type_datatypes(ty.dom) | _type_datatypes(ty.cod)
    if isinstance(ty, TSusp):
        return _type_datatypes(ty.body)
    return set()


def _functor_const_datatypes(phi: Functor) -> set[str]:
    if isinstance(phi, FSelf):
        return set()
    if isinstance(phi, FConst):
        return _type_datatypes(phi.ty)
    if isinstance(phi, FProd):
        return _functor_const_datatypes(phi.left) | _functor_const_datatypes(phi.right)
    if isinstance(phi, FArrow):
        return _type_datatypes(phi.dom) | _functor_const_datatypes(phi.cod)
    raise TypeError(phi)


def wf_signature(sig: Signature) -> list[str]:
    """Check signature well-formedness; returns a list of violations (empty = ok).

    Each datatype may mention only strictly earlier datatypes in constant
    positions and arrow domains; the recursive slot is only `self`.
    """
    violations: list[str] = []
    seen_datatypes: set[str] = set()
    seen_ctors: set[str] = set()
    for decl in sig.decls:
        if decl.name in seen_datatypes:
            violations.append(f"duplicate datatype {decl.name!r}")
        for cname, phi in decl.ctors:
            if cname in seen_ctors:
                violations.append(f"duplicate constructor {cname!r}")
            seen_ctors.add(cname)
            for ref in sorted(_functor_const_datatypes(phi)):
                if ref == decl.name:
                    violations.append(
                        f"constructor {cname!r}: self-reference to {ref!r} "
                        "outside the recursive slot"
                    )
                elif ref not in seen_datatypes:
                    violations.append(f"constructor {cname!r}: forward reference to {ref!r}")
        seen_datatypes.add(decl.name)
    return violations


def wf_type(sig: Signature, ty: SourceType) -> None:
    for name in sorted(_type_datatypes(ty)):
        if not sig.has_datatype(name):
            raise TypeCheckError(f"unknown datatype {name!r} in type {ty}")


def _branch_var_type(phi: Functor, delta: str, result: SourceType) -> SourceType:
    """The rec branch variable's type: the functor applied to δ × susp τ."""
    return functor_subst(phi, TProd(TData(delta), TSusp(result)))


class Checker:
    def __init__(self, sig: Signature):
        self.sig = sig

    def synth(self, ctx: dict[str, SourceType], e: Expr) -> SourceType:
        if isinstance(e, Var):
            if e.name not in ctx:
                raise TypeCheckError(f"unknown variable {e.name!r}")
            return ctx[e.name]
        if isinstance(e, Unit):
            return UNIT
        if isinstance(e, Pair):
            return TProd(self.synth(ctx, e.left), self.synth(ctx, e.right))
        if isinstance(e, Split):
            scrut_ty = self.synth(ctx, e.scrut)
            if not isinstance(scrut_ty, TProd):
                raise TypeCheckError(f"split scrutinee has non-product type {scrut_ty}")
            return self.synth({**ctx, e.x0: scrut_ty.left, e.x1: scrut_ty.right}, e.body)
        if isinstance(e, Lam):
            raise TypeCheckError("cannot synthesize a type for a lambda; add an annotation")
        if isinstance(e, App):
            fn_ty = self.synth(ctx, e.fn)
            if not isinstance(fn_ty, TArrow):
                raise TypeCheckError(f"applying a non-function of type {fn_ty}")
            self.check(ctx, e.arg, fn_ty.dom)
            return fn_ty.cod
        if isinstance(e, Delay):
            return TSusp(self.synth(ctx, e.body))
        if isinstance(e, Force):
            body_ty = self.synth(ctx, e.body)
            if not isinstance(body_ty, TSusp):
                raise TypeCheckError(f"forcing a non-suspension of type {body_ty}")
            return body_ty.body
        if isinstance(e, Con):
            decl = self.sig.ctor_datatype(e.ctor)
            if decl is None:
                raise TypeCheckError(f"unknown constructor {e.ctor!r}")
            phi = decl.functor_of(e.ctor)
            self.check(ctx, e.arg, functor_subst(phi, TData(decl.name)))
            return TData(decl.name)
        if isinstance(e, Rec):
            return self._synth_rec(ctx, e)
        if isinstance(e, Map):
            return self._synth_map(ctx, e)
        if isinstance(e, Let):
            bound_ty = self.synth(ctx, e.bound)
            return self.synth({**ctx, e.var: bound_ty}, e.body)
        raise TypeError(e)

    def check(self, ctx: dict[str, SourceType], e: Expr, expected: SourceType) -> None:
        if isinstance(e, Lam):
            if not isinstance(expected, TArrow):
                raise TypeCheckError(f"lambda checked against non-arrow type {expected}")
            self.check({**ctx, e.var: expected.dom}, e.body, expected.cod)
            return
        if isinstance(e, Pair) and isinstance(expected, TProd):
            self.check(ctx, e.left, expected.left)
            self.check(ctx, e.right, expected.right)
            return
        if isinstance(e, Delay) and isinstance(expected, TSusp):
            self.check(ctx, e.body, expected.body)
            return
        if isinstance(e, Split):
            scrut_ty = self.synth(ctx, e.scrut)
            if not isinstance(scrut_ty, TProd):
                raise TypeCheckError(f"split scrutinee has non-product type {scrut_ty}")
            self.check({**ctx, e.x0: scrut_ty.left, e.x1: scrut_ty.right}, e.body, expected)
            return
        if isinstance(e, Let):
            bound_ty = self.synth(ctx, e.bound)
            self.check({**ctx, e.var: bound_ty}, e.body, expected)
            return
        if isinstance(e, Rec):
            delta, decl = self._rec_scrutinee(ctx, e)
            for b in e.branches:
                phi = decl.functor_of(b.ctor)
                self.check({**ctx, b.var: _branch_var_type(phi, delta, expected)}, b.body, expected)
            return
        actual = self.synth(ctx, e)
        if actual != expected:
            raise TypeCheckError(f"expected {expected}, found {actual}")

    # -- rec and map

    def _rec_scrutinee(self, ctx, e: Rec):
        scrut_ty = self.synth(ctx, e.scrut)
        if not isinstance(scrut_ty, TData):
            raise TypeCheckError(f"rec scrutinee has non-datatype type {scrut_ty}")
        decl = self.sig.decl(scrut_ty.name)
        have = [b.ctor for b in e.branches]
        want = [name for name, _ in decl.ctors]
        if sorted(have) != sorted(want):
            raise TypeCheckError(
                f"rec over {decl.name!r} needs one branch per constructor "
                f"{want}, found {have}"
            )
        return scrut_ty.name, decl

    def _synth_rec(self, ctx, e: Rec) -> SourceType:
        """Synthesize via a branch whose functor ignores the recursive slot."""
        delta, decl = self._rec_scrutinee(ctx, e)
        result: Optional[SourceType] = None
        for b in e.branches:
            phi = decl.functor_of(b.ctor)
            if not functor_mentions_self(phi):
                result = self.synth({**ctx, b.var: functor_subst(phi, UNIT)}, b.body)
                break
        if result is None:
            raise TypeCheckError(
                f"cannot synthesize the result type of rec over {delta!r}; "
                "use it in checking position or annotate the enclosing def"
            )
        self.check(ctx, e, result)
        return result

    def _synth_map(self, ctx, e: Map) -> SourceType:
        if not is_value_form(e.vbody):
            raise TypeCheckError("map binder body must be a value or variable")
        if not is_value_form(e.target):
            raise TypeCheckError("map target must be a value or variable")
        target_ty = self.synth(ctx, e.target)
        slot = self._match_functor(e.functor, target_ty)
        src = slot if slot is not None else UNIT
        out = self.synth({**ctx, e.var: src}, e.vbody)
        return functor_subst(e.functor, out)

    def _match_functor(self, phi: Functor, ty: SourceType) -> Optional[SourceType]:
        """Solve φ[σ] = ty for σ; None when φ has no recursive slot."""
        if isinstance(phi, FSelf):
            return ty
        if isinstance(phi, FConst):
            if phi.ty != ty:
                raise TypeCheckError(f"map target type {ty} does not match functor {phi}")
            return None
        if isinstance(phi, FProd):
            if not isinstance(ty, TProd):
                raise TypeCheckError(f"map target type {ty} does not match functor {phi}")
            l = self._match_functor(phi.left, ty.left)
            r = self._match_functor(phi.right, ty.right)
            if l is not None and r is not None and l != r:
                raise TypeCheckError(f"inconsistent recursive-slot types {l} and {r} in map")
            return l if l is not None else r
        if isinstance(phi, FArrow):
            if not isinstance(ty, TArrow) or ty.dom != phi.dom:
                raise TypeCheckError(f"map target type {ty} does not match functor {phi}")
            return self._match_functor(phi.cod, ty.cod)
        raise TypeError(phi)


def typecheck(sig: Signature, ctx, e: Expr, expected: Optional[SourceType] = None) -> SourceType:
    """Type an expression; ctx may be a dict or an ordered (name, type) list."""
    if not isinstance(ctx, dict):
        ctx = dict(ctx)
    checker = Checker(sig)
    if expected is not None:
        checker.check(ctx, e, expected)
        return expected
    return checker.synth(ctx, e)


def typecheck_program(program: Program) -> dict[str, SourceType]:
    """Check every def in order; returns the type of each. Raises on errors."""
    violations = wf_signature(program.signature)
    if violations:
        raise TypeCheckError("; ".join(violations))
    checker = Checker(program.signature)
    ctx: dict[str, SourceType] = {}
    out: dict[str, SourceType] = {}
    for d in program.defs:
        if d.annot is not None:
            wf_type(program.signature, d.annot)
            try:
                checker.check(ctx, d.body, d.annot)
            except TypeCheckError as exc:
                raise TypeCheckError(f"in def {d.name!r}: {exc}") from None
            ty = d.annot
        else:
            try:
                ty = checker.synth(ctx, d.body)
            except TypeCheckError as exc:
                raise TypeCheckError(f"in def {d.name!r}: {exc}") from None
        ctx[d.name] = ty
        out[d.name] = ty
    return out


def type_of_expr(program: Program, e: Expr, expected: Optional[SourceType] = None) -> SourceType:
    """Type an expression in the context of a program's defs."""
    ctx = typecheck_program(program)
    return typecheck(program.signature, ctx, e, expected)

"""The cost-explicit translation from source to complexity language.

A source term of type τ becomes a complexity term of type C × ⟨⟨τ⟩⟩: a cost
paired with a potential.  Costs accumulate writer-monad style — variables,
lambdas, and delays are free; applications and rec unfoldings charge one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexity import (
    CApp,
    CArrow,
    CBranch,
    CCon,
    CData,
    CDataDecl,
    CExpr,
    CFArrow,
    CFConst,
    CFProd,
    CFSelf,
    CFunctor,
    CLam,
    CNum,
    CPair,
    CPlus,
    CProd,
    CProj,
    CRec,
    CSignature,
    CType,
    CUNIT,
    CUnitE,
    CVar,
    COST,
    c_subst1,
    cmap_expand,
)
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
    Unit,
    Var,
    fresh,
)


def potential_type(ty: SourceType) -> CType:
    """⟨⟨τ⟩⟩: the potential part of a source type's translation."""
    if isinstance(ty, TUnit):
        return CUNIT
    if isinstance(ty, TProd):
        return CProd(potential_type(ty.left), potential_type(ty.right))
    if isinstance(ty, TArrow):
        return CArrow(potential_type(ty.dom), complexity_type(ty.cod))
    if isinstance(ty, TSusp):
        return complexity_type(ty.body)
    if isinstance(ty, TData):
        return CData(ty.name)
    raise TypeError(ty)


def complexity_type(ty: SourceType) -> CType:
    """‖τ‖ = C × ⟨⟨τ⟩⟩."""
    return CProd(COST, potential_type(ty))


def translate_type(ty: SourceType) -> tuple[CType, CType]:
    pot = potential_type(ty)
    return CProd(COST, pot), pot


def translate_functor(phi: Functor) -> CFunctor:
    if isinstance(phi, FSelf):
        return CFSelf()
    if isinstance(phi, FConst):
        return CFConst(potential_type(phi.ty))
    if isinstance(phi, FProd):
        return CFProd(translate_functor(phi.left), translate_functor(phi.right))
    if isinstance(phi, FArrow):
        return CFArrow(
            potential_type(phi.dom),
            CFProd(CFConst(COST), translate_functor(phi.cod)),
        )
    raise TypeError(phi)


def translate_sig(sig: Signature) -> CSignature:
    return CSignature(
        [
            CDataDecl(d.name, [(name, translate_functor(phi)) for name, phi in d.ctors])
            for d in sig.decls
        ]
    )


# -- helpers on complexity pairs


def cost_of(e: CExpr) -> CExpr:
    """E_c: first projection, simplified when E is a literal pair."""
    if isinstance(e, CPair):
        return e.left
    return CProj(0, e)


def pot_of(e: CExpr) -> CExpr:
    """E_p: second projection, simplified when E is a literal pair."""
    if isinstance(e, CPair):
        return e.right
    return CProj(1, e)


def cplus(c: CExpr, e: CExpr) -> CExpr:
    """c +_c E = ⟨c + E_c, E_p⟩."""
    return CPair(CPlus(c, cost_of(e)), pot_of(e))


def translate_expr(sig: Signature, e: Expr) -> CExpr:
    """⟦e⟧: syntax-directed, no simplification (that lives in normalize)."""
    if isinstance(e, Var):
        return CPair(CNum(0), CVar(e.name))
    if isinstance(e, Unit):
        return CPair(CNum(0), CUnitE())
    if isinstance(e, Pair):
        t0 = translate_expr(sig, e.left)
        t1 = translate_expr(sig, e.right)
        return CPair(CPlus(cost_of(t0), cost_of(t1)), CPair(pot_of(t0), pot_of(t1)))
    if isinstance(e, Split):
        t0 = translate_expr(sig, e.scrut)
        t1 = translate_expr(sig, e.body)
        body = c_subst1(c_subst1(t1, e.x0, CProj(0, pot_of(t0))), e.x1, CProj(1, pot_of(t0)))
        return cplus(cost_of(t0), body)
    if isinstance(e, Lam):
        return CPair(CNum(0), CLam(e.var, translate_expr(sig, e.body)))
    if isinstance(e, App):
        t0 = translate_expr(sig, e.fn)
        t1 = translate_expr(sig, e.arg)
        charge = CPlus(CNum(1), CPlus(cost_of(t0), cost_of(t1)))
        return cplus(charge, CApp(pot_of(t0), pot_of(t1)))
    if isinstance(e, Delay):
        return CPair(CNum(0), translate_expr(sig, e.body))
    if isinstance(e, Force):
        t = translate_expr(sig, e.body)
        return cplus(cost_of(t), pot_of(t))
    if isinstance(e, Con):
        t = translate_expr(sig, e.arg)
        return CPair(cost_of(t), CCon(e.ctor, pot_of(t)))
    if isinstance(e, Rec):
        t = translate_expr(sig, e.scrut)
        branches = [
            CBranch(b.ctor, b.var, cplus(CNum(1), translate_expr(sig, b.body)))
            for b in e.branches
        ]
        return cplus(cost_of(t), CRec(pot_of(t), branches))
    if isinstance(e, Map):
        cphi = translate_functor(e.functor)
        body_pot = pot_of(translate_expr(sig, e.vbody))
        target_pot = pot_of(translate_expr(sig, e.target))
        return CPair(CNum(0), cmap_expand(cphi, e.var, body_pot, target_pot))
    if isinstance(e, Let):
        t0 = translate_expr(sig, e.bound)
        t1 = translate_expr(sig, e.body)
        return cplus(cost_of(t0), c_subst1(t1, e.var, pot_of(t0)))
    raise TypeError(e)


@dataclass
class TranslationOutput:
    cexpr: CExpr
    ctype: CType


def translate(program: Program, e: Expr, ty: SourceType) -> TranslationOutput:
    """Translate a closed expression of the given type (defs not inlined here)."""
    return TranslationOutput(translate_expr(program.signature, e), complexity_type(ty))

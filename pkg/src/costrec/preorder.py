"""The complexity-language preorder: exact-cost normalization and a
conservative derivability checker.

The step rules (beta for functions and pairs, rec unrolling) are
inequalities — a redex bounds its reduct.  `normalize` reads them
symmetrically as rewrites, which on translations of closed source programs
produces a literal cost numeral.  `leq` keeps them one-directional and
searches for a derivation through the congruence contexts (projections,
application head, rec scrutinee, and both sides of +), optionally extended
with per-datatype length-quotient axioms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .complexity import (
    CApp,
    CCon,
    CExpr,
    CFConst,
    CFProd,
    CFSelf,
    CFunctor,
    CLam,
    CNum,
    CPair,
    CPlus,
    CProj,
    CRec,
    CSignature,
    CUnitE,
    CVar,
    c_alpha_eq,
    c_subst1,
    cmap_expand,
)
from .terms import fresh


class NormalizeError(Exception):
    pass


DEFAULT_NORMALIZE_FUEL = 200_000


# ---------------------------------------------------------------------------
# Monoid canonicalization (unit and associativity laws for +)


def _flatten_plus(e: CExpr, out: list[CExpr]) -> None:
    if isinstance(e, CPlus):
        _flatten_plus(e.left, out)
        _flatten_plus(e.right, out)
    else:
        out.append(e)


def monoid_nf(e: CExpr) -> CExpr:
    """Canonicalize a + spine: flatten, drop zeros, fold adjacent numerals."""
    terms: list[CExpr] = []
    _flatten_plus(e, terms)
    folded: list[CExpr] = []
    for t in terms:
        if isinstance(t, CNum) and t.value == 0:
            continue
        if isinstance(t, CNum) and folded and isinstance(folded[-1], CNum):
            folded[-1] = CNum(folded[-1].value + t.value)
        else:
            folded.append(t)
    if not folded:
        return CNum(0)
    out = folded[-1]
    for t in reversed(folded[:-1]):
        out = CPlus(t, out)
    return out


def monoid_nf_deep(e: CExpr) -> CExpr:
    if isinstance(e, (CVar, CNum, CUnitE)):
        return e
    if isinstance(e, CPlus):
        return monoid_nf(CPlus(monoid_nf_deep(e.left), monoid_nf_deep(e.right)))
    if isinstance(e, CPair):
        return CPair(monoid_nf_deep(e.left), monoid_nf_deep(e.right))
    if isinstance(e, CProj):
        return CProj(e.index, monoid_nf_deep(e.body))
    if isinstance(e, CLam):
        return CLam(e.var, monoid_nf_deep(e.body))
    if isinstance(e, CApp):
        return CApp(monoid_nf_deep(e.fn), monoid_nf_deep(e.arg))
    if isinstance(e, CCon):
        return CCon(e.ctor, monoid_nf_deep(e.arg))
    if isinstance(e, CRec):
        branches = [type(b)(b.ctor, b.var, monoid_nf_deep(b.body)) for b in e.branches]
        return CRec(monoid_nf_deep(e.scrut), branches)
    raise TypeError(e)


# ---------------------------------------------------------------------------
# Normalization


def _unroll_rec(csig: CSignature, e: CRec, scrut: CCon) -> CExpr:
    decl = csig.ctor_datatype(scrut.ctor)
    if decl is None:
        raise NormalizeError(f"unknown constructor {scrut.ctor!r}")
    phi = decl.functor_of(scrut.ctor)
    branch = e.branch_for(scrut.ctor)
    y = fresh("y")
    wrapped = CPair(CVar(y), CRec(CVar(y), e.branches))
    mapped = cmap_expand(phi, y, wrapped, scrut.arg)
    return c_subst1(branch.body, branch.var, mapped)


def normalize(csig: CSignature, e: CExpr, fuel: int = DEFAULT_NORMALIZE_FUEL) -> CExpr:
    """Exhaustive reduction; deterministic normal form with canonical + spines."""
    budget = [fuel]

    def spend() -> None:
        budget[0] -= 1
        if budget[0] < 0:
            raise NormalizeError("normalization fuel exhausted")

    def norm(e: CExpr) -> CExpr:
        spend()
        if isinstance(e, (CVar, CNum, CUnitE)):
            return e
        if isinstance(e, CPlus):
            return monoid_nf(CPlus(norm(e.left), norm(e.right)))
        if isinstance(e, CPair):
            return CPair(norm(e.left), norm(e.right))
        if isinstance(e, CProj):
            # reduce the projection before descending into the dropped half
            if isinstance(e.body, CPair):
                return norm(e.body.left if e.index == 0 else e.body.right)
            body = norm(e.body)
            if isinstance(body, CPair):
                return body.left if e.index == 0 else body.right
            return CProj(e.index, body)
        if isinstance(e, CLam):
            return CLam(e.var, norm(e.body))
        if isinstance(e, CApp):
            if isinstance(e.fn, CLam):
                return norm(c_subst1(e.fn.body, e.fn.var, norm(e.arg)))
            fn = norm(e.fn)
            arg = norm(e.arg)
            if isinstance(fn, CLam):
                return norm(c_subst1(fn.body, fn.var, arg))
            return CApp(fn, arg)
        if isinstance(e, CCon):
            return CCon(e.ctor, norm(e.arg))
        if isinstance(e, CRec):
            if isinstance(e.scrut, CCon):
                return norm(_unroll_rec(csig, e, e.scrut))
            scrut = norm(e.scrut)
            if isinstance(scrut, CCon):
                return norm(_unroll_rec(csig, CRec(scrut, e.branches), scrut))
            branches = [type(b)(b.ctor, b.var, norm(b.body)) for b in e.branches]
            return CRec(scrut, branches)
        raise TypeError(e)

    return norm(e)


def cost_literal(e: CExpr) -> Optional[int]:
    """The numeral in a normalized complexity pair's cost slot, if literal."""
    if isinstance(e, CPair) and isinstance(e.left, CNum):
        return e.left.value
    if isinstance(e, CNum):
        return e.value
    return None


# ---------------------------------------------------------------------------
# Derivability


@dataclass
class AxiomSet:
    """Datatypes quotiented to lengths (E ≤ Cons(_, E); Cons-label equation;
    congruence extended with Cons(x, C))."""

    length_quotient: set[str] = field(default_factory=set)

    @staticmethod
    def from_table(table) -> "AxiomSet":
        return AxiomSet({dt for dt, kind in table.axioms.items() if kind == "length-quotient"})


def _clist_shape(decl) -> Optional[tuple[str, str]]:
    from .complexity import cfunctor_mentions_self

    def arity(phi: CFunctor) -> int:
        if isinstance(phi, CFSelf):
            return 1
        if isinstance(phi, CFConst):
            return 0
        if isinstance(phi, CFProd):
            return arity(phi.left) + arity(phi.right)
        return 1 if cfunctor_mentions_self(phi) else 0

    nil = cons = None
    for cname, phi in decl.ctors:
        a = arity(phi)
        if a == 0 and nil is None:
            nil = cname
        elif a == 1 and cons is None:
            cons = cname
        else:
            return None
    if nil is None or cons is None:
        return None
    return nil, cons


def _cons_parts(csig: CSignature, axioms: AxiomSet, e: CExpr):
    """(label, tail, rebuild) when e is a cons of a quotiented datatype."""
    if not isinstance(e, CCon):
        return None
    decl = csig.ctor_datatype(e.ctor)
    if decl is None or decl.name not in axioms.length_quotient:
        return None
    shape = _clist_shape(decl)
    if shape is None or e.ctor != shape[1]:
        return None
    phi = decl.functor_of(e.ctor)

    # locate the single recursive slot within literal pair structure
    def find(phi: CFunctor, arg: CExpr) -> Optional[CExpr]:
        if isinstance(phi, CFSelf):
            return arg
        if isinstance(phi, CFProd) and isinstance(arg, CPair):
            found = find(phi.left, arg.left)
            return found if found is not None else find(phi.right, arg.right)
        return None

    return find(phi, e.arg)


def leq(
    csig: CSignature,
    axioms: AxiomSet,
    left: CExpr,
    right: CExpr,
    depth: int = 64,
) -> bool:
    """Sound, incomplete: True means derivable; False means not derived."""
    seen: set[tuple[str, str]] = set()

    def derive(a: CExpr, b: CExpr, depth: int) -> bool:
        from .complexity import c_to_text

        a = monoid_nf_deep(a)
        b = monoid_nf_deep(b)
        if c_alpha_eq(a, b):
            return True
        if depth <= 0:
            return False
        key = (c_to_text(a), c_to_text(b))
        if key in seen:
            return False
        seen.add(key)

        # step rules on the right: a ≤ reduct ≤ redex = b
        for reduct in _head_reducts(csig, b):
            if derive(a, reduct, depth - 1):
                return True

        # length-quotient axioms
        tail = _cons_parts(csig, axioms, b)
        if tail is not None:
            # a ≤ tail ≤ Cons(_, tail) = b
            if derive(a, tail, depth - 1):
                return True
            a_tail = _cons_parts(csig, axioms, a)
            if a_tail is not None and isinstance(a, CCon) and isinstance(b, CCon):
                # equate labels, then congruence Cons(x, C)
                if derive(a_tail, tail, depth - 1):
                    return True

        # congruence decomposition along matching heads
        if isinstance(a, CProj) and isinstance(b, CProj) and a.index == b.index:
            if derive(a.body, b.body, depth - 1):
                return True
        if isinstance(a, CApp) and isinstance(b, CApp) and c_alpha_eq(a.arg, b.arg):
            if derive(a.fn, b.fn, depth - 1):
                return True
        if isinstance(a, CRec) and isinstance(b, CRec) and _same_branches(a, b):
            if derive(a.scrut, b.scrut, depth - 1):
                return True
        if isinstance(a, CPlus) and isinstance(b, CPlus):
            if derive(a.left, b.left, depth - 1) and derive(a.right, b.right, depth - 1):
                return True
        return False

    return derive(left, right, depth)


def _same_branches(a: CRec, b: CRec) -> bool:
    if len(a.branches) != len(b.branches):
        return False
    return all(
        ba.ctor == bb.ctor
        and c_alpha_eq(CLam(ba.var, ba.body), CLam(bb.var, bb.body))
        for ba, bb in zip(a.branches, b.branches)
    )


def _head_reducts(csig: CSignature, e: CExpr) -> list[CExpr]:
    """One-step reducts of e reachable through congruence contexts."""
    out: list[CExpr] = []
    if isinstance(e, CApp):
        if isinstance(e.fn, CLam):
            out.append(c_subst1(e.fn.body, e.fn.var, e.arg))
        out.extend(CApp(fn, e.arg) for fn in _head_reducts(csig, e.fn))
    elif isinstance(e, CProj):
        if isinstance(e.body, CPair):
            out.append(e.body.left if e.index == 0 else e.body.right)
        out.extend(CProj(e.index, body) for body in _head_reducts(csig, e.body))
    elif isinstance(e, CRec):
        if isinstance(e.scrut, CCon):
            out.append(_unroll_rec(csig, e, e.scrut))
        out.extend(CRec(scrut, e.branches) for scrut in _head_reducts(csig, e.scrut))
    elif isinstance(e, CPlus):
        out.extend(CPlus(left, e.right) for left in _head_reducts(csig, e.left))
        out.extend(CPlus(e.left, right) for right in _head_reducts(csig, e.right))
    return out

"""Big-step operational semantics with step counting.

Cost accounting: 1 per function application, 1 per rec unfolding, 0 for
everything else.  Suspensions are values — delay never evaluates its body —
and map is total with cost 0.
"""

from __future__ import annotations

from dataclasses import dataclass
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
    Rec,
    Signature,
    Split,
    Unit,
    Var,
    fresh,
    subst1,
)

DEFAULT_FUEL = 10_000_000


class EvalError(Exception):
    pass


class StuckError(EvalError):
    pass


class FuelExhausted(EvalError):
    pass


@dataclass
class EvalResult:
    value: Expr
    cost: int
    trace: Optional[list[tuple[str, int]]] = None


@dataclass
class _State:
    fuel: int
    trace: Optional[list[tuple[str, int]]] = None

    def tick(self, rule: str, delta: int) -> None:
        self.fuel -= 1
        if self.fuel < 0:
            raise FuelExhausted("evaluation fuel exhausted")
        if self.trace is not None:
            self.trace.append((rule, delta))


def evaluate(sig: Signature, e: Expr, fuel: int = DEFAULT_FUEL, trace: bool = False) -> EvalResult:
    state = _State(fuel, [] if trace else None)
    value, cost = _eval(sig, e, state)
    return EvalResult(value, cost, state.trace)


def _eval(sig: Signature, e: Expr, st: _State) -> tuple[Expr, int]:
    if isinstance(e, (Unit, Lam, Delay)):
        st.tick("value", 0)
        return e, 0
    if isinstance(e, Var):
        raise StuckError(f"free variable {e.name!r} during evaluation")
    if isinstance(e, Pair):
        st.tick("pair", 0)
        v0, n0 = _eval(sig, e.left, st)
        v1, n1 = _eval(sig, e.right, st)
        return Pair(v0, v1), n0 + n1
    if isinstance(e, Split):
        st.tick("split", 0)
        v, n0 = _eval(sig, e.scrut, st)
        if not isinstance(v, Pair):
            raise StuckError("split scrutinee did not evaluate to a pair")
        body = subst1(subst1(e.body, e.x0, v.left), e.x1, v.right)
        v1, n1 = _eval(sig, body, st)
        return v1, n0 + n1
    if isinstance(e, App):
        vf, n0 = _eval(sig, e.fn, st)
        va, n1 = _eval(sig, e.arg, st)
        if not isinstance(vf, Lam):
            raise StuckError("applying a non-lambda value")
        st.tick("app", 1)
        v, n2 = _eval(sig, subst1(vf.body, vf.var, va), st)
        return v, 1 + n0 + n1 + n2
    if isinstance(e, Force):
        st.tick("force", 0)
        v, n0 = _eval(sig, e.body, st)
        if not isinstance(v, Delay):
            raise StuckError("forcing a non-suspension value")
        v1, n1 = _eval(sig, v.body, st)
        return v1, n0 + n1
    if isinstance(e, Con):
        st.tick("con", 0)
        v, n = _eval(sig, e.arg, st)
        return Con(e.ctor, v), n
    if isinstance(e, Rec):
        v0, n0 = _eval(sig, e.scrut, st)
        if not isinstance(v0, Con):
            raise StuckError("rec scrutinee did not evaluate to a constructor")
        decl = sig.ctor_datatype(v0.ctor)
        if decl is None:
            raise StuckError(f"unknown constructor {v0.ctor!r}")
        branch = e.branch_for(v0.ctor)
        phi = decl.functor_of(v0.ctor)
        y = fresh("y")
        wrapped = Pair(Var(y), Delay(Rec(Var(y), e.branches)))
        v1 = eval_map(sig, phi, y, wrapped, v0.arg)
        st.tick("rec", 1)
        v, n2 = _eval(sig, subst1(branch.body, branch.var, v1), st)
        return v, 1 + n0 + n2
    if isinstance(e, Map):
        st.tick("map", 0)
        v0, n0 = _eval(sig, e.target, st)
        return eval_map(sig, e.functor, e.var, e.vbody, v0), n0
    if isinstance(e, Let):
        st.tick("let", 0)
        v0, n0 = _eval(sig, e.bound, st)
        v1, n1 = _eval(sig, subst1(e.body, e.var, v0), st)
        return v1, n0 + n1
    raise TypeError(e)


def eval_map(sig: Signature, phi: Functor, var: str, vbody: Expr, target: Expr) -> Expr:
    """Structural map over one functor layer; total, cost 0."""
    if isinstance(phi, FSelf):
        return subst1(vbody, var, target)
    if isinstance(phi, FConst):
        return target
    if isinstance(phi, FProd):
        if not isinstance(target, Pair):
            raise StuckError("map over a product functor needs a pair value")
        return Pair(
            eval_map(sig, phi.left, var, vbody, target.left),
            eval_map(sig, phi.right, var, vbody, target.right),
        )
    if isinstance(phi, FArrow):
        if not isinstance(target, Lam):
            raise StuckError("map over an arrow functor needs a lambda value")
        z = fresh("z")
        inner = Map(phi.cod, var, vbody, Var(z))
        return Lam(target.var, Let(target.body, z, inner))
    raise TypeError(phi)

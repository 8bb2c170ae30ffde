"""Empirical verification of the bounding theorem.

Inputs are generated deterministically per type; each case evaluates the
fully applied definition operationally and interprets its translation
denotationally, then checks the bounding relation: the operational cost is
at most the denoted cost, and the result value is bounded by the denoted
potential (recursively at products, suspensions, and — on sampled
arguments — arrows).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Optional

from .interp import (
    SBOT,
    SCarrier,
    STOP,
    STuple,
    as_cost,
    interp,
    render,
    sem_apply,
    sem_proj,
)
from .opsem import evaluate
from .parser import expr_to_text, type_to_text
from .sizes import (
    Carrier,
    EnumerationError,
    ModelError,
    ModelTable,
    NInf,
    NInfCarrier,
    ONEPOINT,
    OnePointCarrier,
    TupleCarrier,
    value_size,
)
from .terms import (
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
    Pair,
    Program,
    Rec,
    Signature,
    Split,
    SourceType,
    TArrow,
    TData,
    TProd,
    TSusp,
    TUnit,
    Unit,
    Var,
    fresh,
    functor_mentions_self,
    inline_defs,
    subst1,
)
from .translate import translate_expr
from .typecheck import typecheck_program


class GenerationError(Exception):
    """The type has no finitely generable value population."""


@dataclass
class GenConfig:
    max_size: int = 5
    samples: int = 20
    seed: int = 0
    fn_samples: int = 3


# ---------------------------------------------------------------------------
# Value generation


def min_value(sig: Signature, ty: SourceType) -> Expr:
    """A smallest closed value of the type (base constructors throughout)."""
    if isinstance(ty, TUnit):
        return Unit()
    if isinstance(ty, TProd):
        return Pair(min_value(sig, ty.left), min_value(sig, ty.right))
    if isinstance(ty, TSusp):
        return Delay(min_value(sig, ty.body))
    if isinstance(ty, TArrow):
        return Lam(fresh("x"), min_value(sig, ty.cod))
    if isinstance(ty, TData):
        decl = sig.decl(ty.name)
        for cname, phi in decl.ctors:
            if not functor_mentions_self(phi):
                return Con(cname, _min_functor_arg(sig, ty.name, phi))
        raise GenerationError(f"datatype {ty.name!r} has no base constructor")
    raise TypeError(ty)


def _min_functor_arg(sig: Signature, datatype: str, phi: Functor) -> Expr:
    if isinstance(phi, FSelf):
        return min_value(sig, TData(datatype))
    if isinstance(phi, FConst):
        return min_value(sig, phi.ty)
    if isinstance(phi, FProd):
        return Pair(
            _min_functor_arg(sig, datatype, phi.left),
            _min_functor_arg(sig, datatype, phi.right),
        )
    if isinstance(phi, FArrow):
        if functor_mentions_self(phi):
            raise GenerationError(
                f"datatype {datatype!r} holds recursive occurrences under an "
                "arrow; its values cannot be generated"
            )
        return Lam(fresh("x"), _min_functor_arg(sig, datatype, phi.cod))
    raise TypeError(phi)


def canonical_functions(sig: Signature, ty: TArrow) -> list[Expr]:
    """A small library of closed functions: identity, constants, a
    constructor wrapper, and a cost-bearing structural copy when they exist
    at the type."""
    out: list[Expr] = []
    if ty.dom == ty.cod:
        out.append(Lam("x", Var("x")))
    out.append(Lam(fresh("x"), min_value(sig, ty.cod)))
    if isinstance(ty.dom, TData) and ty.dom == ty.cod:
        decl = sig.decl(ty.dom.name)
        for cname, phi in decl.ctors:
            if isinstance(phi, FSelf):
                out.append(Lam("x", Con(cname, Var("x"))))
                break
        copy = _structural_copy(decl)
        if copy is not None:
            out.append(copy)
    return out


def _structural_copy(decl) -> Optional[Expr]:
    """fn x. rec(x; …) rebuilding the value, when every constructor is a
    bare recursive slot or a constant."""
    branches = []
    for cname, phi in decl.ctors:
        if isinstance(phi, FSelf):
            p, r, y = fresh("p"), fresh("r"), fresh("y")
            branches.append(
                Branch(cname, p, Split(Var(p), y, r, Con(cname, Force(Var(r)))))
            )
        elif isinstance(phi, FConst):
            u = fresh("u")
            branches.append(Branch(cname, u, Con(cname, Var(u))))
        else:
            return None
    return Lam("x", Rec(Var("x"), branches))


def gen_values(
    sig: Signature, table: ModelTable, ty: SourceType, cfg: GenConfig
) -> list[Expr]:
    """Deterministic pseudo-random closed values of the type, all
    constructors covered, sizes within the active model's bound."""
    rng = random.Random(f"{cfg.seed}:{type_to_text(ty)}")
    raw: list[Expr] = []
    if isinstance(ty, TUnit):
        raw.append(Unit())
    elif isinstance(ty, TProd):
        lefts = gen_values(sig, table, ty.left, cfg)
        rights = gen_values(sig, table, ty.right, cfg)
        raw.extend(Pair(a, b) for a, b in itertools.product(lefts, rights))
    elif isinstance(ty, TSusp):
        raw.extend(Delay(v) for v in gen_values(sig, table, ty.body, cfg))
    elif isinstance(ty, TArrow):
        raw.extend(canonical_functions(sig, ty))
    elif isinstance(ty, TData):
        raw.extend(_gen_data(sig, table, ty.name, cfg, rng))
    else:
        raise TypeError(ty)

    out: list[Expr] = []
    seen: set[str] = set()
    for v in raw:
        if not _within_bound(sig, table, ty, v, cfg.max_size):
            continue
        text = expr_to_text(v)
        if text not in seen:
            seen.add(text)
            out.append(v)
        if len(out) >= cfg.samples:
            break
    if not out:
        raise GenerationError(f"no values of type {type_to_text(ty)} within the bound")
    return out


def _within_bound(
    sig: Signature, table: ModelTable, ty: SourceType, v: Expr, max_size: int
) -> bool:
    if isinstance(ty, TData):
        model = table.model(ty.name)
        bound = elem_of_size(model.carrier, max_size)
        return model.carrier.leq(value_size(table, v), bound)
    if isinstance(ty, TProd):
        return _within_bound(sig, table, ty.left, v.left, max_size) and _within_bound(
            sig, table, ty.right, v.right, max_size
        )
    if isinstance(ty, TSusp):
        return _within_bound(sig, table, ty.body, v.body, max_size)
    return True


def _gen_data(
    sig: Signature, table: ModelTable, datatype: str, cfg: GenConfig, rng: random.Random
) -> list[Expr]:
    decl = sig.decl(datatype)
    out: list[Expr] = []
    # one value rooted at each constructor, then a ladder of growing depths,
    # then random fill
    for cname, phi in decl.ctors:
        out.append(Con(cname, _gen_functor_arg(sig, table, datatype, phi, 1, rng)))
    for depth in range(cfg.max_size + 1):
        out.append(_gen_one(sig, table, datatype, depth, rng))
    for _ in range(cfg.samples * 4):
        out.append(_gen_one(sig, table, datatype, rng.randrange(cfg.max_size + 1), rng))
    return out


def _gen_one(
    sig: Signature, table: ModelTable, datatype: str, budget: int, rng: random.Random
) -> Expr:
    decl = sig.decl(datatype)
    recursive = [(c, p) for c, p in decl.ctors if functor_mentions_self(p)]
    base = [(c, p) for c, p in decl.ctors if not functor_mentions_self(p)]
    if budget > 0 and recursive:
        cname, phi = rng.choice(recursive)
    elif base:
        cname, phi = rng.choice(base)
    else:
        cname, phi = rng.choice(decl.ctors)
    return Con(cname, _gen_functor_arg(sig, table, datatype, phi, budget, rng))


def _gen_functor_arg(
    sig: Signature,
    table: ModelTable,
    datatype: str,
    phi: Functor,
    budget: int,
    rng: random.Random,
) -> Expr:
    if isinstance(phi, FSelf):
        return _gen_one(sig, table, datatype, max(budget - 1, 0), rng)
    if isinstance(phi, FConst):
        return _gen_type_arg(sig, table, phi.ty, budget, rng)
    if isinstance(phi, FProd):
        return Pair(
            _gen_functor_arg(sig, table, datatype, phi.left, budget, rng),
            _gen_functor_arg(sig, table, datatype, phi.right, budget, rng),
        )
    if isinstance(phi, FArrow):
        if functor_mentions_self(phi):
            raise GenerationError(
                f"datatype {datatype!r} holds recursive occurrences under an "
                "arrow; its values cannot be generated"
            )
        return Lam(fresh("x"), _gen_functor_arg(sig, table, datatype, phi.cod, budget, rng))
    raise TypeError(phi)


def _gen_type_arg(
    sig: Signature, table: ModelTable, ty: SourceType, budget: int, rng: random.Random
) -> Expr:
    if isinstance(ty, TUnit):
        return Unit()
    if isinstance(ty, TProd):
        return Pair(
            _gen_type_arg(sig, table, ty.left, budget, rng),
            _gen_type_arg(sig, table, ty.right, budget, rng),
        )
    if isinstance(ty, TSusp):
        return Delay(_gen_type_arg(sig, table, ty.body, budget, rng))
    if isinstance(ty, TArrow):
        return rng.choice(canonical_functions(sig, ty))
    if isinstance(ty, TData):
        return _gen_one(sig, table, ty.name, budget, rng)
    raise TypeError(ty)


def elem_of_size(carrier: Carrier, s: int):
    """The carrier element representing numeric size s."""
    if isinstance(carrier, NInfCarrier):
        return NInf(s)
    if isinstance(carrier, OnePointCarrier):
        return ONEPOINT
    if isinstance(carrier, TupleCarrier):
        return tuple(elem_of_size(c, s) for c in carrier.components)
    raise TypeError(carrier)


# ---------------------------------------------------------------------------
# Bound checking


@dataclass
class CaseReport:
    index: int
    inputs: list[str]
    op_cost: int
    den_cost: NInf
    cost_ok: bool
    value_ok: bool
    sampled: bool

    @property
    def passed(self) -> bool:
        return self.cost_ok and self.value_ok


@dataclass
class BoundReport:
    program: str
    model: str
    def_name: str
    seed: int
    cases: list[CaseReport] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def n_pass(self) -> int:
        return sum(1 for c in self.cases if c.passed)

    @property
    def n_fail(self) -> int:
        return sum(1 for c in self.cases if not c.passed)

    @property
    def passed(self) -> bool:
        return self.error is None and self.n_fail == 0


def abstract_semval(table: ModelTable, sig: Signature, v: Expr):
    """The semantic potential of a closed value, via its translation."""
    return sem_proj(1, interp(table, {}, translate_expr(sig, v)))


def check_bound(
    program: Program,
    def_name: str,
    table: ModelTable,
    cfg: GenConfig,
    program_id: str = "",
    model_id: str = "",
) -> BoundReport:
    report = BoundReport(program_id, model_id, def_name, cfg.seed)
    sig = program.signature
    types = typecheck_program(program)
    ty = types[def_name]
    inlined = inline_defs(program, Var(def_name))

    arg_types: list[SourceType] = []
    while isinstance(ty, TArrow):
        arg_types.append(ty.dom)
        ty = ty.cod
    result_ty = ty

    try:
        pools = [gen_values(sig, table, dom, cfg) for dom in arg_types]
    except (GenerationError, ModelError, EnumerationError) as exc:
        report.error = str(exc)
        return report

    combos = list(itertools.product(*pools))
    if len(combos) > cfg.samples:
        rng = random.Random(f"{cfg.seed}:{def_name}:cases")
        combos = rng.sample(combos, cfg.samples)

    for index, args in enumerate(combos):
        applied = inlined
        for v in args:
            applied = App(applied, v)
        op = evaluate(sig, applied)
        den = interp(table, {}, translate_expr(sig, applied))
        den_cost = as_cost(sem_proj(0, den))
        pot = sem_proj(1, den)
        cost_ok = NInf(op.cost) <= den_cost
        sampled = [False]
        value_ok = _value_bounded(table, sig, result_ty, op.value, pot, cfg, sampled)
        report.cases.append(
            CaseReport(
                index,
                [expr_to_text(v) for v in args],
                op.cost,
                den_cost,
                cost_ok,
                value_ok,
                sampled[0],
            )
        )
    return report


def _value_bounded(
    table: ModelTable,
    sig: Signature,
    ty: SourceType,
    w: Expr,
    p,
    cfg: GenConfig,
    sampled: list[bool],
) -> bool:
    if p is STOP:
        return True
    if p is SBOT:
        return False
    if isinstance(ty, TUnit):
        return True
    if isinstance(ty, TData):
        model = table.model(ty.name)
        if not isinstance(p, SCarrier):
            return False
        return model.carrier.leq(value_size(table, w), p.elem)
    if isinstance(ty, TProd):
        if not isinstance(w, Pair) or not isinstance(p, STuple):
            return False
        return _value_bounded(
            table, sig, ty.left, w.left, p.left, cfg, sampled
        ) and _value_bounded(table, sig, ty.right, w.right, p.right, cfg, sampled)
    if isinstance(ty, TSusp):
        if not isinstance(w, Delay) or not isinstance(p, STuple):
            return False
        forced = evaluate(sig, w.body)
        if not NInf(forced.cost) <= as_cost(p.left):
            return False
        return _value_bounded(table, sig, ty.body, forced.value, p.right, cfg, sampled)
    if isinstance(ty, TArrow):
        # the arrow clause, restricted to sampled arguments: for v ⊑ a′,
        # the body with v substituted must be bounded by p(a′)
        sampled[0] = True
        if not isinstance(w, Lam):
            return False
        try:
            args = gen_values(sig, table, ty.dom, cfg)[: cfg.fn_samples]
        except GenerationError:
            return True
        for v in args:
            body = subst1(w.body, w.var, v)
            op = evaluate(sig, body)
            res = sem_apply(p, abstract_semval(table, sig, v))
            if not NInf(op.cost) <= as_cost(sem_proj(0, res)):
                return False
            if not _value_bounded(
                table, sig, ty.cod, op.value, sem_proj(1, res), cfg, sampled
            ):
                return False
        return True
    raise TypeError(ty)


# ---------------------------------------------------------------------------
# Tabulation


@dataclass
class TabRow:
    size: int
    cost: NInf
    potential: str


def tabulate(
    program: Program, def_name: str, table: ModelTable, lo: int, hi: int
) -> list[TabRow]:
    """Apply the definition's denotation on a size grid: the first datatype
    argument ranges over the grid, later arguments are taken at top."""
    sig = program.signature
    types = typecheck_program(program)
    ty = types[def_name]
    inlined = inline_defs(program, Var(def_name))
    den = interp(table, {}, translate_expr(sig, inlined))

    arg_types: list[SourceType] = []
    while isinstance(ty, TArrow):
        arg_types.append(ty.dom)
        ty = ty.cod

    rows: list[TabRow] = []
    for s in range(lo, hi + 1):
        cost = as_cost(sem_proj(0, den))
        val = sem_proj(1, den)
        gridded = False
        for dom in arg_types:
            if isinstance(dom, TData):
                model = table.model(dom.name)
                elem = (
                    elem_of_size(model.carrier, s)
                    if not gridded
                    else model.carrier.top
                )
                gridded = True
                arg = SCarrier(dom.name, elem)
            else:
                arg = STOP
            res = sem_apply(val, arg)
            cost = cost + as_cost(sem_proj(0, res))
            val = sem_proj(1, res)
        rows.append(TabRow(s, cost, render(table, val)))
    return rows

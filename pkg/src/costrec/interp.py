"""Denotational size-based interpretation of the complexity language.

Semantic values mirror complexity types: costs are ∞-extended naturals,
datatype potentials are carrier elements, products are tuples, and arrows
are semantic functions applied by need.  The recursor is a join over all
unfoldings whose size is below the scrutinee's potential; when a model is
not well-founded the recursion is detected and collapses to top.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .complexity import (
    CApp,
    CCon,
    CExpr,
    CLam,
    CNum,
    CPair,
    CPlus,
    CProj,
    CRec,
    CUnitE,
    CVar,
)
from .sizes import (
    INF,
    AbstractUnfolding,
    EnumerationError,
    ModelTable,
    NInf,
    ONEPOINT,
    ZERO,
    unfoldings,
)
from .terms import (
    FArrow,
    FConst,
    FProd,
    FSelf,
    Functor,
    TData,
    TUnit,
    functor_mentions_self,
)


class InterpError(Exception):
    pass


# ---------------------------------------------------------------------------
# Semantic values


class _Sentinel:
    def __init__(self, name: str):
        self.name = name

    def __repr__(self) -> str:
        return self.name


SUNIT = _Sentinel("unit")
STOP = _Sentinel("top")  # absorbing greatest element, any type
SBOT = _Sentinel("bottom")  # absorbing least element (empty joins)


@dataclass
class STuple:
    left: object
    right: object


@dataclass
class SCarrier:
    datatype: str
    elem: object


@dataclass
class SFun:
    fn: Callable[[object], object]


def as_cost(v) -> NInf:
    if isinstance(v, NInf):
        return v
    if v is STOP:
        return INF
    if v is SBOT:
        return ZERO
    raise InterpError(f"expected a cost, found {v!r}")


def sem_proj(index: int, v):
    if isinstance(v, STuple):
        return v.left if index == 0 else v.right
    if v is STOP or v is SBOT:
        return v
    raise InterpError(f"projection from a non-tuple value {v!r}")


def sem_apply(f, a):
    if isinstance(f, SFun):
        return f.fn(a)
    if f is STOP or f is SBOT:
        return f
    raise InterpError(f"applying a non-function value {f!r}")


def sem_join(table: ModelTable, a, b):
    if a is SBOT:
        return b
    if b is SBOT:
        return a
    if a is STOP or b is STOP:
        return STOP
    if isinstance(a, NInf) and isinstance(b, NInf):
        return a.max(b)
    if a is SUNIT and b is SUNIT:
        return SUNIT
    if isinstance(a, STuple) and isinstance(b, STuple):
        return STuple(sem_join(table, a.left, b.left), sem_join(table, a.right, b.right))
    if isinstance(a, SCarrier) and isinstance(b, SCarrier) and a.datatype == b.datatype:
        return SCarrier(a.datatype, table.model(a.datatype).carrier.join(a.elem, b.elem))
    if isinstance(a, SFun) and isinstance(b, SFun):
        return SFun(lambda x: sem_join(table, sem_apply(a, x), sem_apply(b, x)))
    if isinstance(a, SFun) or isinstance(b, SFun):
        return SFun(lambda x: sem_join(table, sem_apply(a, x), sem_apply(b, x)))
    raise InterpError(f"join of incompatible values {a!r} and {b!r}")


def sem_leq(table: ModelTable, a, b, fn_samples=()) -> bool:
    """Pointwise order; arrows compared on the provided sample arguments."""
    if a is SBOT or b is STOP:
        return True
    if a is STOP:
        return b is STOP
    if b is SBOT:
        return a is SBOT
    if isinstance(a, NInf) and isinstance(b, NInf):
        return a <= b
    if a is SUNIT and b is SUNIT:
        return True
    if isinstance(a, STuple) and isinstance(b, STuple):
        return sem_leq(table, a.left, b.left, fn_samples) and sem_leq(
            table, a.right, b.right, fn_samples
        )
    if isinstance(a, SCarrier) and isinstance(b, SCarrier) and a.datatype == b.datatype:
        return table.model(a.datatype).carrier.leq(a.elem, b.elem)
    if isinstance(a, SFun) and isinstance(b, SFun):
        return all(
            sem_leq(table, sem_apply(a, x), sem_apply(b, x), fn_samples) for x in fn_samples
        )
    raise InterpError(f"order on incompatible values {a!r} and {b!r}")


def render(table: ModelTable, v) -> str:
    if isinstance(v, NInf):
        return str(v)
    if v is SUNIT:
        return "()"
    if v is STOP:
        return "top"
    if v is SBOT:
        return "bot"
    if isinstance(v, STuple):
        return f"({render(table, v.left)}, {render(table, v.right)})"
    if isinstance(v, SCarrier):
        return table.model(v.datatype).carrier.render(v.elem)
    if isinstance(v, SFun):
        return "<fn>"
    raise TypeError(v)


# ---------------------------------------------------------------------------
# Interpretation


def interp(table: ModelTable, env: dict[str, object], e: CExpr):
    if isinstance(e, CVar):
        if e.name not in env:
            raise InterpError(f"unbound variable {e.name!r}")
        return env[e.name]
    if isinstance(e, CNum):
        return NInf(e.value)
    if isinstance(e, CPlus):
        return as_cost(interp(table, env, e.left)) + as_cost(interp(table, env, e.right))
    if isinstance(e, CUnitE):
        return SUNIT
    if isinstance(e, CPair):
        return STuple(interp(table, env, e.left), interp(table, env, e.right))
    if isinstance(e, CProj):
        return sem_proj(e.index, interp(table, env, e.body))
    if isinstance(e, CLam):
        return SFun(lambda x: interp(table, {**env, e.var: x}, e.body))
    if isinstance(e, CApp):
        return sem_apply(interp(table, env, e.fn), interp(table, env, e.arg))
    if isinstance(e, CCon):
        return _interp_con(table, env, e)
    if isinstance(e, CRec):
        return interp_rec(table, env, e)
    raise TypeError(e)


class _BottomArg(Exception):
    """A constructor argument is bottom, so the constructed value is too."""


def _interp_con(table: ModelTable, env, e: CCon):
    decl = table.sig.ctor_datatype(e.ctor)
    if decl is None:
        raise InterpError(f"unknown constructor {e.ctor!r}")
    model = table.model(decl.name)
    phi = decl.functor_of(e.ctor)
    arg = interp(table, env, e.arg)
    try:
        tree = _semval_to_skeleton(table, phi, arg, decl.name)
    except _BottomArg:
        return SBOT
    return SCarrier(decl.name, model.size_of(AbstractUnfolding(e.ctor, tree)))


def _semval_to_skeleton(table: ModelTable, phi: Functor, v, self_name: str):
    """Abstract a semantic constructor argument to a size-function input."""
    if isinstance(phi, FSelf):
        return _carrier_elem(table, self_name, v)
    if isinstance(phi, FConst):
        if isinstance(phi.ty, TData):
            return _carrier_elem(table, phi.ty.name, v)
        return ONEPOINT
    if isinstance(phi, FProd):
        if v is STOP or v is SBOT:
            return (
                _semval_to_skeleton(table, phi.left, v, self_name),
                _semval_to_skeleton(table, phi.right, v, self_name),
            )
        return (
            _semval_to_skeleton(table, phi.left, sem_proj(0, v), self_name),
            _semval_to_skeleton(table, phi.right, sem_proj(1, v), self_name),
        )
    if isinstance(phi, FArrow):
        if functor_mentions_self(phi):
            raise EnumerationError(
                "recursive occurrences under an arrow cannot be abstracted"
            )
        return ONEPOINT
    raise TypeError(phi)


def _carrier_elem(table: ModelTable, datatype: str, v):
    if isinstance(v, SCarrier):
        return v.elem
    if v is STOP:
        return table.model(datatype).carrier.top
    if v is SBOT:
        raise _BottomArg()
    raise InterpError(f"expected a datatype potential, found {v!r}")


def _cache_token(v):
    """A hashable stand-in for a semantic value, or None if there is none.

    Functions are keyed by identity; callers must pin the object so the id
    stays valid for the cache's lifetime.
    """
    if isinstance(v, NInf):
        return ("n", v)
    if v is SUNIT or v is STOP or v is SBOT:
        return ("s", id(v))
    if isinstance(v, SCarrier):
        return ("c", v.datatype, v.elem)
    if isinstance(v, STuple):
        left = _cache_token(v.left)
        right = _cache_token(v.right)
        if left is None or right is None:
            return None
        return ("t", left, right)
    if isinstance(v, SFun):
        return ("f", id(v))
    return None


def _rec_cache_key(table: ModelTable, env: dict[str, object], e: CRec, elem):
    """Cache key for a recursor over branch-body free variables, with the
    objects that must stay alive for identity keys to remain valid."""
    from .complexity import c_free_vars

    names = sorted(
        name
        for b in e.branches
        for name in c_free_vars(b.body) - {b.var}
        if name in env
    )
    tokens = []
    pins = [e]
    for name in names:
        token = _cache_token(env[name])
        if token is None:
            return None, ()
        tokens.append((name, token))
        pins.append(env[name])
    return (id(e), elem, tuple(tokens)), tuple(pins)


def interp_rec(table: ModelTable, env: dict[str, object], e: CRec):
    scrut = interp(table, env, e.scrut)
    if scrut is STOP:
        return STOP
    if scrut is SBOT:
        return SBOT
    if not isinstance(scrut, SCarrier):
        raise InterpError(f"rec scrutinee is not a datatype potential: {scrut!r}")
    datatype = scrut.datatype
    model = table.model(datatype)
    decl = model.decl

    if datatype in table.semrec:
        return _interp_semrec_list(table, env, e, model, scrut.elem)

    cache_key, pins = _rec_cache_key(table, env, e, scrut.elem)
    if cache_key is not None and cache_key in table.rec_cache:
        return table.rec_cache[cache_key][0]

    memo: dict[object, object] = {}
    in_progress: set[object] = set()
    env_tokens = cache_key[2] if cache_key is not None else None

    def shared_key(bound):
        if env_tokens is None:
            return None
        return (id(e), bound, env_tokens)

    def go(bound):
        key = bound
        if key in memo:
            return memo[key]
        skey = shared_key(bound)
        if skey is not None and skey in table.rec_cache:
            return table.rec_cache[skey][0]
        if key in in_progress:
            # Non-well-founded model: the recursion reaches itself at the
            # same bound, so only top is a sound answer.
            return STOP
        if not model.carrier.is_finite(bound):
            return STOP
        in_progress.add(key)
        try:
            result = SBOT
            for unf in unfoldings(table, datatype, bound):
                branch = e.branch_for(unf.ctor)
                phi = decl.functor_of(unf.ctor)
                binding = _bind_skeleton(table, phi, unf.arg, datatype, go)
                val = interp(table, {**env, branch.var: binding}, branch.body)
                result = sem_join(table, result, val)
            memo[key] = result
            return result
        finally:
            in_progress.discard(key)

    out = go(scrut.elem)
    if cache_key is not None:
        table.rec_cache[cache_key] = (out, pins)
    return out


def _bind_skeleton(table: ModelTable, phi: Functor, tree, datatype: str, rec_fn):
    """Build the branch variable's value: recursive positions become
    (size, recursive result) pairs; labels become carrier potentials;
    size-irrelevant positions are overapproximated by top."""
    if isinstance(phi, FSelf):
        return STuple(SCarrier(datatype, tree), rec_fn(tree))
    if isinstance(phi, FConst):
        if isinstance(phi.ty, TUnit):
            return SUNIT
        if isinstance(phi.ty, TData):
            return SCarrier(phi.ty.name, tree)
        return STOP
    if isinstance(phi, FProd):
        return STuple(
            _bind_skeleton(table, phi.left, tree[0], datatype, rec_fn),
            _bind_skeleton(table, phi.right, tree[1], datatype, rec_fn),
        )
    if isinstance(phi, FArrow):
        return STOP
    raise TypeError(phi)


def _list_shape(decl):
    """(nil ctor, cons ctor) when the datatype is list-shaped, else None."""
    from .sizes import _recursive_arity

    nil = cons = None
    for cname, phi in decl.ctors:
        arity = len(_recursive_arity(phi))
        if arity == 0 and nil is None:
            nil = cname
        elif arity == 1 and cons is None:
            cons = cname
        else:
            return None
    if nil is None or cons is None:
        return None
    return nil, cons


def _interp_semrec_list(table: ModelTable, env, e: CRec, model, bound):
    """Primitive recursion with joins: semrec(0,a,f)=a; semrec(n+1,a,f)=a ∨ f(n, semrec(n,a,f))."""
    from .sizes import LengthModel

    shape = _list_shape(model.decl)
    if shape is None:
        raise InterpError(
            f"semrec requested for {model.datatype!r}, which is not list-shaped"
        )
    if not isinstance(model, LengthModel):
        raise InterpError(
            f"semrec requires the length model for {model.datatype!r}, "
            f"found {model.describe()!r}"
        )
    nil_ctor, cons_ctor = shape
    if not model.carrier.is_finite(bound):
        return STOP
    nil_branch = e.branch_for(nil_ctor)
    cons_branch = e.branch_for(cons_ctor)
    nil_phi = model.decl.functor_of(nil_ctor)
    cons_phi = model.decl.functor_of(cons_ctor)

    nil_binding = _bind_skeleton(table, nil_phi, _const_skeleton(table, nil_phi), model.datatype, None)
    base = interp(table, {**env, nil_branch.var: nil_binding}, nil_branch.body)

    def step(n: int, acc):
        skeleton = _const_skeleton(table, cons_phi, rec_elem=NInf(n))
        binding = _bind_skeleton(table, cons_phi, skeleton, model.datatype, lambda _s: acc)
        return interp(table, {**env, cons_branch.var: binding}, cons_branch.body)

    acc = base
    for n in range(bound.value):
        acc = sem_join(table, base, step(n, acc))
    return acc


def _const_skeleton(table: ModelTable, phi: Functor, rec_elem=None):
    """A skeleton with top at label positions and rec_elem at the recursive slot."""
    if isinstance(phi, FSelf):
        return rec_elem
    if isinstance(phi, FConst):
        if isinstance(phi.ty, TData):
            return table.model(phi.ty.name).carrier.top
        return ONEPOINT
    if isinstance(phi, FProd):
        return (
            _const_skeleton(table, phi.left, rec_elem),
            _const_skeleton(table, phi.right, rec_elem),
        )
    if isinstance(phi, FArrow):
        return ONEPOINT
    raise TypeError(phi)

"""Size models: per-datatype carriers, size functions, value abstraction,
and bounded enumeration of datatype unfoldings.

A size model interprets a datatype as a carrier (naturals extended with an
absorbing infinity, tuples of carriers, or a single point) together with a
size function mapping one layer of unfolding — a constructor applied to
already-abstracted arguments — to a carrier element.  Models are selected per
datatype in a line-oriented config file.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .terms import (
    FArrow,
    FConst,
    FProd,
    FSelf,
    Functor,
    Signature,
    TData,
    TUnit,
    functor_mentions_self,
)


class ModelError(Exception):
    pass


class EnumerationError(ModelError):
    """A join index cannot be enumerated finitely."""


# ---------------------------------------------------------------------------
# N^∞


@dataclass(frozen=True, order=False)
class NInf:
    """A natural number or infinity (value None)."""

    value: Optional[int]

    def is_inf(self) -> bool:
        return self.value is None

    def __add__(self, other: "NInf") -> "NInf":
        if self.is_inf() or other.is_inf():
            return INF
        return NInf(self.value + other.value)

    def __le__(self, other: "NInf") -> bool:
        if other.is_inf():
            return True
        if self.is_inf():
            return False
        return self.value <= other.value

    def __lt__(self, other: "NInf") -> bool:
        return self <= other and self != other

    def max(self, other: "NInf") -> "NInf":
        return other if self <= other else self

    def __str__(self) -> str:
        return "inf" if self.is_inf() else str(self.value)


INF = NInf(None)
ZERO = NInf(0)
ONE = NInf(1)


def ninf(n: int) -> NInf:
    return NInf(n)


def nsum(xs: Iterable[NInf]) -> NInf:
    out = ZERO
    for x in xs:
        out = out + x
    return out


def nmax(xs: Iterable[NInf], default: NInf = ZERO) -> NInf:
    out = default
    for x in xs:
        out = out.max(x)
    return out


# One-point marker for size-irrelevant positions (unit, suspensions, arrows).
class _OnePoint:
    def __repr__(self) -> str:
        return "*"

    def __str__(self) -> str:
        return "*"


ONEPOINT = _OnePoint()


# ---------------------------------------------------------------------------
# Carriers


class Carrier:
    bottom: object
    top: object

    def leq(self, a, b) -> bool:
        raise NotImplementedError

    def lt(self, a, b) -> bool:
        return self.leq(a, b) and a != b

    def join(self, a, b):
        raise NotImplementedError

    def join_all(self, xs: Iterable):
        out = self.bottom
        for x in xs:
            out = self.join(out, x)
        return out

    def is_finite(self, b) -> bool:
        raise NotImplementedError

    def enumerate_upto(self, b) -> list:
        raise NotImplementedError

    def render(self, a) -> str:
        raise NotImplementedError


class NInfCarrier(Carrier):
    bottom = ZERO
    top = INF

    def leq(self, a: NInf, b: NInf) -> bool:
        return a <= b

    def join(self, a: NInf, b: NInf) -> NInf:
        return a.max(b)

    def is_finite(self, b: NInf) -> bool:
        return not b.is_inf()

    def enumerate_upto(self, b: NInf) -> list[NInf]:
        if b.is_inf():
            raise EnumerationError("cannot enumerate up to an infinite bound")
        return [NInf(i) for i in range(b.value + 1)]

    def render(self, a: NInf) -> str:
        return str(a)


class OnePointCarrier(Carrier):
    bottom = ONEPOINT
    top = ONEPOINT

    def leq(self, a, b) -> bool:
        return True

    def join(self, a, b):
        return ONEPOINT

    def is_finite(self, b) -> bool:
        return True

    def enumerate_upto(self, b) -> list:
        return [ONEPOINT]

    def render(self, a) -> str:
        return "*"


class TupleCarrier(Carrier):
    def __init__(self, components: list[Carrier]):
        self.components = components
        self.bottom = tuple(c.bottom for c in components)
        self.top = tuple(c.top for c in components)

    def leq(self, a, b) -> bool:
        return all(c.leq(x, y) for c, x, y in zip(self.components, a, b))

    def join(self, a, b):
        return tuple(c.join(x, y) for c, x, y in zip(self.components, a, b))

    def is_finite(self, b) -> bool:
        return all(c.is_finite(x) for c, x in zip(self.components, b))

    def enumerate_upto(self, b) -> list:
        grids = [c.enumerate_upto(x) for c, x in zip(self.components, b)]
        return [tuple(xs) for xs in itertools.product(*grids)]

    def render(self, a) -> str:
        parts = ", ".join(c.render(x) for c, x in zip(self.components, a))
        return f"({parts})"


# ---------------------------------------------------------------------------
# Unfoldings


@dataclass
class AbstractUnfolding:
    """One constructor layer with abstracted arguments.

    The arg tree mirrors the constructor's functor: carrier elements at
    recursive positions, label-carrier elements at constant datatype
    positions, ONEPOINT at size-irrelevant positions, 2-tuples at products,
    and ("fn", inner) at enumerable arrow positions.
    """

    ctor: str
    arg: object


def _walk_recursive(phi: Functor, tree) -> list:
    """Collect the carrier elements sitting at recursive positions."""
    if isinstance(phi, FSelf):
        return [tree]
    if isinstance(phi, FConst):
        return []
    if isinstance(phi, FProd):
        return _walk_recursive(phi.left, tree[0]) + _walk_recursive(phi.right, tree[1])
    if isinstance(phi, FArrow):
        if not functor_mentions_self(phi):
            return []
        raise EnumerationError("recursive occurrences under an arrow have no size")
    raise TypeError(phi)


def _walk_labels(phi: Functor, tree) -> list[tuple[str, object]]:
    """Collect (datatype, element) at constant datatype positions."""
    if isinstance(phi, FSelf):
        return []
    if isinstance(phi, FConst):
        if isinstance(phi.ty, TData) and tree is not ONEPOINT:
            return [(phi.ty.name, tree)]
        return []
    if isinstance(phi, FProd):
        return _walk_labels(phi.left, tree[0]) + _walk_labels(phi.right, tree[1])
    if isinstance(phi, FArrow):
        if not functor_mentions_self(phi):
            return []
        raise EnumerationError("recursive occurrences under an arrow have no size")
    raise TypeError(phi)


def _project_tree(phi: Functor, tree, index: int):
    """Project recursive-position tuples to one component (for pair models)."""
    if isinstance(phi, FSelf):
        return tree[index]
    if isinstance(phi, FConst):
        return tree
    if isinstance(phi, FProd):
        return (_project_tree(phi.left, tree[0], index), _project_tree(phi.right, tree[1], index))
    if isinstance(phi, FArrow):
        if not functor_mentions_self(phi):
            return tree
        raise EnumerationError("recursive occurrences under an arrow have no size")
    raise TypeError(phi)


# ---------------------------------------------------------------------------
# Builtin size models


class SizeModel:
    name: str = "?"

    def __init__(self, datatype: str):
        self.datatype = datatype
        self.carrier: Carrier = NInfCarrier()
        self.strict_descent: bool = True
        self.warnings: list[str] = []

    def bind(self, table: "ModelTable") -> None:
        self.table = table
        self.decl = table.sig.decl(self.datatype)

    def size_of(self, unf: AbstractUnfolding):
        raise NotImplementedError

    def label_relevant(self) -> bool:
        return False

    def label_cap(self, bound):
        """The bound under which label carriers are enumerated (when relevant)."""
        return None

    def describe(self) -> str:
        return self.name


class CtorsModel(SizeModel):
    """Total count of this datatype's constructors in the value."""

    name = "ctors"

    def size_of(self, unf: AbstractUnfolding) -> NInf:
        phi = self.decl.functor_of(unf.ctor)
        return ONE + nsum(_walk_recursive(phi, unf.arg))


class LengthModel(SizeModel):
    """Count of recursive constructors along the (single) recursive chain."""

    name = "length"

    def bind(self, table: "ModelTable") -> None:
        super().bind(table)
        for cname, phi in self.decl.ctors:
            if len(_recursive_arity(phi)) > 1:
                raise ModelError(
                    f"length model requires at most one recursive position per "
                    f"constructor; {cname!r} has more"
                )

    def size_of(self, unf: AbstractUnfolding) -> NInf:
        phi = self.decl.functor_of(unf.ctor)
        rec = _walk_recursive(phi, unf.arg)
        if not rec:
            return ZERO
        return rec[0] + ONE


class NodesModel(SizeModel):
    """Count of constructors having at least one recursive position."""

    name = "nodes"

    def size_of(self, unf: AbstractUnfolding) -> NInf:
        phi = self.decl.functor_of(unf.ctor)
        rec = _walk_recursive(phi, unf.arg)
        if not rec:
            return ZERO
        return ONE + nsum(rec)


class HeightModel(SizeModel):
    name = "height"

    def size_of(self, unf: AbstractUnfolding) -> NInf:
        phi = self.decl.functor_of(unf.ctor)
        return ONE + nmax(_walk_recursive(phi, unf.arg))


class UnitsizeModel(SizeModel):
    """Every value has the same size; non-well-founded on recursive datatypes."""

    name = "unitsize"

    def __init__(self, datatype: str):
        super().__init__(datatype)
        self.carrier = OnePointCarrier()

    def size_of(self, unf: AbstractUnfolding):
        return ONEPOINT


class LabelmaxModel(SizeModel):
    """Join of constant-position label sizes; only meaningful inside pair."""

    name = "labelmax"

    def __init__(self, datatype: str, label_datatype: Optional[str] = None):
        super().__init__(datatype)
        self.label_datatype = label_datatype

    def size_of(self, unf: AbstractUnfolding) -> NInf:
        phi = self.decl.functor_of(unf.ctor)
        parts = list(_walk_recursive(phi, unf.arg))
        for dt, elem in _walk_labels(phi, unf.arg):
            if self.label_datatype is not None and dt != self.label_datatype:
                continue
            if not isinstance(elem, NInf):
                raise ModelError(
                    f"labelmax requires numeric label sizes; {dt!r} has a "
                    "non-numeric carrier"
                )
            parts.append(elem)
        return nmax(parts)

    def label_relevant(self) -> bool:
        return True

    def label_cap(self, bound):
        return bound


class PairModel(SizeModel):
    name = "pair"

    def __init__(self, datatype: str, sub0: SizeModel, sub1: SizeModel):
        super().__init__(datatype)
        self.subs = [sub0, sub1]
        self.carrier = TupleCarrier([sub0.carrier, sub1.carrier])

    def bind(self, table: "ModelTable") -> None:
        SizeModel.bind(self, table)
        for sub in self.subs:
            sub.bind(table)

    def size_of(self, unf: AbstractUnfolding):
        phi = self.decl.functor_of(unf.ctor)
        return tuple(
            sub.size_of(AbstractUnfolding(unf.ctor, _project_tree(phi, unf.arg, i)))
            for i, sub in enumerate(self.subs)
        )

    def label_relevant(self) -> bool:
        return any(sub.label_relevant() for sub in self.subs)

    def label_cap(self, bound):
        caps = [sub.label_cap(bound[i]) for i, sub in enumerate(self.subs)]
        caps = [c for c in caps if c is not None]
        if not caps:
            return None
        out = caps[0]
        for c in caps[1:]:
            out = out.max(c)
        return out

    def describe(self) -> str:
        return f"pair({self.subs[0].describe()}, {self.subs[1].describe()})"


class OrdinalModel(SizeModel):
    """Recognized in config files but not interpretable."""

    name = "ordinal"

    def bind(self, table: "ModelTable") -> None:
        super().bind(table)

    def size_of(self, unf: AbstractUnfolding):
        raise ModelError(
            "ordinal carriers are recognized but not interpretable; "
            "choose a finitary model"
        )


def _recursive_arity(phi: Functor) -> list[Functor]:
    if isinstance(phi, FSelf):
        return [phi]
    if isinstance(phi, FConst):
        return []
    if isinstance(phi, FProd):
        return _recursive_arity(phi.left) + _recursive_arity(phi.right)
    if isinstance(phi, FArrow):
        return _recursive_arity(phi.cod)
    raise TypeError(phi)


# ---------------------------------------------------------------------------
# Model tables and config loading


@dataclass
class ModelTable:
    sig: Signature
    models: dict[str, SizeModel] = field(default_factory=dict)
    semrec: set[str] = field(default_factory=set)
    axioms: dict[str, str] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    unfolding_cache: dict = field(default_factory=dict, repr=False)
    rec_cache: dict = field(default_factory=dict, repr=False)

    def model(self, datatype: str) -> SizeModel:
        return self.models[datatype]


def _make_model(datatype: str, spec: str) -> SizeModel:
    spec = spec.strip()
    if "(" in spec:
        head, _, rest = spec.partition("(")
        if not rest.endswith(")"):
            raise ModelError(f"malformed model spec {spec!r}")
        args = _split_args(rest[:-1])
    else:
        head, args = spec, []
    head = head.strip()
    if head == "ctors":
        _expect_args(spec, args, 0)
        return CtorsModel(datatype)
    if head == "length":
        _expect_args(spec, args, 0)
        return LengthModel(datatype)
    if head == "nodes":
        _expect_args(spec, args, 0)
        return NodesModel(datatype)
    if head == "height":
        _expect_args(spec, args, 0)
        return HeightModel(datatype)
    if head == "unitsize":
        _expect_args(spec, args, 0)
        return UnitsizeModel(datatype)
    if head == "labelmax":
        if len(args) > 1:
            raise ModelError(f"labelmax takes at most one argument, got {spec!r}")
        return LabelmaxModel(datatype, args[0] if args else None)
    if head == "pair":
        _expect_args(spec, args, 2)
        return PairModel(datatype, _make_model(datatype, args[0]), _make_model(datatype, args[1]))
    if head == "ordinal":
        return OrdinalModel(datatype)
    raise ModelError(f"unknown size model {head!r}")


def _expect_args(spec: str, args: list[str], n: int) -> None:
    if len(args) != n:
        raise ModelError(f"model spec {spec!r}: expected {n} argument(s), got {len(args)}")


def _split_args(text: str) -> list[str]:
    args, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            args.append("".join(cur))
            cur = []
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        cur.append(ch)
    if cur or args:
        args.append("".join(cur))
    return [a.strip() for a in args]


def load_models(text: str, sig: Signature) -> ModelTable:
    """Parse a model config; every datatype gets a model (default ctors)."""
    table = ModelTable(sig)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        kind = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        if kind == "model":
            name, sep, spec = rest.partition("=")
            name = name.strip()
            if not sep or not name or not spec.strip():
                raise ModelError(f"line {lineno}: expected 'model <datatype> = <builtin>'")
            if not sig.has_datatype(name):
                raise ModelError(f"line {lineno}: unknown datatype {name!r}")
            table.models[name] = _make_model(name, spec)
        elif kind == "axiom":
            name, sep, spec = rest.partition("=")
            name, spec = name.strip(), spec.strip()
            if not sep or spec != "length-quotient":
                raise ModelError(f"line {lineno}: expected 'axiom <datatype> = length-quotient'")
            if not sig.has_datatype(name):
                raise ModelError(f"line {lineno}: unknown datatype {name!r}")
            table.axioms[name] = spec
        elif kind == "semrec":
            name = rest.strip()
            if not sig.has_datatype(name):
                raise ModelError(f"line {lineno}: unknown datatype {name!r}")
            table.semrec.add(name)
        else:
            raise ModelError(f"line {lineno}: unknown directive {kind!r}")
    for decl in sig.decls:
        if decl.name not in table.models:
            table.models[decl.name] = CtorsModel(decl.name)
    for model in table.models.values():
        model.bind(table)
    for model in table.models.values():
        _validate_descent(table, model)
        table.warnings.extend(model.warnings)
    return table


def _validate_descent(table: ModelTable, model: SizeModel, probe: int = 3) -> None:
    """Empirically check strict descent on a small grid; downgrade on failure."""
    carrier = model.carrier
    if isinstance(model, OrdinalModel):
        model.strict_descent = False
        return
    try:
        bound = _finite_probe(carrier, probe)
        for unf in unfoldings(table, model.datatype, bound):
            phi = model.decl.functor_of(unf.ctor)
            size = model.size_of(unf)
            for sub in _walk_recursive(phi, unf.arg):
                if not carrier.lt(sub, size):
                    model.strict_descent = False
                    model.warnings.append(
                        f"model {model.describe()!r} for {model.datatype!r} is not "
                        f"well-founded: constructor {unf.ctor!r} admits a "
                        "substructure at least as large as the whole"
                    )
                    return
    except EnumerationError:
        # Positions we cannot enumerate cannot invalidate the check here;
        # interpretation will surface its own diagnostic if reached.
        pass


def _finite_probe(carrier: Carrier, n: int):
    if isinstance(carrier, NInfCarrier):
        return NInf(n)
    if isinstance(carrier, OnePointCarrier):
        return ONEPOINT
    if isinstance(carrier, TupleCarrier):
        return tuple(_finite_probe(c, n) for c in carrier.components)
    raise TypeError(carrier)


# ---------------------------------------------------------------------------
# Value abstraction and unfolding enumeration


def value_size(table: ModelTable, v) -> object:
    """Abstract a closed datatype value to its carrier element."""
    from .terms import Con

    if not isinstance(v, Con):
        raise ModelError("value_size expects a constructor value")
    decl = table.sig.ctor_datatype(v.ctor)
    if decl is None:
        raise ModelError(f"unknown constructor {v.ctor!r}")
    model = table.model(decl.name)
    phi = decl.functor_of(v.ctor)
    tree = _abstract_arg(table, model, phi, v.arg)
    return model.size_of(AbstractUnfolding(v.ctor, tree))


def _abstract_arg(table: ModelTable, model: SizeModel, phi: Functor, v):
    from .terms import Con, Pair

    if isinstance(phi, FSelf):
        return value_size(table, v)
    if isinstance(phi, FConst):
        if isinstance(phi.ty, TData):
            return value_size(table, v)
        return ONEPOINT
    if isinstance(phi, FProd):
        if not isinstance(v, Pair):
            raise ModelError("product position holds a non-pair value")
        return (
            _abstract_arg(table, model, phi.left, v.left),
            _abstract_arg(table, model, phi.right, v.right),
        )
    if isinstance(phi, FArrow):
        if functor_mentions_self(phi):
            raise ModelError(
                f"values of {model.datatype!r} hold recursive occurrences under "
                "an arrow; they cannot be abstracted to a size"
            )
        return ONEPOINT
    raise TypeError(phi)


def unfoldings(table: ModelTable, datatype: str, bound) -> list[AbstractUnfolding]:
    """All unfoldings z with size_of(z) ≤ bound (bound must be finite)."""
    key = (datatype, bound)
    cached = table.unfolding_cache.get(key)
    if cached is not None:
        return cached
    model = table.model(datatype)
    if not model.carrier.is_finite(bound):
        raise EnumerationError(f"infinite bound for datatype {datatype!r}")
    decl = model.decl
    out = []
    for cname, phi in decl.ctors:
        for tree in _enumerate_tree(table, model, phi, bound):
            unf = AbstractUnfolding(cname, tree)
            if model.carrier.leq(model.size_of(unf), bound):
                out.append(unf)
    table.unfolding_cache[key] = out
    return out


def _enumerate_tree(table: ModelTable, model: SizeModel, phi: Functor, bound) -> list:
    if isinstance(phi, FSelf):
        return model.carrier.enumerate_upto(bound)
    if isinstance(phi, FConst):
        if isinstance(phi.ty, TData):
            label_model = table.model(phi.ty.name)
            cap = model.label_cap(bound) if model.label_relevant() else None
            if cap is None:
                return [label_model.carrier.top]
            if isinstance(label_model.carrier, NInfCarrier):
                return label_model.carrier.enumerate_upto(cap)
            return label_model.carrier.enumerate_upto(label_model.carrier.top)
        return [ONEPOINT]
    if isinstance(phi, FProd):
        lefts = _enumerate_tree(table, model, phi.left, bound)
        rights = _enumerate_tree(table, model, phi.right, bound)
        return [(l, r) for l in lefts for r in rights]
    if isinstance(phi, FArrow):
        if not functor_mentions_self(phi):
            return [ONEPOINT]
        raise EnumerationError(
            f"recursive occurrences under an arrow in datatype "
            f"{model.datatype!r} are not finitely enumerable"
        )
    raise TypeError(phi)

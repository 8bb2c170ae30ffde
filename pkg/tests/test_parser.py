"""Parser: grammar coverage, sugar desugaring, printing round-trips."""

import pytest

from costrec.parser import (
    ParseError,
    expr_to_text,
    parse_expr,
    parse_program,
    parse_type,
    type_to_text,
)
from costrec.terms import (
    App,
    Con,
    Delay,
    FArrow,
    FConst,
    FProd,
    FSelf,
    Force,
    Lam,
    Let,
    Map,
    Pair,
    Rec,
    Split,
    TArrow,
    TData,
    TProd,
    TSusp,
    TUnit,
    Unit,
    Var,
    alpha_eq,
)

from conftest import CORPUS, program_text
from termgen import TermGen


def test_types_arrow_right_associative():
    ty = parse_type("nat -> nat -> nat")
    assert ty == TArrow(TData("nat"), TArrow(TData("nat"), TData("nat")))


def test_types_prod_binds_tighter_than_arrow():
    ty = parse_type("nat * nat -> nat")
    assert ty == TArrow(TProd(TData("nat"), TData("nat")), TData("nat"))


def test_types_susp_prefix():
    assert parse_type("susp unit") == TSusp(TUnit())
    assert parse_type("susp nat * unit") == TProd(TSusp(TData("nat")), TUnit())


def test_unit_literal_and_con_sugar():
    assert parse_expr("()") == Unit()
    assert parse_expr("Zero()") == Con("Zero", Unit())
    assert parse_expr("Zero( )") == Con("Zero", Unit())
    assert parse_expr("Cons(x, Nil())") == Con(
        "Cons", Pair(Var("x"), Con("Nil", Unit()))
    )


def test_tuple_sugar_folds_right():
    assert parse_expr("(a, b, c)") == Pair(Var("a"), Pair(Var("b"), Var("c")))


def test_application_left_associative():
    assert parse_expr("f a b") == App(App(Var("f"), Var("a")), Var("b"))


def test_prefix_forms_extend_maximally():
    e = parse_expr("fn x. f x")
    assert e == Lam("x", App(Var("f"), Var("x")))
    e = parse_expr("let y = f x in g y")
    assert e == Let(App(Var("f"), Var("x")), "y", App(Var("g"), Var("y")))


def test_delay_force_take_application_chains():
    assert parse_expr("delay f x") == Delay(App(Var("f"), Var("x")))
    assert parse_expr("force r x") == Force(App(Var("r"), Var("x")))
    assert parse_expr("(force r) x") == App(Force(Var("r")), Var("x"))


def test_split_and_rec():
    e = parse_expr("split p as (a, b) in a")
    assert e == Split(Var("p"), "a", "b", Var("a"))
    e = parse_expr("rec(n; Zero -> u. x | Succ -> p. y)")
    assert isinstance(e, Rec)
    assert [b.ctor for b in e.branches] == ["Zero", "Succ"]


def test_branch_tuple_pattern_desugars_to_split():
    e = parse_expr("rec(n; Zero -> u. u | Succ -> (p, r). force r)")
    branch = e.branches[1]
    assert isinstance(branch.body, Split)
    assert branch.body.body == Force(Var(branch.body.x1))


def test_map_syntax():
    e = parse_expr("map[nat * self](x. x; t)")
    assert e == Map(
        FProd(FConst(TData("nat")), FSelf()), "x", Var("x"), Var("t")
    )
    e = parse_expr("map[unit -> self](x. x; t)")
    assert e.functor == FArrow(TUnit(), FSelf())


def test_self_in_arrow_domain_rejected():
    with pytest.raises(ParseError):
        parse_program("datatype bad = C of self -> unit;")


def test_parse_errors_carry_location():
    with pytest.raises(ParseError) as info:
        parse_program("datatype t = ;")
    assert info.value.line == 1


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_parses(name):
    program = parse_program(program_text(name))
    assert program.defs


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_defs_roundtrip(name):
    program = parse_program(program_text(name))
    for d in program.defs:
        text = expr_to_text(d.body)
        assert alpha_eq(parse_expr(text), d.body), d.name


def test_generated_terms_roundtrip():
    program = parse_program(program_text("listmap.src"))
    gen = TermGen(program.signature, seed=11)
    for _ in range(200):
        e, _ = gen.closed(3)
        assert alpha_eq(parse_expr(expr_to_text(e)), e)


def test_type_printing_roundtrips():
    program = parse_program(program_text("listmap.src"))
    gen = TermGen(program.signature, seed=12)
    for _ in range(100):
        ty = gen.some_type(3)
        assert parse_type(type_to_text(ty)) == ty

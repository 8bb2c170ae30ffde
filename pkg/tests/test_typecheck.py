"""Typechecker: signature well-formedness, bidirectional rules, corpus."""

import pytest

from costrec.parser import parse_expr, parse_program, parse_type
from costrec.terms import TArrow, TData, TProd, TSusp, TUnit
from costrec.typecheck import (
    TypeCheckError,
    typecheck,
    typecheck_program,
    wf_signature,
)

from conftest import CORPUS, program_text
from termgen import TermGen


def sig_of(text: str):
    return parse_program(text).signature


def test_wf_accepts_stratified_signature():
    sig = sig_of(
        "datatype nat = Zero of unit | Succ of self;"
        "datatype list = Nil of unit | Cons of nat * self;"
    )
    assert wf_signature(sig) == []


def test_wf_rejects_forward_reference():
    sig = sig_of(
        "datatype list = Nil of unit | Cons of nat * self;"
        "datatype nat = Zero of unit | Succ of self;"
    )
    assert wf_signature(sig)


def test_wf_rejects_duplicate_datatype():
    sig = sig_of("datatype t = A of unit; datatype t = B of unit;")
    assert wf_signature(sig)


def test_wf_rejects_duplicate_constructor():
    sig = sig_of("datatype t = A of unit | A of self;")
    assert wf_signature(sig)


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_typechecks(name):
    program = parse_program(program_text(name))
    types = typecheck_program(program)
    assert set(types) == {d.name for d in program.defs}


def test_annotations_are_enforced():
    text = "datatype nat = Zero of unit | Succ of self;\ndef bad : nat = ();"
    with pytest.raises(TypeCheckError):
        typecheck_program(parse_program(text))


def test_def_context_accumulates():
    text = (
        "datatype nat = Zero of unit | Succ of self;"
        "def one : nat = Succ(Zero());"
        "def two : nat = Succ(one);"
    )
    types = typecheck_program(parse_program(text))
    assert types["two"] == TData("nat")


NAT = "datatype nat = Zero of unit | Succ of self;"


def check(sigtext, exprtext, tytext=None, ctx=()):
    sig = sig_of(sigtext)
    expected = parse_type(tytext) if tytext else None
    return typecheck(sig, dict(ctx), parse_expr(exprtext), expected)


def test_lambda_checks_against_arrow():
    assert check(NAT, "fn x. x", "nat -> nat") == parse_type("nat -> nat")


def test_lambda_does_not_synthesize():
    with pytest.raises(TypeCheckError):
        check(NAT, "fn x. x")


def test_application_synthesizes():
    ctx = {"f": parse_type("nat -> nat")}
    assert check(NAT, "f (Zero())", ctx=ctx) == TData("nat")


def test_application_argument_mismatch():
    ctx = {"f": parse_type("nat -> nat")}
    with pytest.raises(TypeCheckError):
        check(NAT, "f ()", ctx=ctx)


def test_susp_delay_force():
    assert check(NAT, "delay Zero()") == TSusp(TData("nat"))
    ctx = {"s": TSusp(TData("nat"))}
    assert check(NAT, "force s", ctx=ctx) == TData("nat")
    with pytest.raises(TypeCheckError):
        check(NAT, "force Zero()")


def test_split_requires_product():
    assert check(NAT, "split ((), Zero()) as (a, b) in b") == TData("nat")
    with pytest.raises(TypeCheckError):
        check(NAT, "split Zero() as (a, b) in a")


def test_rec_branch_variable_type():
    # in the Succ branch the variable holds (predecessor, suspended result)
    e = "rec(Zero(); Zero -> u. () | Succ -> p. split p as (y, r) in force r)"
    assert check(NAT, e, "unit") == TUnit()


def test_rec_requires_all_branches():
    with pytest.raises(TypeCheckError):
        check(NAT, "rec(Zero(); Zero -> u. ())", "unit")


def test_rec_branch_result_types_must_agree():
    with pytest.raises(TypeCheckError):
        check(NAT, "rec(Zero(); Zero -> u. () | Succ -> p. Zero())", "unit")


def test_map_solves_slot_from_target():
    sig = NAT + "datatype list = Nil of unit | Cons of nat * self;"
    ctx = {"t": parse_type("nat * unit")}
    got = check(sig, "map[nat * self](x. (x, x); t)", ctx=ctx)
    assert got == TProd(TData("nat"), TProd(TUnit(), TUnit()))


def test_map_requires_value_forms():
    ctx = {"t": TUnit(), "f": parse_type("unit -> unit")}
    with pytest.raises(TypeCheckError):
        check(NAT, "map[self](x. f x; t)", ctx=ctx)
    with pytest.raises(TypeCheckError):
        check(NAT, "map[self](x. x; f t)", ctx=ctx)


def test_generated_terms_typecheck():
    program = parse_program(program_text("treemap.src"))
    gen = TermGen(program.signature, seed=3)
    for _ in range(300):
        e, ty = gen.closed(3)
        assert typecheck(program.signature, {}, e, ty) == ty

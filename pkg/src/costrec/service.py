"""HTTP service for the toolchain.

Each endpoint wraps one core operation.  Programs and model configurations
are sent inline as text; responses carry `ok` plus either the result fields
or an `error` message, so a thin client can render them uniformly.
"""

from __future__ import annotations

from typing import List, Optional

from fastapi import FastAPI
from pydantic import BaseModel

from .complexity import CTypeError, c_parse_expr, c_to_text
from .harness import BoundReport, GenConfig, GenerationError, check_bound, tabulate
from .interp import InterpError, as_cost, interp, render, sem_proj
from .opsem import EvalError, evaluate
from .parser import ParseError, expr_to_text, parse_expr, parse_program, type_to_text
from .preorder import AxiomSet, NormalizeError, cost_literal, leq, normalize
from .sizes import EnumerationError, ModelError, load_models
from .terms import Program, Var, inline_defs
from .translate import translate, translate_expr, translate_sig
from .typecheck import TypeCheckError, typecheck, typecheck_program

_CORE_ERRORS = (
    ParseError,
    TypeCheckError,
    CTypeError,
    EvalError,
    NormalizeError,
    ModelError,
    EnumerationError,
    InterpError,
    GenerationError,
)


# ---------------------------------------------------------------------------
# Schemas


class CheckRequest(BaseModel):
    program: str


class DefInfo(BaseModel):
    name: str
    type: str


class CheckResponse(BaseModel):
    ok: bool
    defs: List[DefInfo] = []
    error: Optional[str] = None


class EvalRequest(BaseModel):
    program: str
    expr: str
    trace: bool = False


class EvalResponse(BaseModel):
    ok: bool
    value: Optional[str] = None
    cost: Optional[int] = None
    trace: Optional[List[str]] = None
    error: Optional[str] = None


class TranslateRequest(BaseModel):
    program: str
    expr: str


class TranslateResponse(BaseModel):
    ok: bool
    term: Optional[str] = None
    type: Optional[str] = None
    error: Optional[str] = None


class NormalizeRequest(BaseModel):
    program: str
    expr: str


class NormalizeResponse(BaseModel):
    ok: bool
    term: Optional[str] = None
    cost: Optional[int] = None
    error: Optional[str] = None


class InterpRequest(BaseModel):
    program: str
    expr: str
    model: str = ""


class InterpResponse(BaseModel):
    ok: bool
    cost: Optional[str] = None
    potential: Optional[str] = None
    warnings: List[str] = []
    error: Optional[str] = None


class TabulateRequest(BaseModel):
    program: str
    def_name: str
    model: str = ""
    lo: int = 0
    hi: int = 5


class TabRowOut(BaseModel):
    size: int
    cost: str
    potential: str


class TabulateResponse(BaseModel):
    ok: bool
    rows: List[TabRowOut] = []
    error: Optional[str] = None


class VerifyRequest(BaseModel):
    program: str
    def_name: Optional[str] = None
    model: str = ""
    max_size: int = 5
    samples: int = 20
    seed: int = 0


class VerifyCaseOut(BaseModel):
    index: int
    inputs: List[str]
    op_cost: int
    den_cost: str
    cost_ok: bool
    value_ok: bool
    sampled: bool
    passed: bool


class VerifyReportOut(BaseModel):
    def_name: str
    seed: int
    cases: List[VerifyCaseOut] = []
    n_pass: int = 0
    n_fail: int = 0
    error: Optional[str] = None
    passed: bool = False


class VerifyResponse(BaseModel):
    ok: bool
    reports: List[VerifyReportOut] = []
    error: Optional[str] = None


class LeqRequest(BaseModel):
    program: str
    left: str
    right: str
    axioms: str = ""


class LeqResponse(BaseModel):
    ok: bool
    derivable: Optional[bool] = None
    error: Optional[str] = None


# ---------------------------------------------------------------------------
# Handlers (shared by the HTTP endpoints and the CLI)


def do_check(req: CheckRequest) -> CheckResponse:
    try:
        program = parse_program(req.program)
        types = typecheck_program(program)
    except _CORE_ERRORS as exc:
        return CheckResponse(ok=False, error=str(exc))
    defs = [DefInfo(name=d.name, type=type_to_text(types[d.name])) for d in program.defs]
    return CheckResponse(ok=True, defs=defs)


def _closed_expr(program: Program, text: str):
    """Parse and type the expression (definitions in scope), then inline."""
    e = parse_expr(text)
    types = typecheck_program(program)
    ty = typecheck(program.signature, types, e)
    return inline_defs(program, e), ty


def do_eval(req: EvalRequest) -> EvalResponse:
    try:
        program = parse_program(req.program)
        typecheck_program(program)
        e, _ = _closed_expr(program, req.expr)
        result = evaluate(program.signature, e, trace=req.trace)
    except _CORE_ERRORS as exc:
        return EvalResponse(ok=False, error=str(exc))
    trace = None
    if result.trace is not None:
        trace = [f"{rule}+{delta}" for rule, delta in result.trace]
    return EvalResponse(
        ok=True, value=expr_to_text(result.value), cost=result.cost, trace=trace
    )


def do_translate(req: TranslateRequest) -> TranslateResponse:
    try:
        program = parse_program(req.program)
        typecheck_program(program)
        e, ty = _closed_expr(program, req.expr)
        out = translate(program, e, ty)
    except _CORE_ERRORS as exc:
        return TranslateResponse(ok=False, error=str(exc))
    return TranslateResponse(ok=True, term=c_to_text(out.cexpr), type=str(out.ctype))


def do_normalize(req: NormalizeRequest) -> NormalizeResponse:
    try:
        program = parse_program(req.program)
        typecheck_program(program)
        e, _ = _closed_expr(program, req.expr)
        csig = translate_sig(program.signature)
        nf = normalize(csig, translate_expr(program.signature, e))
    except _CORE_ERRORS as exc:
        return NormalizeResponse(ok=False, error=str(exc))
    return NormalizeResponse(ok=True, term=c_to_text(nf), cost=cost_literal(nf))


def do_interp(req: InterpRequest) -> InterpResponse:
    try:
        program = parse_program(req.program)
        typecheck_program(program)
        table = load_models(req.model, program.signature)
        e, _ = _closed_expr(program, req.expr)
        den = interp(table, {}, translate_expr(program.signature, e))
        cost = as_cost(sem_proj(0, den))
        pot = sem_proj(1, den)
    except _CORE_ERRORS as exc:
        return InterpResponse(ok=False, error=str(exc))
    return InterpResponse(
        ok=True, cost=str(cost), potential=render(table, pot), warnings=table.warnings
    )


def do_tabulate(req: TabulateRequest) -> TabulateResponse:
    try:
        program = parse_program(req.program)
        table = load_models(req.model, program.signature)
        rows = tabulate(program, req.def_name, table, req.lo, req.hi)
    except _CORE_ERRORS as exc:
        return TabulateResponse(ok=False, error=str(exc))
    except KeyError as exc:
        return TabulateResponse(ok=False, error=f"unknown definition {exc.args[0]!r}")
    return TabulateResponse(
        ok=True,
        rows=[TabRowOut(size=r.size, cost=str(r.cost), potential=r.potential) for r in rows],
    )


def _report_out(report: BoundReport) -> VerifyReportOut:
    return VerifyReportOut(
        def_name=report.def_name,
        seed=report.seed,
        cases=[
            VerifyCaseOut(
                index=c.index,
                inputs=c.inputs,
                op_cost=c.op_cost,
                den_cost=str(c.den_cost),
                cost_ok=c.cost_ok,
                value_ok=c.value_ok,
                sampled=c.sampled,
                passed=c.passed,
            )
            for c in report.cases
        ],
        n_pass=report.n_pass,
        n_fail=report.n_fail,
        error=report.error,
        passed=report.passed,
    )


def do_verify(req: VerifyRequest) -> VerifyResponse:
    try:
        program = parse_program(req.program)
        typecheck_program(program)
        table = load_models(req.model, program.signature)
    except _CORE_ERRORS as exc:
        return VerifyResponse(ok=False, error=str(exc))
    if req.def_name is not None:
        names = [req.def_name]
        if not any(d.name == req.def_name for d in program.defs):
            return VerifyResponse(ok=False, error=f"unknown definition {req.def_name!r}")
    else:
        names = [d.name for d in program.defs]
    cfg = GenConfig(max_size=req.max_size, samples=req.samples, seed=req.seed)
    reports = [check_bound(program, name, table, cfg) for name in names]
    return VerifyResponse(
        ok=all(r.passed for r in reports), reports=[_report_out(r) for r in reports]
    )


def do_leq(req: LeqRequest) -> LeqResponse:
    try:
        program = parse_program(req.program)
        typecheck_program(program)
        csig = translate_sig(program.signature)
        left = c_parse_expr(req.left)
        right = c_parse_expr(req.right)
        axioms = AxiomSet()
        if req.axioms:
            axioms = AxiomSet.from_table(load_models(req.axioms, program.signature))
        derivable = leq(csig, axioms, left, right)
    except _CORE_ERRORS as exc:
        return LeqResponse(ok=False, error=str(exc))
    return LeqResponse(ok=True, derivable=derivable)


# ---------------------------------------------------------------------------
# Application


app = FastAPI(title="costrec", version="0.1.0")


@app.post("/check", response_model=CheckResponse)
def check_endpoint(req: CheckRequest) -> CheckResponse:
    return do_check(req)


@app.post("/eval", response_model=EvalResponse)
def eval_endpoint(req: EvalRequest) -> EvalResponse:
    return do_eval(req)


@app.post("/translate", response_model=TranslateResponse)
def translate_endpoint(req: TranslateRequest) -> TranslateResponse:
    return do_translate(req)


@app.post("/normalize", response_model=NormalizeResponse)
def normalize_endpoint(req: NormalizeRequest) -> NormalizeResponse:
    return do_normalize(req)


@app.post("/interp", response_model=InterpResponse)
def interp_endpoint(req: InterpRequest) -> InterpResponse:
    return do_interp(req)


@app.post("/tabulate", response_model=TabulateResponse)
def tabulate_endpoint(req: TabulateRequest) -> TabulateResponse:
    return do_tabulate(req)


@app.post("/verify", response_model=VerifyResponse)
def verify_endpoint(req: VerifyRequest) -> VerifyResponse:
    return do_verify(req)


@app.post("/leq", response_model=LeqResponse)
def leq_endpoint(req: LeqRequest) -> LeqResponse:
    return do_leq(req)

"""HTTP service: one round-trip per endpoint plus error reporting."""

import pytest
from fastapi.testclient import TestClient

from costrec.service import app

from conftest import MODELS, program_text


client = TestClient(app)

LISTPROG = program_text("listmap.src")
MEMPROG = program_text("mem.src")
IDNATPROG = program_text("idnat.src")


def post(path, **payload):
    r = client.post(path, json=payload)
    assert r.status_code == 200, r.text
    return r.json()


def test_check_lists_defs_with_types():
    out = post("/check", program=LISTPROG)
    assert out["ok"]
    names = {d["name"] for d in out["defs"]}
    assert "listmap" in names and "main" in names


def test_check_reports_type_errors():
    bad = "datatype nat = Zero of unit | Succ of self;\ndef x : nat = ();"
    out = post("/check", program=bad)
    assert not out["ok"] and out["error"]


def test_eval_returns_value_and_cost():
    out = post("/eval", program=MEMPROG, expr="main")
    assert out["ok"]
    assert out["cost"] == 10
    assert out["value"] in ("True()", "False()")


def test_eval_trace_sums_to_cost():
    out = post("/eval", program=IDNATPROG, expr="main", trace=True)
    assert out["ok"]
    deltas = [int(line.rsplit("+", 1)[1]) for line in out["trace"]]
    assert sum(deltas) == out["cost"]


def test_eval_parse_error():
    out = post("/eval", program=LISTPROG, expr="fn x.")
    assert not out["ok"] and out["error"]


def test_translate_emits_complexity_term_and_type():
    out = post("/translate", program=LISTPROG, expr="main")
    assert out["ok"]
    assert out["term"].startswith("(")
    assert out["type"] == "(C * list)"


def test_normalize_returns_exact_cost():
    out = post("/normalize", program=MEMPROG, expr="main")
    assert out["ok"] and out["cost"] == 10


def test_interp_returns_semantic_cost():
    models = (MODELS / "nodes.cfg").read_text()
    out = post("/interp", program=MEMPROG, expr="main", model=models)
    assert out["ok"]
    assert out["cost"].isdigit() or out["cost"] == "inf"


def test_interp_surfaces_model_warnings():
    out = post("/interp", program=IDNATPROG, expr="main", model="model nat = unitsize")
    assert out["ok"]
    assert any("well-founded" in w for w in out["warnings"])


def test_tabulate_mem_rows():
    models = (MODELS / "nodes.cfg").read_text()
    out = post("/tabulate", program=MEMPROG, def_name="mem", model=models, lo=0, hi=2)
    assert out["ok"]
    assert [r["cost"] for r in out["rows"]] == ["1", "8", "15"]
    assert [r["size"] for r in out["rows"]] == [0, 1, 2]


def test_tabulate_unknown_def():
    out = post("/tabulate", program=MEMPROG, def_name="nope")
    assert not out["ok"] and "nope" in out["error"]


def test_verify_single_def_passes():
    out = post(
        "/verify",
        program=LISTPROG,
        def_name="listmap",
        model="model list = length\nmodel nat = ctors",
        max_size=3,
        samples=10,
        seed=4,
    )
    assert out["ok"]
    (report,) = out["reports"]
    assert report["passed"] and report["n_fail"] == 0


def test_verify_all_defs_by_default():
    out = post("/verify", program=IDNATPROG, max_size=3, samples=8)
    assert out["ok"]
    assert {r["def_name"] for r in out["reports"]} == {"id", "main"}


def test_leq_with_length_quotient_axioms():
    axioms = (MODELS / "length.cfg").read_text()
    out = post(
        "/leq",
        program=LISTPROG,
        left="Nil()",
        right="Cons((Zero(), Nil()))",
        axioms=axioms,
    )
    assert out["ok"] and out["derivable"] is True


def test_leq_not_derived_without_axioms():
    out = post("/leq", program=LISTPROG, left="1", right="2")
    assert out["ok"] and out["derivable"] is False


def test_leq_malformed_term():
    out = post("/leq", program=LISTPROG, left="fst", right="0")
    assert not out["ok"] and out["error"]

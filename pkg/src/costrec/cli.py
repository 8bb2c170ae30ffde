"""Command-line entry point.

A thin client over the service handlers: each subcommand reads its files,
builds the corresponding request, and renders the response as one
`key=value` record per line (`inf` for infinite costs).  Exit codes: 0 on
success or all-pass, 1 on any failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import service


def _read(path: str, parser: argparse.ArgumentParser) -> str:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        parser.error(str(exc))
        raise AssertionError  # parser.error exits


def _parse_range(text: str, parser: argparse.ArgumentParser) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep or not lo.isdigit() or not hi.isdigit():
        parser.error(f"bad range {text!r}, expected LO..HI")
    return int(lo), int(hi)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="costrec",
        description="Recurrence extraction for a higher-order language "
        "with inductive datatypes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and typecheck a program")
    p.add_argument("file")

    p = sub.add_parser("eval", help="evaluate an expression, reporting its cost")
    p.add_argument("file")
    p.add_argument("-e", "--expr", required=True)
    p.add_argument("--trace", action="store_true")

    p = sub.add_parser("translate", help="translate an expression to the complexity language")
    p.add_argument("file")
    p.add_argument("-e", "--expr", required=True)

    p = sub.add_parser("normalize", help="translate and normalize an expression")
    p.add_argument("file")
    p.add_argument("-e", "--expr", required=True)

    p = sub.add_parser("interp", help="interpret a translated expression under size models")
    p.add_argument("file")
    p.add_argument("-e", "--expr", required=True)
    p.add_argument("--model", default=None, help="model configuration file")

    p = sub.add_parser("tabulate", help="tabulate a definition's denoted cost over sizes")
    p.add_argument("file")
    p.add_argument("-f", "--def", dest="def_name", required=True)
    p.add_argument("--model", default=None, help="model configuration file")
    p.add_argument("--range", default="0..5", help="size grid LO..HI")

    p = sub.add_parser("verify", help="empirically check the bounding theorem")
    p.add_argument("file")
    p.add_argument("-f", "--def", dest="def_name", default=None)
    p.add_argument("--model", default=None, help="model configuration file")
    p.add_argument("--max-size", type=int, default=5)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("leq", help="derive an inequality between complexity terms")
    p.add_argument("file")
    p.add_argument("-l", "--left", required=True)
    p.add_argument("-r", "--right", required=True)
    p.add_argument("--axioms", default=None, help="model configuration file with axioms")

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    program = _read(args.file, parser)

    if args.command == "check":
        resp = service.do_check(service.CheckRequest(program=program))
        if not resp.ok:
            print(f"error={resp.error}")
            return 1
        for d in resp.defs:
            print(f"def={d.name} type={d.type}")
        return 0

    if args.command == "eval":
        resp = service.do_eval(
            service.EvalRequest(program=program, expr=args.expr, trace=args.trace)
        )
        if not resp.ok:
            print(f"error={resp.error}")
            return 1
        if resp.trace is not None:
            for step in resp.trace:
                print(f"step={step}")
        print(f"value={resp.value} cost={resp.cost}")
        return 0

    if args.command == "translate":
        resp = service.do_translate(
            service.TranslateRequest(program=program, expr=args.expr)
        )
        if not resp.ok:
            print(f"error={resp.error}")
            return 1
        print(f"type={resp.type}")
        print(f"term={resp.term}")
        return 0

    if args.command == "normalize":
        resp = service.do_normalize(
            service.NormalizeRequest(program=program, expr=args.expr)
        )
        if not resp.ok:
            print(f"error={resp.error}")
            return 1
        cost = resp.cost if resp.cost is not None else "?"
        print(f"cost={cost}")
        print(f"term={resp.term}")
        return 0

    if args.command == "interp":
        model = _read(args.model, parser) if args.model else ""
        resp = service.do_interp(
            service.InterpRequest(program=program, expr=args.expr, model=model)
        )
        if not resp.ok:
            print(f"error={resp.error}")
            return 1
        for w in resp.warnings:
            print(f"warning={w}")
        print(f"cost={resp.cost} potential={resp.potential}")
        return 0

    if args.command == "tabulate":
        model = _read(args.model, parser) if args.model else ""
        lo, hi = _parse_range(args.range, parser)
        resp = service.do_tabulate(
            service.TabulateRequest(
                program=program, def_name=args.def_name, model=model, lo=lo, hi=hi
            )
        )
        if not resp.ok:
            print(f"error={resp.error}")
            return 1
        for row in resp.rows:
            print(f"size={row.size} cost={row.cost} potential={row.potential}")
        return 0

    if args.command == "verify":
        model = _read(args.model, parser) if args.model else ""
        resp = service.do_verify(
            service.VerifyRequest(
                program=program,
                def_name=args.def_name,
                model=model,
                max_size=args.max_size,
                samples=args.samples,
                seed=args.seed,
            )
        )
        if not resp.ok and resp.error is not None:
            print(f"error={resp.error}")
            return 1
        failed = False
        for report in resp.reports:
            if report.error is not None:
                print(f"def={report.def_name} status=error error={report.error}")
                failed = True
                continue
            for c in report.cases:
                status = "pass" if c.passed else "fail"
                inputs = ";".join(c.inputs)
                print(
                    f"def={report.def_name} case={c.index} input={inputs} "
                    f"cost={c.op_cost} bound={c.den_cost} status={status}"
                )
            print(
                f"def={report.def_name} pass={report.n_pass} fail={report.n_fail} "
                f"seed={report.seed}"
            )
            failed = failed or not report.passed
        return 1 if failed else 0

    if args.command == "leq":
        axioms = _read(args.axioms, parser) if args.axioms else ""
        resp = service.do_leq(
            service.LeqRequest(
                program=program, left=args.left, right=args.right, axioms=axioms
            )
        )
        if not resp.ok:
            print(f"error={resp.error}")
            return 1
        print(f"result={'derivable' if resp.derivable else 'not-derived'}")
        return 0 if resp.derivable else 1

    parser.error(f"unknown command {args.command!r}")
    raise AssertionError


if __name__ == "__main__":
    sys.exit(main())

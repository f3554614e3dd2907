"""Command-line frontend: solve, check-proof, bench, gen.

Exit codes: 0 for any completed verdict (including a rejected proof check),
1 for usage or parse errors, 2 for internal errors.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

from .gen import FAMILIES, generate
from .kernel import Config, solve
from .parser import (
    Script,
    SortError,
    UndeclaredSymbol,
    UnsupportedCommand,
    parse,
)
from .printer import term_sexpr, value_sexpr
from .proofio import (
    ProofFormatError,
    check_resolution,
    export_resolution,
    read_proof,
    read_resolution,
    write_proof,
    write_resolution,
)
from .proofs import check
from .sexpr import ScriptSyntaxError
from .terms import EUF_T

_USAGE_ERRORS = (
    ScriptSyntaxError,
    SortError,
    UndeclaredSymbol,
    UnsupportedCommand,
    ProofFormatError,
    FileNotFoundError,
    IsADirectoryError,
    ValueError,
)


def _model_text(verdict, problem) -> str:
    lines = ["(model"]
    for t in problem.basis():
        if t.head.owner != EUF_T:
            continue
        v = verdict.model.get(t)
        if v is not None:
            lines.append(f"  (define {term_sexpr(t)} {value_sexpr(v)})")
    lines.append(")")
    return "\n".join(lines)


def _solve_file(args) -> int:
    text = Path(args.file).read_text()
    script = parse(text)
    trace_fh = open(args.trace, "w") if args.trace else None
    try:
        cfg = Config(
            max_steps=args.max_steps,
            proof_mode=args.mode,
            trace=trace_fh,
        )
        verdict = solve(script.problem, cfg)
    finally:
        if trace_fh:
            trace_fh.close()
    print(verdict.status)
    if verdict.status == "sat" and script.wants_model:
        print(_model_text(verdict, script.problem))
    wants_proof = script.wants_proof or bool(args.proof_out)
    if verdict.status == "unsat" and wants_proof and args.proof_format != "none":
        if args.mode == "lcf":
            print("lcf mode keeps no proof object; rerun with --mode proof-terms",
                  file=sys.stderr)
        elif args.proof_out:
            if args.proof_format == "cdsat":
                Path(args.proof_out).write_text(
                    write_proof(verdict.refutation, script.problem)
                )
            else:
                rp = export_resolution(verdict.refutation, script.problem)
                Path(args.proof_out).write_text(write_resolution(rp))
    return 0


def _check_proof(args) -> int:
    script = parse(Path(args.problem).read_text())
    text = Path(args.proof).read_text()
    try:
        if text.lstrip().startswith("("):
            root = read_proof(text, script.problem)
            report = check(root, script.problem)
        else:
            rp = read_resolution(text, script.problem)
            report = check_resolution(rp, script.problem)
    except ProofFormatError as e:
        print("rejected")
        print(f"reason: {e}")
        return 0
    if report.ok:
        print("accepted")
    else:
        print("rejected")
        print(f"reason: {report.reason}")
        if report.node is not None:
            print(f"node: {type(report.node).__name__} concluding {report.node.concl}")
    return 0


def _bench(args) -> int:
    rows = []
    files = sorted(Path(args.dir).glob("*.smt2"))
    if not files:
        raise ValueError(f"no .smt2 files under {args.dir}")
    for f in files:
        script = parse(f.read_text())
        t0 = time.perf_counter()
        verdict = solve(script.problem, Config(proof_mode="proof-terms"))
        millis = int((time.perf_counter() - t0) * 1000)
        proof_checked = False
        if verdict.status == "unsat":
            proof_checked = bool(check(verdict.refutation, script.problem))
        rows.append(
            {
                "file": f.name,
                "verdict": verdict.status,
                "steps": verdict.stats.steps,
                "decisions": verdict.stats.decisions,
                "conflicts": verdict.stats.conflicts,
                "proof_checked": str(proof_checked).lower(),
                "wall_millis": millis,
            }
        )
        print(
            f"{f.name}\t{verdict.status}\t{verdict.stats.steps}\t{millis}ms"
        )
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(
                fh,
                fieldnames=[
                    "file",
                    "verdict",
                    "steps",
                    "decisions",
                    "conflicts",
                    "proof_checked",
                    "wall_millis",
                ],
            )
            w.writeheader()
            w.writerows(rows)
    return 0


def _gen(args) -> int:
    paths = generate(args.family, args.seed, args.count, args.out)
    for p in paths:
        print(p)
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="trailsmt")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve an .smt2 script")
    s.add_argument("file")
    s.add_argument("--proof-format", choices=["none", "cdsat", "res"], default="cdsat")
    s.add_argument("--mode", choices=["proof-terms", "lcf"], default="proof-terms")
    s.add_argument("--proof-out")
    s.add_argument("--trace")
    s.add_argument("--max-steps", type=int, default=100000)
    s.set_defaults(fn=_solve_file)

    c = sub.add_parser("check-proof", help="check a proof file against a problem")
    c.add_argument("problem")
    c.add_argument("proof")
    c.set_defaults(fn=_check_proof)

    b = sub.add_parser("bench", help="solve every .smt2 file in a directory")
    b.add_argument("dir")
    b.add_argument("--csv")
    b.set_defaults(fn=_bench)

    g = sub.add_parser("gen", help="generate seeded random problems")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--family", choices=list(FAMILIES), required=True)
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--out", required=True)
    g.set_defaults(fn=_gen)
    return ap


def main(argv=None) -> int:
    ap = build_arg_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except _USAGE_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001 - internal failure boundary
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Walk through the difference between assigning a value to a term and
asserting equality with a constant symbol.

``(assign x 3)`` makes 3 a value attached to x; ``(assert (= x 3))`` makes 3
a constant symbol of the input language. The pair {x<-3, (x=4)<-true} is
refutable, and the refutation carries x<-3 as a hypothesis rather than a
clause.
"""

from __future__ import annotations

import io
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from trailsmt.kernel import Config, solve
from trailsmt.parser import parse
from trailsmt.proofio import export_resolution, write_proof, write_resolution
from trailsmt.proofs import check

SCRIPT = """\
(set-logic QF_LRA)
(declare-const x Real)
(assign x 3)
(assert (= x 4))
(check-sat)
(get-proof)
"""


def main() -> int:
    print("input script:")
    print(SCRIPT)
    script = parse(SCRIPT)
    trace = io.StringIO()
    verdict = solve(script.problem, Config(trace=trace))
    print(f"verdict: {verdict.status}")
    print("\ntrail trace:")
    print(trace.getvalue())
    report = check(verdict.refutation, script.problem)
    print(f"independent checker: {'accepted' if report.ok else 'rejected'}")
    print("\nproof term:")
    print(write_proof(verdict.refutation, script.problem))
    res = export_resolution(verdict.refutation, script.problem, checked=report.ok)
    print("resolution export (note the global hypothesis line):")
    print(write_resolution(res))
    return 0


if __name__ == "__main__":
    sys.exit(main())

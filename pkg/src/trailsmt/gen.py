"""Seeded random problem generator for the three differential-test families.

Identical seeds yield identical bytes: the per-problem RNG is derived from
integers only (never hashed objects), and scripts are rendered through fixed
format strings.
"""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path
from typing import Callable

FAMILIES = ("bool", "lra", "euf")

_FAMILY_TAG = {"bool": 1, "lra": 2, "euf": 3}


def _rng(family: str, seed: int, index: int) -> random.Random:
    return random.Random(seed * 1_000_003 + _FAMILY_TAG[family] * 101 + index)


def _lit(atom: str, positive: bool) -> str:
    return atom if positive else f"(not {atom})"


def _clause(rng: random.Random, atoms: list[str], width: int) -> str:
    lits = [
        _lit(rng.choice(atoms), rng.random() < 0.5) for _ in range(width)
    ]
    if len(lits) == 1:
        return lits[0]
    return f"(or {' '.join(lits)})"


def gen_bool(rng: random.Random) -> str:
    n_atoms = rng.randint(3, 8)
    n_clauses = rng.randint(2, 30)
    names = [f"p{i}" for i in range(n_atoms)]
    lines = ["(set-logic QF_UF)"]
    lines += [f"(declare-const {n} Bool)" for n in names]
    for _ in range(n_clauses):
        lines.append(f"(assert {_clause(rng, names, rng.randint(1, 3))})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


def _rational_text(q: Fraction) -> str:
    if q < 0:
        return f"(- {_rational_text(-q)})"
    if q.denominator == 1:
        return str(q.numerator)
    return f"(/ {q.numerator} {q.denominator})"


def _linear_atom(rng: random.Random, names: list[str]) -> str:
    nv = rng.randint(1, min(3, len(names)))
    chosen = rng.sample(names, nv)
    parts = []
    for v in chosen:
        coeff = rng.choice([-3, -2, -1, 1, 2, 3])
        parts.append(v if coeff == 1 else f"(* {coeff} {v})")
    lhs = parts[0] if len(parts) == 1 else f"(+ {' '.join(parts)})"
    const = rng.randint(-5, 5)
    rel = rng.choices(["<", "<=", "="], weights=[5, 5, 2])[0]
    return f"({rel} {lhs} {const})"


def gen_lra(rng: random.Random) -> str:
    n_vars = rng.randint(2, 5)
    names = [f"x{i}" for i in range(n_vars)]
    n_atoms = rng.randint(3, 12)
    atoms: list[str] = []
    while len(atoms) < n_atoms:
        a = _linear_atom(rng, names)
        if a not in atoms:
            atoms.append(a)
    lines = ["(set-logic QF_LRA)"]
    lines += [f"(declare-const {n} Real)" for n in names]
    if rng.random() < 0.4:
        for v in rng.sample(names, rng.randint(1, min(2, n_vars))):
            q = Fraction(rng.randint(-8, 8), rng.choice([1, 1, 2]))
            lines.append(f"(assign {v} {_rational_text(q)})")
    for _ in range(rng.randint(2, 8)):
        if rng.random() < 0.6:
            lines.append(f"(assert {_lit(rng.choice(atoms), rng.random() < 0.7)})")
        else:
            lines.append(f"(assert {_clause(rng, atoms, rng.randint(2, 3))})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


def gen_euf(rng: random.Random) -> str:
    n_consts = rng.randint(2, 4)
    consts = ["a", "b", "c", "d"][:n_consts]
    terms = list(consts)
    target = rng.randint(n_consts, 6)
    while len(terms) < target:
        t = f"(f {rng.choice(terms)})"
        if t not in terms:
            terms.append(t)
    n_atoms = rng.randint(2, 8)
    atoms: list[str] = []
    tries = 0
    while len(atoms) < n_atoms and tries < 50:
        tries += 1
        s, t = rng.sample(terms, 2)
        a = f"(= {s} {t})"
        if a not in atoms:
            atoms.append(a)
    lines = ["(set-logic QF_UF)", "(declare-sort U 0)"]
    lines += [f"(declare-const {c} U)" for c in consts]
    lines.append("(declare-fun f (U) U)")
    for _ in range(rng.randint(2, 8)):
        if rng.random() < 0.6:
            lines.append(f"(assert {_lit(rng.choice(atoms), rng.random() < 0.6)})")
        else:
            lines.append(f"(assert {_clause(rng, atoms, rng.randint(2, 3))})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


_GEN: dict[str, Callable[[random.Random], str]] = {
    "bool": gen_bool,
    "lra": gen_lra,
    "euf": gen_euf,
}


def script_text(family: str, seed: int, index: int) -> str:
    if family not in _GEN:
        raise ValueError(f"unknown family {family!r}")
    return _GEN[family](_rng(family, seed, index))


def generate(family: str, seed: int, count: int, outdir: str | Path) -> list[Path]:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(count):
        p = out / f"{family}-{seed:05d}-{i:03d}.smt2"
        p.write_text(script_text(family, seed, i))
        paths.append(p)
    return paths

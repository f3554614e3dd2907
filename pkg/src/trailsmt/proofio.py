"""Proof text formats.

``cdsat`` format: s-expressions with a term table header::

    (terms (<id> <shape>) ...)
    (refutation (inputs (<i> (<tid> <- <val>)) ...) <proof>)

    proof := (input <i> (<tid> <- <val>))
           | (thy <module> <rule> (prem <asg>*) (concl <asg>))
           | (clash <proof> <asg>)
           | (res <asg> <proof> <proof>)
           | (entail <asg> <proof>)

``res`` format: line-oriented resolution with theory lemmas::

    t <id> <shape>                                 term table entry
    h <tid><-<val>                                 global hypothesis
    u <id> <lit>                                   input unit
    l <id> <module> <rule> [hyp <tid><-<val>]* : <lit>*   lemma (conclusion last)
    r <id> <left> <right> <pivotlit> : <lit>*      resolution step

Literals are ``+<tid>`` / ``-<tid>``; the final line is an ``r`` step with an
empty literal list (the empty clause). First-order inputs never become
clauses; they are global hypotheses of the refutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .proofs import (
    CheckReport,
    Entails,
    PClash,
    PEntail,
    PInput,
    PRes,
    PThy,
    ProofTerm,
    UncheckedProof,
    UnsatSet,
    check,
    postorder,
)
from .sexpr import Atom, Node, SList, parse_all
from .terms import (
    AbsVal,
    Assignment,
    BoolVal,
    EUF_T,
    Problem,
    RatVal,
    Sort,
    Term,
    Value,
    assignment_key,
    flip,
    subterms,
)

Lit = tuple[int, bool]  # (term id, polarity)


class ProofFormatError(Exception):
    pass


# ---------------------------------------------------------------------------
# shared value / assignment tokens
# ---------------------------------------------------------------------------

def _value_token(v: Value) -> str:
    if isinstance(v, BoolVal):
        return "true" if v.value else "false"
    if isinstance(v, RatVal):
        return str(v.value)
    return f"(abs {v.sort} {v.index})"


def _value_token_compact(v: Value) -> str:
    if isinstance(v, AbsVal):
        return f"abs:{v.sort}:{v.index}"
    return _value_token(v)


def _asg_sexpr(a: Assignment) -> str:
    return f"({a.term.id} <- {_value_token(a.value)})"


# ---------------------------------------------------------------------------
# cdsat format: writing
# ---------------------------------------------------------------------------

def _reachable_terms(root: ProofTerm, problem: Problem) -> list[Term]:
    seen: set[int] = set()
    out: list[Term] = []

    def add(t: Term) -> None:
        for s in subterms(t):
            if s.id not in seen:
                seen.add(s.id)
                out.append(s)

    for a in problem.inputs:
        add(a.term)
    for node in postorder(root):
        if isinstance(node, PInput):
            add(node.assignment.term)
        elif isinstance(node, PThy):
            for p in node.premises:
                add(p.term)
            add(node.conclusion.term)
        elif isinstance(node, PClash):
            add(node.opp.term)
        elif isinstance(node, (PRes, PEntail)):
            add(node.pivot.term)
    out.sort(key=lambda t: t.id)
    return out


def _term_shape(t: Term) -> str:
    head = t.head
    if head.numeral is not None:
        return f"(num {head.numeral})"
    if not t.args:
        return f"(const {head.name} {head.res_sort})"
    ids = " ".join(str(a.id) for a in t.args)
    if head.owner == EUF_T and head.name != "=":
        return f"(app {head.name} {ids})"
    return f"({head.name} {ids})"


def _proof_body(root: ProofTerm) -> str:
    parts: list[str] = []
    stack: list[Union[str, ProofTerm]] = [root]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
            continue
        node = item
        if isinstance(node, PInput):
            parts.append(f"(input {node.index} {_asg_sexpr(node.assignment)})")
        elif isinstance(node, PThy):
            prem = " ".join(_asg_sexpr(p) for p in node.premises)
            parts.append(
                f"(thy {node.module} {node.rule} (prem {prem})"
                f" (concl {_asg_sexpr(node.conclusion)}))"
            )
        elif isinstance(node, PClash):
            stack.extend([f" {_asg_sexpr(node.opp)})", node.inf, "(clash "])
        elif isinstance(node, PRes):
            stack.extend(
                [")", node.right, " ", node.left, f"(res {_asg_sexpr(node.pivot)} "]
            )
        elif isinstance(node, PEntail):
            stack.extend([")", node.inner, f"(entail {_asg_sexpr(node.pivot)} "])
        else:
            raise ProofFormatError(f"unknown node {type(node).__name__}")
    return "".join(parts)


def write_proof(root: ProofTerm, problem: Problem) -> str:
    terms = _reachable_terms(root, problem)
    lines = ["(terms"]
    for t in terms:
        lines.append(f"  ({t.id} {_term_shape(t)})")
    lines.append(")")
    inputs = " ".join(
        f"({i} {_asg_sexpr(a)})" for i, a in enumerate(problem.inputs)
    )
    lines.append(f"(refutation (inputs {inputs})")
    lines.append(_proof_body(root))
    lines.append(")")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# cdsat format: reading (raw nodes; validation is the checker's job)
# ---------------------------------------------------------------------------

def _fail(msg: str, node: Node):
    raise ProofFormatError(f"{node.line}:{node.col}: {msg}")


def _sort_by_name(problem: Problem, name: str) -> Sort:
    from .terms import BOOL, RAT, uninterp_sort

    if name == "Bool":
        return BOOL
    if name in ("Real", "Rat"):
        return RAT
    hit = problem.sorts.get(name)
    return hit if hit is not None else uninterp_sort(name)


def _parse_value(node: Node, problem: Problem) -> Value:
    if isinstance(node, Atom):
        if node.text == "true":
            return BoolVal(True)
        if node.text == "false":
            return BoolVal(False)
        try:
            return RatVal(Fraction(node.text))
        except ValueError:
            _fail(f"bad value token {node.text!r}", node)
    if (
        isinstance(node, SList)
        and len(node.items) == 3
        and isinstance(node.items[0], Atom)
        and node.items[0].text == "abs"
    ):
        sname = node.items[1]
        idx = node.items[2]
        if not isinstance(sname, Atom) or not isinstance(idx, Atom):
            _fail("bad abs value", node)
        return AbsVal(_sort_by_name(problem, sname.text), int(idx.text))
    _fail("bad value", node)


def _rebuild_terms(table: SList, problem: Problem) -> dict[int, Term]:
    entries = []
    for entry in table.items[1:]:
        if not isinstance(entry, SList) or len(entry.items) != 2:
            _fail("bad term table entry", entry)
        id_node, shape = entry.items
        if not isinstance(id_node, Atom):
            _fail("bad term table entry", entry)
        entries.append((int(id_node.text), shape))
    return _rebuild_term_entries(entries, problem)


def _rebuild_term_entries(
    entries: list[tuple[int, Node]], problem: Problem
) -> dict[int, Term]:
    store = problem.store
    by_id: dict[int, Term] = {}

    def ref(node: Node) -> Term:
        if not isinstance(node, Atom) or not node.text.isdigit():
            _fail("expected a term id", node)
        t = by_id.get(int(node.text))
        if t is None:
            _fail(f"forward term reference {node.text}", node)
        return t

    for fid, shape in entries:
        if not isinstance(shape, SList):
            _fail("bad term table entry", shape)
        head = shape.items[0]
        if not isinstance(head, Atom):
            _fail("bad term shape", shape)
        kind = head.text
        if kind == "num":
            t = store.mk_numeral(Fraction(shape.items[1].text))  # type: ignore[union-attr]
        elif kind == "const":
            name = shape.items[1].text  # type: ignore[union-attr]
            sym = problem.symbols.get(name)
            if sym is None:
                from .terms import const_sym

                sort = _sort_by_name(problem, shape.items[2].text)  # type: ignore[union-attr]
                sym = const_sym(name, sort)
            t = store.intern(sym)
        elif kind == "app":
            name = shape.items[1].text  # type: ignore[union-attr]
            sym = problem.symbols.get(name)
            args = [ref(n) for n in shape.items[2:]]
            if sym is None:
                # symbols are value-compared: recover the head from any
                # existing application with the same name and argument sorts
                want = tuple(a.sort for a in args)
                for u in store.terms:
                    if (
                        u.head.name == name
                        and u.head.owner == EUF_T
                        and u.head.arg_sorts == want
                    ):
                        sym = u.head
                        break
            if sym is None:
                _fail(f"undeclared function {name!r}", shape)
            t = store.intern(sym, args)
        else:
            args = [ref(n) for n in shape.items[1:]]
            if kind == "not":
                t = store.mk_not(*args)
            elif kind == "and":
                t = store.mk_and(*args)
            elif kind == "or":
                t = store.mk_or(*args)
            elif kind == "=>":
                t = store.mk_implies(*args)
            elif kind == "=":
                t = store.mk_eq(*args)
            elif kind == "<":
                t = store.mk_lt(*args)
            elif kind == "<=":
                t = store.mk_le(*args)
            elif kind == "+":
                t = store.mk_add(*args)
            elif kind == "-":
                t = store.mk_neg(*args) if len(args) == 1 else store.mk_sub(*args)
            elif kind == "*":
                t = store.mk_mul(*args)
            else:
                _fail(f"unknown term shape {kind!r}", shape)
        by_id[fid] = t
    return by_id


def _parse_asg(node: Node, terms: dict[int, Term], problem: Problem) -> Assignment:
    if (
        not isinstance(node, SList)
        or len(node.items) != 3
        or not isinstance(node.items[0], Atom)
        or not isinstance(node.items[1], Atom)
        or node.items[1].text != "<-"
    ):
        _fail("expected (termid <- value)", node)
    t = terms.get(int(node.items[0].text))
    if t is None:
        _fail(f"unknown term id {node.items[0].text}", node)
    return Assignment(t, _parse_value(node.items[2], problem))


def read_proof(text: str, problem: Problem) -> ProofTerm:
    """Parse a cdsat proof file into raw nodes (checker validates them)."""
    top = parse_all(text)
    if len(top) != 2:
        raise ProofFormatError("expected a (terms ...) header and a (refutation ...)")
    header, ref = top
    if (
        not isinstance(header, SList)
        or not header.items
        or not isinstance(header.items[0], Atom)
        or header.items[0].text != "terms"
    ):
        raise ProofFormatError("missing (terms ...) header")
    if (
        not isinstance(ref, SList)
        or len(ref.items) != 3
        or not isinstance(ref.items[0], Atom)
        or ref.items[0].text != "refutation"
    ):
        raise ProofFormatError("missing (refutation (inputs ...) proof)")
    terms = _rebuild_terms(header, problem)
    inputs_l = ref.items[1]
    if (
        not isinstance(inputs_l, SList)
        or not inputs_l.items
        or not isinstance(inputs_l.items[0], Atom)
        or inputs_l.items[0].text != "inputs"
    ):
        raise ProofFormatError("missing (inputs ...) section")
    for entry in inputs_l.items[1:]:
        if not isinstance(entry, SList) or len(entry.items) != 2:
            _fail("bad input record", entry)
        idx_node, asg_node = entry.items
        if not isinstance(idx_node, Atom):
            _fail("bad input record", entry)
        idx = int(idx_node.text)
        a = _parse_asg(asg_node, terms, problem)
        if not (0 <= idx < len(problem.inputs)) or problem.inputs[idx] != a:
            _fail(f"recorded input {idx} does not match the problem", entry)
    return _build_node(ref.items[2], terms, problem)


def _build_node(node: Node, terms: dict[int, Term], problem: Problem) -> ProofTerm:
    # iterative post-order construction: deep resolve chains are routine
    if not isinstance(node, SList) or not node.items or not isinstance(node.items[0], Atom):
        _fail("expected a proof node", node)
    built: dict[int, ProofTerm] = {}
    stack: list[tuple[SList, bool]] = [(node, False)]
    while stack:
        cur, expanded = stack.pop()
        if id(cur) in built:
            continue
        kids = _node_children(cur)
        if not expanded:
            stack.append((cur, True))
            for k in kids:
                stack.append((k, False))
            continue
        built[id(cur)] = _make_node(cur, [built[id(k)] for k in kids], terms, problem)
    return built[id(node)]


def _node_children(node: SList) -> list[SList]:
    head = node.items[0]
    assert isinstance(head, Atom)
    out = []
    if head.text == "clash":
        out = [node.items[1]]
    elif head.text == "res":
        out = [node.items[2], node.items[3]]
    elif head.text == "entail":
        out = [node.items[2]]
    for k in out:
        if not isinstance(k, SList):
            _fail("expected a proof subterm", k)
    return out  # type: ignore[return-value]


def _make_node(
    node: SList,
    kids: list[ProofTerm],
    terms: dict[int, Term],
    problem: Problem,
) -> ProofTerm:
    head = node.items[0]
    assert isinstance(head, Atom)
    kind = head.text
    if kind == "input":
        if len(node.items) != 3 or not isinstance(node.items[1], Atom):
            _fail("bad input node", node)
        idx = int(node.items[1].text)
        a = _parse_asg(node.items[2], terms, problem)
        return PInput(idx, a, Entails(frozenset((a,)), a))
    if kind == "thy":
        if len(node.items) != 5:
            _fail("bad thy node", node)
        mod, rule = node.items[1], node.items[2]
        prem_l, concl_l = node.items[3], node.items[4]
        if not isinstance(mod, Atom) or not isinstance(rule, Atom):
            _fail("bad thy node", node)
        if not isinstance(prem_l, SList) or not isinstance(concl_l, SList):
            _fail("bad thy node", node)
        prems = tuple(
            sorted(
                (_parse_asg(p, terms, problem) for p in prem_l.items[1:]),
                key=assignment_key,
            )
        )
        concl = _parse_asg(concl_l.items[1], terms, problem)
        return PThy(
            mod.text, rule.text, prems, concl, Entails(frozenset(prems), concl)
        )
    if kind == "clash":
        if len(node.items) != 3:
            _fail("bad clash node", node)
        (inf,) = kids
        opp = _parse_asg(node.items[2], terms, problem)
        prem = inf.concl.premises if isinstance(inf.concl, Entails) else frozenset()
        return PClash(inf, opp, UnsatSet(prem | {opp}))
    if kind == "res":
        if len(node.items) != 4:
            _fail("bad res node", node)
        pivot = _parse_asg(node.items[1], terms, problem)
        left, right = kids
        lelems = left.concl.elems if isinstance(left.concl, UnsatSet) else frozenset()
        rprem = right.concl.premises if isinstance(right.concl, Entails) else frozenset()
        return PRes(pivot, left, right, UnsatSet((lelems - {pivot}) | rprem))
    if kind == "entail":
        if len(node.items) != 3:
            _fail("bad entail node", node)
        pivot = _parse_asg(node.items[1], terms, problem)
        (inner,) = kids
        ielems = inner.concl.elems if isinstance(inner.concl, UnsatSet) else frozenset()
        learned = flip(pivot) if pivot.is_boolean else pivot
        return PEntail(pivot, inner, Entails(ielems - {pivot}, learned))
    _fail(f"unknown proof node {kind!r}", node)
    raise AssertionError


# ---------------------------------------------------------------------------
# resolution export
# ---------------------------------------------------------------------------

@dataclass
class ResClause:
    cid: int
    kind: str  # "u" | "l" | "r"
    lits: frozenset[Lit]
    # unit
    input_index: int = -1
    # lemma
    module: str = ""
    rule: str = ""
    hyps: tuple[Assignment, ...] = ()
    conclusion: Optional[Lit] = None
    # resolution
    left: int = -1
    right: int = -1
    pivot: Optional[Lit] = None


@dataclass
class ResolutionProof:
    clauses: list[ResClause]
    final: int
    global_hyps: tuple[Assignment, ...]
    term_map: dict[int, Term] = field(default_factory=dict)

    def replay(self) -> bool:
        """Re-derive every resolution step by literal-set resolution and
        confirm the final clause is empty."""
        by_id = {c.cid: c for c in self.clauses}
        for c in self.clauses:
            if c.kind != "r":
                continue
            left = by_id.get(c.left)
            right = by_id.get(c.right)
            if left is None or right is None or c.pivot is None:
                return False
            tid, pol = c.pivot
            neg = (tid, not pol)
            if c.pivot not in right.lits or neg not in left.lits:
                return False
            derived = (left.lits - {neg}) | (right.lits - {c.pivot})
            if derived != c.lits:
                return False
        return by_id[self.final].lits == frozenset()


def _lit(a: Assignment) -> Lit:
    assert isinstance(a.value, BoolVal)
    return (a.term.id, a.value.value)


def _flip_lit(a: Assignment) -> Lit:
    assert isinstance(a.value, BoolVal)
    return (a.term.id, not a.value.value)


def export_resolution(
    root: ProofTerm, problem: Problem, checked: bool = False
) -> ResolutionProof:
    """Translate a checked refutation into resolution with theory lemmas."""
    if not checked:
        report = check(root, problem)
        if not report.ok:
            raise UncheckedProof(report.reason)
    clauses: list[ResClause] = []
    node_clause: dict[int, int] = {}
    unit_of_input: dict[int, int] = {}

    def new_clause(c: ResClause) -> int:
        clauses.append(c)
        return c.cid

    def unit_for(index: int, a: Assignment) -> int:
        hit = unit_of_input.get(index)
        if hit is not None:
            return hit
        cid = new_clause(
            ResClause(len(clauses), "u", frozenset((_lit(a),)), input_index=index)
        )
        unit_of_input[index] = cid
        return cid

    def process(node: ProofTerm) -> int:
        hit = node_clause.get(id(node))
        if hit is not None:
            return hit
        if isinstance(node, PInput):
            if not node.assignment.is_boolean:
                raise UncheckedProof("first-order input used as a clause")
            cid = unit_for(node.index, node.assignment)
        elif isinstance(node, PThy):
            lits = {_flip_lit(p) for p in node.premises if p.is_boolean}
            lits.add(_lit(node.conclusion))
            hyps = tuple(
                sorted(
                    (p for p in node.premises if not p.is_boolean),
                    key=assignment_key,
                )
            )
            cid = new_clause(
                ResClause(
                    len(clauses),
                    "l",
                    frozenset(lits),
                    module=node.module,
                    rule=node.rule,
                    hyps=hyps,
                    conclusion=_lit(node.conclusion),
                )
            )
        elif isinstance(node, PClash):
            cid = process(node.inf)
        elif isinstance(node, PEntail):
            cid = process(node.inner)
        elif isinstance(node, PRes):
            lid = process(node.left)
            rid = process(node.right)
            pivot = _lit(node.pivot)
            left_l = clauses[lid].lits
            right_l = clauses[rid].lits
            if (pivot[0], not pivot[1]) not in left_l or pivot not in right_l:
                raise UncheckedProof("resolution pivot missing from a parent clause")
            derived = (left_l - {(pivot[0], not pivot[1])}) | (right_l - {pivot})
            cid = new_clause(
                ResClause(
                    len(clauses), "r", frozenset(derived), left=lid, right=rid, pivot=pivot
                )
            )
        else:
            raise UncheckedProof(f"cannot export node {type(node).__name__}")
        node_clause[id(node)] = cid
        return cid

    # deep chains: materialize children first, then let the memo do the work
    for node in postorder(root):
        process(node)
    current = process(root)
    assert isinstance(root.concl, UnsatSet)
    elems = sorted(root.concl.elems, key=assignment_key)
    global_hyps = tuple(a for a in elems if not a.is_boolean)
    for a in elems:
        if not a.is_boolean:
            continue
        if _flip_lit(a) not in clauses[current].lits:
            continue
        idx = problem.inputs.index(a)
        uid = unit_for(idx, a)
        derived = (clauses[current].lits - {_flip_lit(a)}) | (
            clauses[uid].lits - {_lit(a)}
        )
        current = new_clause(
            ResClause(
                len(clauses),
                "r",
                frozenset(derived),
                left=current,
                right=uid,
                pivot=_lit(a),
            )
        )
    if clauses[current].lits:
        raise UncheckedProof("refutation does not reach the empty clause")
    term_map: dict[int, Term] = {}
    for c in clauses:
        for tid, _pol in c.lits:
            term_map[tid] = problem.store.terms[tid]
        if c.pivot is not None:
            term_map[c.pivot[0]] = problem.store.terms[c.pivot[0]]
        for a in c.hyps:
            term_map[a.term.id] = a.term
    for a in global_hyps:
        term_map[a.term.id] = a.term
    return ResolutionProof(clauses, current, global_hyps, term_map)


# ---------------------------------------------------------------------------
# res format text
# ---------------------------------------------------------------------------

def _lit_str(lit: Lit) -> str:
    return f"{'+' if lit[1] else '-'}{lit[0]}"


def _lits_str(c: ResClause) -> str:
    lits = sorted(c.lits)
    if c.kind == "l" and c.conclusion is not None and c.conclusion in c.lits:
        lits = sorted(c.lits - {c.conclusion}) + [c.conclusion]
    return " ".join(_lit_str(l) for l in lits)


def write_resolution(proof: ResolutionProof) -> str:
    lines = []
    table: dict[int, Term] = {}
    for t in (proof.term_map or {}).values():
        for s in subterms(t):
            table[s.id] = s
    for tid in sorted(table):
        lines.append(f"t {tid} {_term_shape(table[tid])}")
    for a in proof.global_hyps:
        lines.append(f"h {a.term.id}<-{_value_token_compact(a.value)}")
    for c in proof.clauses:
        if c.kind == "u":
            lines.append(f"u {c.cid} {_lit_str(next(iter(c.lits)))}")
        elif c.kind == "l":
            hyps = "".join(
                f" hyp {a.term.id}<-{_value_token_compact(a.value)}" for a in c.hyps
            )
            body = _lits_str(c)
            lines.append(f"l {c.cid} {c.module} {c.rule}{hyps} :" + (f" {body}" if body else ""))
        else:
            assert c.pivot is not None
            body = _lits_str(c)
            lines.append(
                f"r {c.cid} {c.left} {c.right} {_lit_str(c.pivot)} :"
                + (f" {body}" if body else "")
            )
    return "\n".join(lines) + "\n"


def _parse_lit(tok: str) -> Lit:
    if not tok or tok[0] not in "+-":
        raise ProofFormatError(f"bad literal {tok!r}")
    return (int(tok[1:]), tok[0] == "+")


def _parse_hyp(tok: str, problem: Problem, term_map: dict[int, Term]) -> Assignment:
    tid_s, _, val_s = tok.partition("<-")
    term = term_map.get(int(tid_s))
    if term is None:
        raise ProofFormatError(f"hypothesis references unknown term {tid_s}")
    if val_s == "true":
        v: Value = BoolVal(True)
    elif val_s == "false":
        v = BoolVal(False)
    elif val_s.startswith("abs:"):
        _, sname, idx = val_s.split(":")
        v = AbsVal(problem.sorts[sname], int(idx))
    else:
        v = RatVal(Fraction(val_s))
    return Assignment(term, v)


def read_resolution(text: str, problem: Problem) -> ResolutionProof:
    clauses: list[ResClause] = []
    global_hyps: list[Assignment] = []
    term_entries: list[tuple[int, Node]] = []
    term_map: dict[int, Term] = {}
    last = -1
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "t":
            shape_nodes = parse_all(line.split(None, 2)[2])
            if len(shape_nodes) != 1:
                raise ProofFormatError(f"bad term table line {line!r}")
            term_entries.append((int(parts[1]), shape_nodes[0]))
            continue
        if not term_map and term_entries:
            term_map = _rebuild_term_entries(term_entries, problem)
        if parts[0] == "h":
            global_hyps.append(_parse_hyp(parts[1], problem, term_map))
            continue
        if parts[0] == "u":
            cid = int(parts[1])
            clauses.append(
                ResClause(cid, "u", frozenset((_parse_lit(parts[2]),)))
            )
        elif parts[0] == "l":
            cid = int(parts[1])
            module, rule = parts[2], parts[3]
            rest = parts[4:]
            sep = rest.index(":")
            hyp_toks = rest[:sep]
            hyps = []
            i = 0
            while i < len(hyp_toks):
                if hyp_toks[i] != "hyp":
                    raise ProofFormatError(f"expected hyp, got {hyp_toks[i]!r}")
                hyps.append(_parse_hyp(hyp_toks[i + 1], problem, term_map))
                i += 2
            lit_toks = rest[sep + 1 :]
            lits = [_parse_lit(t) for t in lit_toks]
            clauses.append(
                ResClause(
                    cid,
                    "l",
                    frozenset(lits),
                    module=module,
                    rule=rule,
                    hyps=tuple(hyps),
                    conclusion=lits[-1] if lits else None,
                )
            )
        elif parts[0] == "r":
            cid = int(parts[1])
            sep = parts.index(":")
            clauses.append(
                ResClause(
                    cid,
                    "r",
                    frozenset(_parse_lit(t) for t in parts[sep + 1 :]),
                    left=int(parts[2]),
                    right=int(parts[3]),
                    pivot=_parse_lit(parts[4]),
                )
            )
        else:
            raise ProofFormatError(f"bad resolution line {line!r}")
        last = clauses[-1].cid
    if not clauses:
        raise ProofFormatError("empty resolution file")
    if not term_map and term_entries:
        term_map = _rebuild_term_entries(term_entries, problem)
    return ResolutionProof(clauses, last, tuple(global_hyps), term_map)


def check_resolution(proof: ResolutionProof, problem: Problem, modules=None) -> CheckReport:
    """Replay a resolution proof against a problem: units must be inputs,
    lemmas must pass the theory checkers, steps must re-derive."""
    if modules is None:
        from .theories import default_modules

        modules = {m.name: m for m in default_modules(problem.store)}
    inputs = set(problem.inputs)
    term_map = proof.term_map or {}

    def term_of(tid: int):
        t = term_map.get(tid)
        if t is None:
            raise ProofFormatError(f"literal references unknown term {tid}")
        return t

    n = 0
    for c in proof.clauses:
        n += 1
        if c.kind == "u":
            (lit,) = c.lits
            a = Assignment(term_of(lit[0]), BoolVal(lit[1]))
            if a not in inputs:
                return CheckReport(False, f"unit clause {c.cid} is not an input", None, n)
        elif c.kind == "l":
            if c.conclusion is None:
                return CheckReport(False, f"lemma {c.cid} has no conclusion", None, n)
            mod = modules.get(c.module)
            if mod is None:
                return CheckReport(False, f"lemma {c.cid}: unknown module", None, n)
            concl = Assignment(term_of(c.conclusion[0]), BoolVal(c.conclusion[1]))
            prems = tuple(c.hyps) + tuple(
                Assignment(term_of(t), BoolVal(not pol))
                for t, pol in sorted(c.lits - {c.conclusion})
            )
            if not mod.check(prems, concl):
                return CheckReport(
                    False, f"lemma {c.cid} fails {c.module} re-derivation", None, n
                )
    if not proof.replay():
        return CheckReport(False, "resolution replay failed", None, n)
    hyp_set = set(proof.global_hyps)
    if not hyp_set.issubset(inputs):
        return CheckReport(False, "global hypothesis is not an input", None, n)
    return CheckReport(True, "", None, n)

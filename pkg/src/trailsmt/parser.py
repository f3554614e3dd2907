"""SMT-LIB-subset frontend with the non-standard ``assign`` command.

Supported commands: set-logic, declare-sort (arity 0), declare-const,
declare-fun, assert, assign, check-sat, get-model, get-proof, exit.
``(assert phi)`` becomes the input phi<-true; ``(assign x 3)`` becomes the
input x<-3, with 3 a value rather than a constant symbol, so it is distinct
from ``(assert (= x 3))``. Value literals are rational literals, true/false,
or ``(abs <Sort> <n>)``. Anything else is rejected loudly, never skipped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .printer import term_sexpr, value_sexpr
from .sexpr import Atom, Node, ScriptSyntaxError, SList, parse_all
from .terms import (
    AbsVal,
    Assignment,
    BOOL,
    BoolVal,
    Problem,
    RAT,
    RatVal,
    Sort,
    Symbol,
    Term,
    TermStore,
    Value,
    const_sym,
    func_sym,
    uninterp_sort,
)


class SortError(Exception):
    pass


class UndeclaredSymbol(Exception):
    pass


class UnsupportedCommand(Exception):
    pass


_INT_RE = re.compile(r"^-?\d+$")
_DEC_RE = re.compile(r"^-?\d+\.\d+$")
_NAME_RE = re.compile(r"^[A-Za-z_~!@$%^&*+=<>.?/][-A-Za-z0-9_~!@$%^&*+=<>.?/']*$")

_RESERVED = {
    "and", "or", "not", "=>", "=", "<", "<=", "+", "-", "*", "/",
    "true", "false", "abs", "assert", "assign",
}


@dataclass
class Command:
    name: str
    args: tuple = ()


@dataclass
class Script:
    commands: list[Command] = field(default_factory=list)
    problem: Problem = None  # type: ignore[assignment]

    @property
    def wants_model(self) -> bool:
        return any(c.name == "get-model" for c in self.commands)

    @property
    def wants_proof(self) -> bool:
        return any(c.name == "get-proof" for c in self.commands)


def _pos(node: Node) -> tuple[int, int]:
    return node.line, node.col


def _err(kind, msg: str, node: Node):
    line, col = _pos(node)
    if kind is ScriptSyntaxError:
        raise ScriptSyntaxError(msg, line, col)
    raise kind(f"{line}:{col}: {msg}")


class _ScriptBuilder:
    def __init__(self) -> None:
        self.store = TermStore()
        self.problem = Problem(self.store)
        self.script = Script(problem=self.problem)
        self.sorts: dict[str, Sort] = {"Bool": BOOL, "Real": RAT, "Rat": RAT}
        self.symbols: dict[str, Symbol] = {}
        self.checked = False

    # -- sorts and declarations -------------------------------------------

    def sort_of(self, node: Node) -> Sort:
        if not isinstance(node, Atom):
            _err(SortError, "expected a sort name", node)
        s = self.sorts.get(node.text)
        if s is None:
            _err(UndeclaredSymbol, f"unknown sort {node.text!r}", node)
        return s

    def declare_sort(self, cmd: SList) -> None:
        if len(cmd.items) not in (2, 3):
            _err(ScriptSyntaxError, "declare-sort expects a name and arity", cmd)
        name_node = cmd.items[1]
        if not isinstance(name_node, Atom) or not _NAME_RE.match(name_node.text):
            _err(SortError, "bad sort name", name_node)
        if len(cmd.items) == 3:
            arity = cmd.items[2]
            if not (isinstance(arity, Atom) and arity.text == "0"):
                _err(UnsupportedCommand, "only arity-0 sorts are supported", arity)
        name = name_node.text
        if name in self.sorts:
            _err(SortError, f"sort {name!r} already declared", name_node)
        s = uninterp_sort(name)
        self.sorts[name] = s
        self.problem.sorts[name] = s
        self.script.commands.append(Command("declare-sort", (name,)))

    def _declare_symbol(self, name_node: Node, sym: Symbol) -> None:
        assert isinstance(name_node, Atom)
        name = name_node.text
        if name in _RESERVED or not _NAME_RE.match(name):
            _err(SortError, f"illegal symbol name {name!r}", name_node)
        if name in self.symbols:
            _err(SortError, f"symbol {name!r} already declared", name_node)
        self.symbols[name] = sym
        self.problem.symbols[name] = sym

    def declare_const(self, cmd: SList) -> None:
        if len(cmd.items) != 3 or not isinstance(cmd.items[1], Atom):
            _err(ScriptSyntaxError, "declare-const expects a name and a sort", cmd)
        sort = self.sort_of(cmd.items[2])
        self._declare_symbol(cmd.items[1], const_sym(cmd.items[1].text, sort))
        self.script.commands.append(
            Command("declare-const", (cmd.items[1].text, sort))
        )

    def declare_fun(self, cmd: SList) -> None:
        if len(cmd.items) != 4 or not isinstance(cmd.items[1], Atom):
            _err(ScriptSyntaxError, "declare-fun expects name, args, result", cmd)
        args_node = cmd.items[2]
        if not isinstance(args_node, SList):
            _err(ScriptSyntaxError, "declare-fun argument list missing", cmd.items[2])
        arg_sorts = tuple(self.sort_of(a) for a in args_node.items)
        res = self.sort_of(cmd.items[3])
        if not arg_sorts:
            self._declare_symbol(cmd.items[1], const_sym(cmd.items[1].text, res))
        else:
            self._declare_symbol(
                cmd.items[1], func_sym(cmd.items[1].text, arg_sorts, res)
            )
        self.script.commands.append(
            Command("declare-fun", (cmd.items[1].text, arg_sorts, res))
        )

    # -- terms ---------------------------------------------------------------

    def _rational_literal(self, node: Node) -> Optional[Fraction]:
        """Parse the literal forms: 3, 3.5, -3, (- lit), (/ p q)."""
        if isinstance(node, Atom):
            if _INT_RE.match(node.text) or _DEC_RE.match(node.text):
                return Fraction(node.text)
            return None
        if not node.items or not isinstance(node.items[0], Atom):
            return None
        head = node.items[0].text
        if head == "-" and len(node.items) == 2:
            inner = self._rational_literal(node.items[1])
            return None if inner is None else -inner
        if head == "/" and len(node.items) == 3:
            p = self._rational_literal(node.items[1])
            q = self._rational_literal(node.items[2])
            if p is None or q is None:
                return None
            if q == 0:
                _err(SortError, "division by zero in rational literal", node)
            return Fraction(p) / Fraction(q)
        return None

    def term(self, node: Node) -> Term:
        q = self._rational_literal(node)
        if q is not None:
            return self.store.mk_numeral(q)
        if isinstance(node, Atom):
            sym = self.symbols.get(node.text)
            if sym is None:
                _err(UndeclaredSymbol, f"undeclared symbol {node.text!r}", node)
            if sym.arity != 0:
                _err(SortError, f"{node.text!r} expects arguments", node)
            return self.store.intern(sym)
        if not node.items:
            _err(ScriptSyntaxError, "empty term", node)
        head = node.items[0]
        if not isinstance(head, Atom):
            _err(ScriptSyntaxError, "term head must be a symbol", head)
        name = head.text
        args = [self.term(a) for a in node.items[1:]]

        def need(n_lo: int, n_hi: Optional[int] = None) -> None:
            n_hi = n_hi if n_hi is not None else n_lo
            if not (n_lo <= len(args) <= n_hi):
                _err(SortError, f"{name!r} applied to {len(args)} arguments", node)

        def all_bool() -> None:
            for a, an in zip(args, node.items[1:]):
                if not a.sort.is_bool:
                    _err(SortError, f"{name!r} expects Boolean arguments", an)

        def all_rat() -> None:
            for a, an in zip(args, node.items[1:]):
                if not a.sort.is_rat:
                    _err(SortError, f"{name!r} expects Real arguments", an)

        if name == "not":
            need(1)
            all_bool()
            return self.store.mk_not(args[0])
        if name in ("and", "or"):
            need(2, 64)
            all_bool()
            return (
                self.store.mk_and(*args) if name == "and" else self.store.mk_or(*args)
            )
        if name == "=>":
            need(2, 64)
            all_bool()
            out = args[-1]
            for a in reversed(args[:-1]):
                out = self.store.mk_implies(a, out)
            return out
        if name == "=":
            need(2)
            if args[0].sort != args[1].sort:
                _err(SortError, "= over mixed sorts", node)
            return self.store.mk_eq(args[0], args[1])
        if name in ("<", "<="):
            need(2)
            all_rat()
            return (
                self.store.mk_lt(args[0], args[1])
                if name == "<"
                else self.store.mk_le(args[0], args[1])
            )
        if name == "+":
            need(2, 64)
            all_rat()
            return self.store.mk_add(*args)
        if name == "-":
            need(1, 64)
            all_rat()
            if len(args) == 1:
                return self.store.mk_neg(args[0])
            out = args[0]
            for a in args[1:]:
                out = self.store.mk_sub(out, a)
            return out
        if name == "*":
            need(2)
            all_rat()
            if args[0].head.numeral is None and args[1].head.numeral is None:
                _err(SortError, "* needs a rational literal on one side", node)
            return self.store.mk_mul(args[0], args[1])
        if name == "/":
            _err(SortError, "/ is only allowed between rational literals", node)
        sym = self.symbols.get(name)
        if sym is None:
            _err(UndeclaredSymbol, f"undeclared symbol {name!r}", head)
        if sym.arity != len(args):
            _err(SortError, f"{name!r} expects {sym.arity} arguments", node)
        for a, want, an in zip(args, sym.arg_sorts, node.items[1:]):
            if a.sort != want:
                _err(SortError, f"argument of sort {a.sort}, expected {want}", an)
        return self.store.intern(sym, args)

    # -- values -----------------------------------------------------------------

    def value(self, node: Node) -> Value:
        if isinstance(node, Atom) and node.text in ("true", "false"):
            return BoolVal(node.text == "true")
        q = self._rational_literal(node)
        if q is not None:
            return RatVal(q)
        if (
            isinstance(node, SList)
            and len(node.items) == 3
            and isinstance(node.items[0], Atom)
            and node.items[0].text == "abs"
        ):
            sort = self.sort_of(node.items[1])
            if not sort.is_uninterp:
                _err(SortError, "abs values require an uninterpreted sort", node)
            idx_node = node.items[2]
            if not (isinstance(idx_node, Atom) and _INT_RE.match(idx_node.text)):
                _err(SortError, "abs index must be a natural number", idx_node)
            idx = int(idx_node.text)
            if idx < 0:
                _err(SortError, "abs index must be a natural number", idx_node)
            return AbsVal(sort, idx)
        _err(SortError, "not a value literal", node)

    # -- commands ------------------------------------------------------------------

    def command(self, node: Node) -> None:
        if not isinstance(node, SList) or not node.items:
            _err(ScriptSyntaxError, "expected a command", node)
        head = node.items[0]
        if not isinstance(head, Atom):
            _err(ScriptSyntaxError, "expected a command name", head)
        name = head.text
        if name == "set-logic":
            if len(node.items) != 2 or not isinstance(node.items[1], Atom):
                _err(ScriptSyntaxError, "set-logic expects one symbol", node)
            self.script.commands.append(Command("set-logic", (node.items[1].text,)))
        elif name == "declare-sort":
            self.declare_sort(node)
        elif name == "declare-const":
            self.declare_const(node)
        elif name == "declare-fun":
            self.declare_fun(node)
        elif name == "assert":
            if len(node.items) != 2:
                _err(ScriptSyntaxError, "assert expects one term", node)
            t = self.term(node.items[1])
            if not t.sort.is_bool:
                _err(SortError, "assert expects a Boolean term", node.items[1])
            self.problem.add_input(Assignment(t, BoolVal(True)))
            self.script.commands.append(Command("assert", (t,)))
        elif name == "assign":
            if len(node.items) != 3 or not isinstance(node.items[1], Atom):
                _err(ScriptSyntaxError, "assign expects a symbol and a value", node)
            sym = self.symbols.get(node.items[1].text)
            if sym is None:
                _err(UndeclaredSymbol, f"undeclared symbol {node.items[1].text!r}", node.items[1])
            if sym.arity != 0:
                _err(SortError, "assign target must be a constant symbol", node.items[1])
            t = self.store.intern(sym)
            v = self.value(node.items[2])
            from .terms import value_sort

            if value_sort(v) != t.sort:
                _err(
                    SortError,
                    f"value of sort {value_sort(v)} assigned to {t.sort}",
                    node.items[2],
                )
            self.problem.add_input(Assignment(t, v))
            self.script.commands.append(Command("assign", (t, v)))
        elif name == "check-sat":
            if self.checked:
                _err(UnsupportedCommand, "at most one check-sat is supported", node)
            self.checked = True
            self.script.commands.append(Command("check-sat"))
        elif name == "get-model":
            self.script.commands.append(Command("get-model"))
        elif name == "get-proof":
            self.script.commands.append(Command("get-proof"))
        elif name == "exit":
            self.script.commands.append(Command("exit"))
        else:
            _err(UnsupportedCommand, f"unsupported command {name!r}", node)


def parse(text: str) -> Script:
    builder = _ScriptBuilder()
    for node in parse_all(text):
        builder.command(node)
    return builder.script


def sort_name(s: Sort) -> str:
    return "Real" if s.is_rat else str(s)


def print_script(script: Script) -> str:
    """Canonical text for a script; reparsing yields a structurally
    identical script."""
    out = []
    for c in script.commands:
        if c.name == "set-logic":
            out.append(f"(set-logic {c.args[0]})")
        elif c.name == "declare-sort":
            out.append(f"(declare-sort {c.args[0]} 0)")
        elif c.name == "declare-const":
            out.append(f"(declare-const {c.args[0]} {sort_name(c.args[1])})")
        elif c.name == "declare-fun":
            name, arg_sorts, res = c.args
            inner = " ".join(sort_name(s) for s in arg_sorts)
            out.append(f"(declare-fun {name} ({inner}) {sort_name(res)})")
        elif c.name == "assert":
            out.append(f"(assert {term_sexpr(c.args[0])})")
        elif c.name == "assign":
            out.append(f"(assign {term_sexpr(c.args[0])} {value_sexpr(c.args[1])})")
        else:
            out.append(f"({c.name})")
    return "\n".join(out) + "\n"

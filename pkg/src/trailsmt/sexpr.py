"""Minimal s-expression reader with line/column tracking.

Atoms are plain strings; lists are Python lists. Every node carries its
source position for error reporting. Comments run from ';' to end of line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


class ScriptSyntaxError(Exception):
    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Atom:
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: tuple["Node", ...]
    line: int
    col: int


Node = Union[Atom, SList]


def tokenize(text: str):
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield (ch, line, col)
            col += 1
            i += 1
        else:
            start = i
            start_col = col
            while i < n and text[i] not in " \t\r\n();":
                i += 1
                col += 1
            yield (text[start:i], line, start_col)
    yield (None, line, col)


def parse_all(text: str) -> list[Node]:
    """Parse a whole file into a list of top-level nodes."""
    out: list[Node] = []
    stack: list[tuple[list[Node], int, int]] = []
    for tok, line, col in tokenize(text):
        if tok is None:
            if stack:
                raise ScriptSyntaxError("unclosed '('", stack[-1][1], stack[-1][2])
            return out
        if tok == "(":
            stack.append(([], line, col))
        elif tok == ")":
            if not stack:
                raise ScriptSyntaxError("unmatched ')'", line, col)
            items, l0, c0 = stack.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1][0] if stack else out).append(node)
        else:
            node = Atom(tok, line, col)
            (stack[-1][0] if stack else out).append(node)
    return out

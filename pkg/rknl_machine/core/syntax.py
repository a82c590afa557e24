"""
Concrete syntax.

    term  := lam | app
    lam   := ("\\" | "λ") ident "." term
    app   := atom {atom}
    atom  := ident | "(" term ")"
    ident := [A-Za-z_][A-Za-z0-9_']*
"""

import re
from typing import List, Tuple

from rknl_machine.common.exception import ParseError
from rknl_machine.core.term import App, Ident, Lam, Term, Var, unwind_spine

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<lam>\\|λ)
  | (?P<dot>\.)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)

LAMBDA = {"compact": "\\", "unicode": "λ"}


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(offset=_byte_offset(text, pos), reason=f"unexpected character {text[pos]!r}")
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(("eof", "", _byte_offset(text, pos)))
    return tokens


class _Group:
    """An open parenthesis (or the whole input): binders read so far and the application built so far."""

    def __init__(self, outermost: bool):
        self.outermost = outermost
        self.binders = []
        self.app = None

    def add(self, atom: Term):
        self.app = atom if self.app is None else App(self.app, atom)

    def close(self) -> Term:
        t = self.app
        for binder in reversed(self.binders):
            t = Lam(binder, t)
        return t


class _Parser:
    """
    Shift-reduce parser over the token list. Open parentheses are kept on an
    explicit stack, so nesting depth is not limited by the interpreter.
    """

    def __init__(self, text: str):
        self._tokens = tokenize(text)
        self._pos = 0

    def _expect(self, kind):
        tok_kind, value, offset = self._tokens[self._pos]
        if tok_kind != kind:
            found = value if value else "end of input"
            raise ParseError(offset=offset, reason=f"expected {kind}, found {found!r}")
        self._pos += 1
        return value

    def parse(self) -> Term:
        groups = [_Group(outermost=True)]
        while True:
            group = groups[-1]
            kind = self._tokens[self._pos][0]
            if kind == "ident":
                group.add(Var(Ident.source(self._expect("ident"))))
            elif kind == "lparen":
                self._pos += 1
                groups.append(_Group(outermost=False))
            elif group.app is None:
                if kind != "lam":
                    # an atom is required here
                    self._expect("lparen")
                self._pos += 1
                group.binders.append(Ident.source(self._expect("ident")))
                self._expect("dot")
            elif kind == "rparen" and not group.outermost:
                self._pos += 1
                groups.pop()
                groups[-1].add(group.close())
            else:
                self._expect("eof" if group.outermost else "rparen")
                return group.close()


def parse(text: str) -> Term:
    """Parse concrete syntax; every identifier lands in the source namespace."""
    return _Parser(text).parse()


def print_term(t: Term, style: str = "compact") -> str:
    """Render a term, expanding sharing. Arguments that are not variables are parenthesized."""
    lam = LAMBDA[style]
    out = []
    # strings are emitted as they are, terms are expanded in place
    todo = [t]
    while todo:
        item = todo.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        while isinstance(item, Lam):
            out.append(f"{lam}{item.binder}.")
            item = item.body
        head, args = unwind_spine(item)
        parts = [str(head.ident)] if isinstance(head, Var) else ["(", head, ")"]
        for a in args:
            parts.append(" ")
            if isinstance(a, Var):
                parts.append(str(a.ident))
            else:
                parts.extend(("(", a, ")"))
        todo.extend(reversed(parts))
    return "".join(out)

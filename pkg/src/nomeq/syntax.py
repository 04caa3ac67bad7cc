"""Tokenizer and term reader shared by the theory and proof-script parsers."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from .errors import TheorySyntaxError, UnknownOperator
from .nominal import Atom, atom, is_atom_name
from .terms import OperatorFamily, OperatorInstance, Op, Term, Var

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<num>\d+)
  | (?P<punct>[()\[\],:=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, line_offset: int = 0) -> list[Token]:
    out: list[Token] = []
    pos = 0
    line, line_start = 1 + line_offset, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise TheorySyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek.text == text and self.peek.kind != "eof"

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.peek
        if tok.text != text or tok.kind == "eof":
            self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def ident(self, what: str = "identifier") -> Token:
        tok = self.peek
        if tok.kind != "ident":
            self.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        return self.next()

    def number(self) -> int:
        tok = self.peek
        if tok.kind != "num":
            self.error(f"expected a number, found {tok.text or 'end of input'!r}")
        return int(self.next().text)

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek
        raise TheorySyntaxError(message, tok.line, tok.col)

    def done(self) -> bool:
        return self.peek.kind == "eof"


def read_atom(ts: TokenStream) -> Atom:
    tok = ts.ident("an atom")
    if not is_atom_name(tok.text):
        ts.error(f"{tok.text!r} is not an atom name (use a..z or a<N>)", tok)
    return atom(tok.text)


def read_atom_list(ts: TokenStream, close: str) -> tuple[Atom, ...]:
    out: list[Atom] = []
    while not ts.at(close):
        start = ts.peek
        a = read_atom(ts)
        if a in out:
            ts.error(f"atom {a} repeated", start)
        out.append(a)
        ts.accept(",")
    ts.expect(close)
    return tuple(out)


def read_atom_tuple(ts: TokenStream) -> tuple[Atom, ...]:
    """``[a b c]`` or ``[a, b, c]``."""
    ts.expect("[")
    return read_atom_list(ts, "]")


def read_var_context(ts: TokenStream) -> tuple[tuple[str, int], ...]:
    """``(x:1, y:0)``."""
    ts.expect("(")
    out: list[tuple[str, int]] = []
    seen = set()
    while not ts.at(")"):
        tok = ts.ident("a variable")
        if tok.text in seen:
            ts.error(f"variable {tok.text} declared twice", tok)
        seen.add(tok.text)
        ts.expect(":")
        out.append((tok.text, ts.number()))
        if not ts.accept(","):
            break
    ts.expect(")")
    return tuple(out)


def read_term(
    ts: TokenStream,
    signature: Mapping[str, OperatorFamily],
    variables: Mapping[str, int] | None = None,
) -> Term:
    """Read one term.  Declared operators win; other identifiers are variables.

    With ``variables`` given, an identifier that is neither an operator nor a
    declared variable raises :class:`UnknownOperator`.
    """
    tok = ts.ident("a term")
    name = tok.text
    fam = signature.get(name)
    if fam is None:
        if (variables is not None and name not in variables) or ts.at("["):
            raise UnknownOperator(name, tok.line, tok.col)
        args: tuple[Atom, ...] = ()
        if ts.accept("("):
            args = read_atom_list(ts, ")")
        return Var(name, args)
    params: tuple[Atom, ...] = ()
    if ts.accept("["):
        params = _read_params(ts)
    children: list[Term] = []
    if ts.accept("("):
        while not ts.at(")"):
            children.append(read_term(ts, signature, variables))
            if not ts.accept(","):
                break
        ts.expect(")")
    if len(params) != fam.atom_params:
        ts.error(f"{name} takes {fam.atom_params} atom parameters, got {len(params)}", tok)
    if len(children) != fam.arity:
        ts.error(f"{name} takes {fam.arity} arguments, got {len(children)}", tok)
    return Op(OperatorInstance(fam, params), tuple(children))


def _read_params(ts: TokenStream) -> tuple[Atom, ...]:
    # operator parameters need not be distinct
    out: list[Atom] = []
    while not ts.at("]"):
        out.append(read_atom(ts))
        ts.accept(",")
    ts.expect("]")
    return tuple(out)


def parse_term(
    text: str,
    signature: Mapping[str, OperatorFamily],
    variables: Mapping[str, int] | None = None,
) -> Term:
    ts = TokenStream(tokenize(text))
    t = read_term(ts, signature, variables)
    if not ts.done():
        ts.error(f"trailing input {ts.peek.text!r}")
    return t

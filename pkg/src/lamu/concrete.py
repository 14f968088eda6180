"""Concrete syntax: tokenizer, recursive-descent parser for .luni
source files, pretty-printer, and the type-inference translation of
untyped lambda terms.

Grammar sketch (lowest precedence first):

    file     ::= decl* program
    decl     ::= 'cons' UP ':' type '.' | 'base' LOW '=' INT '.'
               | 'def' LOW '=' term '.'
    program  ::= 'fail' | term ('|' term)*
    term     ::= unifterm (';' term)?            -- right-assoc
    unifterm ::= appterm ('=:=' appterm)?        -- non-assoc
    appterm  ::= atom+ | lambda | freshterm
    lambda   ::= '\\' LOW ('@L' INT)? '.' program
    freshterm::= 'fresh' LOW '.' term
    atom     ::= LOW | UP | '(' term-or-lambda ')'

Variables are lowercase identifiers, constructors uppercase; ``Ok`` is
reserved.  Lambda and fresh bodies extend as far right as possible.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List

from .syntax import (
    Abs, AbsLoc, App, Cons, Fresh, Guard, LamuError, Program, Term,
    Unif, Var,
)
from .typecheck import Arrow, Base, Type


class ParseError(LamuError):
    def __init__(self, message, line=None, col=None):
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<unif>=:=)
  | (?P<arrow>->)
  | (?P<atloc>@L(?P<locnum>[0-9]+))
  | (?P<lower>[a-z][A-Za-z0-9_']*)
  | (?P<upper>[A-Z][A-Za-z0-9_']*)
  | (?P<int>[0-9]+)
  | (?P<punct>[\\.;|():=])
""", re.VERBOSE)

_KEYWORDS = {"fresh", "fail", "cons", "base", "def"}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup if m.lastgroup != "locnum" else "atloc"
        col = pos - line_start + 1
        value = m.group()
        if kind != "ws":
            if kind == "lower" and value in _KEYWORDS:
                kind = value
            if kind == "atloc":
                value = m.group("locnum")
            tokens.append(Token(kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, len(text) - line_start + 1))
    return tokens


@dataclass
class SourceFile:
    signature: Dict[str, Type] = field(default_factory=dict)
    base_sizes: Dict[str, int] = field(default_factory=dict)
    definitions: Dict[str, Term] = field(default_factory=dict)
    program: Program = field(default_factory=Program)


class _Parser:
    def __init__(self, tokens: List[Token], definitions=None):
        self.tokens = tokens
        self.pos = 0
        self.definitions: Dict[str, Term] = dict(definitions or {})

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind}, found {tok.text or tok.kind!r}",
                             tok.line, tok.col)
        return self.next()

    def error(self, message):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)

    # declarations ---------------------------------------------------------

    def parse_file(self) -> SourceFile:
        src = SourceFile()
        while self.peek().kind in ("cons", "base", "def"):
            kind = self.next().kind
            if kind == "cons":
                name = self.expect("upper").text
                self.expect_punct(":")
                ty = self.parse_type()
                src.signature[name] = ty
            elif kind == "base":
                name = self.expect("lower").text
                self.expect_punct("=")
                size = int(self.expect("int").text)
                src.base_sizes[name] = size
            else:
                name = self.expect("lower").text
                self.expect_punct("=")
                term = self.parse_term()
                self.definitions[name] = term
                src.definitions[name] = term
            self.expect_punct(".")
        src.program = self.parse_program()
        self.expect("eof")
        return src

    def expect_punct(self, ch):
        tok = self.peek()
        if tok.kind == "punct" and tok.text == ch:
            return self.next()
        raise ParseError(f"expected {ch!r}, found {tok.text or tok.kind!r}",
                         tok.line, tok.col)

    def at_punct(self, ch):
        tok = self.peek()
        return tok.kind == "punct" and tok.text == ch

    def parse_type(self) -> Type:
        left = self.parse_type_atom()
        if self.peek().kind == "arrow":
            self.next()
            return Arrow(left, self.parse_type())
        return left

    def parse_type_atom(self) -> Type:
        if self.at_punct("("):
            self.next()
            ty = self.parse_type()
            self.expect_punct(")")
            return ty
        return Base(self.expect("lower").text)

    # programs and terms ---------------------------------------------------

    def parse_program(self) -> Program:
        if self.peek().kind == "fail":
            self.next()
            return Program(())
        threads = [self.parse_term()]
        while self.at_punct("|"):
            self.next()
            threads.append(self.parse_term())
        return Program(tuple(threads))

    def parse_term(self) -> Term:
        left = self.parse_unifterm()
        if self.at_punct(";"):
            self.next()
            return Guard(left, self.parse_term())
        return left

    def parse_unifterm(self) -> Term:
        left = self.parse_appterm()
        if self.peek().kind == "unif":
            self.next()
            right = self.parse_appterm()
            if self.peek().kind == "unif":
                self.error("=:= is not associative; use parentheses")
            return Unif(left, right)
        return left

    def parse_appterm(self) -> Term:
        tok = self.peek()
        if tok.kind == "punct" and tok.text == "\\":
            return self.parse_lambda()
        if tok.kind == "fresh":
            return self.parse_fresh()
        term = self.parse_atom()
        while self.starts_atom():
            term = App(term, self.parse_atom())
        return term

    def parse_lambda(self) -> Term:
        self.expect_punct("\\")
        var = self.expect("lower").text
        loc = None
        if self.peek().kind == "atloc":
            loc = int(self.next().text)
        self.expect_punct(".")
        body = self.parse_program()
        if loc is None:
            return Abs(var, body)
        return AbsLoc(loc, var, body)

    def parse_fresh(self) -> Term:
        self.expect("fresh")
        var = self.expect("lower").text
        self.expect_punct(".")
        return Fresh(var, self.parse_term())

    def starts_atom(self) -> bool:
        tok = self.peek()
        return (tok.kind in ("lower", "upper")
                or (tok.kind == "punct" and tok.text == "("))

    def parse_atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "lower":
            self.next()
            if tok.text in self.definitions:
                return self.definitions[tok.text]
            return Var(tok.text)
        if tok.kind == "upper":
            self.next()
            return Cons(tok.text)
        if self.at_punct("("):
            self.next()
            inner = self.parse_term()
            self.expect_punct(")")
            return inner
        self.error(f"expected a term, found {tok.text or tok.kind!r}")


def parse_file(text: str) -> SourceFile:
    return _Parser(tokenize(text)).parse_file()


def parse_program(text: str, definitions=None) -> Program:
    parser = _Parser(tokenize(text), definitions)
    program = parser.parse_program()
    parser.expect("eof")
    return program


def parse_term(text: str, definitions=None) -> Term:
    parser = _Parser(tokenize(text), definitions)
    term = parser.parse_term()
    parser.expect("eof")
    return term


# ---------------------------------------------------------------------------
# Pretty-printing

_LVL_OPEN = 1    # lambda, fresh, guard chains
_LVL_UNIF = 2
_LVL_APP = 3
_LVL_ATOM = 4


def _intrinsic(t: Term) -> int:
    if isinstance(t, (Abs, AbsLoc, Fresh, Guard)):
        return _LVL_OPEN
    if isinstance(t, Unif):
        return _LVL_UNIF
    if isinstance(t, App):
        return _LVL_APP
    return _LVL_ATOM


def pretty_term(t: Term, ctx: int = _LVL_OPEN, rightmost: bool = True) -> str:
    parens = _intrinsic(t) < ctx or (
        isinstance(t, (Abs, AbsLoc, Fresh)) and not rightmost)
    rm = True if parens else rightmost
    if isinstance(t, Var):
        s = t.name
    elif isinstance(t, Cons):
        s = t.name
    elif isinstance(t, Abs):
        s = f"\\{t.var}. {pretty_program(t.body, rm)}"
    elif isinstance(t, AbsLoc):
        s = f"\\{t.var}@L{t.loc}. {pretty_program(t.body, rm)}"
    elif isinstance(t, Fresh):
        s = f"fresh {t.var}. {pretty_term(t.body, _LVL_OPEN, rm)}"
    elif isinstance(t, Guard):
        s = (f"{pretty_term(t.left, _LVL_UNIF, False)} ; "
             f"{pretty_term(t.right, _LVL_OPEN, rm)}")
    elif isinstance(t, Unif):
        s = (f"{pretty_term(t.left, _LVL_APP, False)} =:= "
             f"{pretty_term(t.right, _LVL_APP, rm)}")
    elif isinstance(t, App):
        s = (f"{pretty_term(t.fn, _LVL_APP, False)} "
             f"{pretty_term(t.arg, _LVL_ATOM, False)}")
    else:
        raise LamuError(f"cannot print {t!r}")
    return f"({s})" if parens else s


def pretty_program(p: Program, rightmost: bool = True) -> str:
    if p.is_fail:
        return "fail"
    parts = []
    last = len(p) - 1
    for i, t in enumerate(p):
        parts.append(pretty_term(t, _LVL_OPEN, rightmost and i == last))
    return " | ".join(parts)


def pretty(x) -> str:
    if isinstance(x, Program):
        return pretty_program(x)
    return pretty_term(x)


# ---------------------------------------------------------------------------
# Hindley-Milner translation of untyped lambda terms

HM_ARROW = "F"


class _HmNames:
    def __init__(self):
        self.n = 0

    def app_var(self) -> str:
        self.n += 1
        return f"b{self.n}"


def hm_translate(t: Term) -> Term:
    """Translate a pure untyped lambda term (Var, single-thread Abs,
    App) into a term that computes its principal type, encoding the
    arrow type A -> B as the structure F A B."""
    return _hm(t, _HmNames())


def _hm(t: Term, names: _HmNames) -> Term:
    if isinstance(t, Var):
        return Var(f"a_{t.name}")
    if isinstance(t, Abs):
        if len(t.body) != 1:
            raise LamuError("hm_translate input must be a pure lambda term")
        a_x = f"a_{t.var}"
        body = _hm(t.body.threads[0], names)
        return Fresh(a_x, App(App(Cons(HM_ARROW), Var(a_x)), body))
    if isinstance(t, App):
        a = names.app_var()
        fn = _hm(t.fn, names)
        arg = _hm(t.arg, names)
        goal = Unif(fn, App(App(Cons(HM_ARROW), arg), Var(a)))
        return Fresh(a, Guard(goal, Var(a)))
    raise LamuError("hm_translate input must be a pure lambda term")

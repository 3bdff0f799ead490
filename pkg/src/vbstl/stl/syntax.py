"""Concrete text syntax for formulas: printing, parsing and spec files.

Grammar, loosest binding first::

    formula  := or_f ( "=>" tag? scale? formula )?          right-associative
    or_f     := and_f ( "or" tag? and_f )*
    and_f    := until_f ( "and" tag? until_f )*
    until_f  := unary ( "until" interval? tag? unary )?
    unary    := "not" unary | ("alw" | "ev") interval? tag? unary
              | "#" NUMBER unary | atom
    atom     := "true" | "false" | "(" formula ")" | expr REL expr
    interval := "_"? "[" const "," (const | "inf") "]"
    tag      := "@max" | "@add"
    scale    := "#" NUMBER
    expr     := term (("+" | "-") term)*
    term     := factor (("*" | "/") factor)*
    factor   := NUMBER | "inf" | "-" factor | "(" expr ")" | "|" expr "|"
              | "abs" "(" expr ")" | NAME | NAME "(" "t" (("+" | "-") NUMBER)? ")"

``REL`` is one of ``< <= >= > == =`` (``=`` is read as ``==``). An omitted
interval means ``[0, inf)``, i.e. up to the end of the trace.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

from .ast import (
    INF, Abs, Always, And, BinOp, Const, Eventually, FalseConst, Formula, Implies, Neg, Not,
    Or, Predicate, Scaled, TrueConst, Until, Var, const_value, TRUE, FALSE,
)


class StlSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"{message} (line {line}, column {col})")
        self.message = message
        self.line = line
        self.col = col


class MalformedInterval(StlSyntaxError):
    pass


class SpecError(ValueError):
    pass


KEYWORDS = {"and", "or", "not", "alw", "ev", "until", "true", "false", "abs", "inf"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\n)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>=>|==|<=|>=|≤|≥|[<>=()\[\],@\#+\-*/|])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str  # num | name | op | end
    text: str
    line: int
    col: int
    value: float = 0.0


def tokenize(text: str, params: Mapping[str, float] | None = None) -> list[Token]:
    params = params or {}
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise StlSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok_text = m.group()
        col = pos - line_start + 1
        if kind == "ws":
            if tok_text == "\n":
                line += 1
                line_start = m.end()
        elif kind == "num":
            tokens.append(Token("num", tok_text, line, col, float(tok_text)))
        elif kind == "name" and tok_text in params:
            tokens.append(Token("num", tok_text, line, col, float(params[tok_text])))
        else:
            if tok_text == "≤":
                tok_text = "<="
            elif tok_text == "≥":
                tok_text = ">="
            tokens.append(Token(kind, tok_text, line, col))
        pos = m.end()
    tokens.append(Token("end", "<end of input>", line, pos - line_start + 1))
    return tokens


class _Backtrack(Exception):
    pass


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, offset: int = 1) -> Token:
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "name") and t.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.tok.text!r}")
        t = self.tok
        self.i += 1
        return t

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise StlSyntaxError(message, tok.line, tok.col)

    # formulas
    def parse(self) -> Formula:
        f = self.formula()
        if self.tok.kind != "end":
            self.fail(f"unexpected {self.tok.text!r}")
        return f

    def formula(self) -> Formula:
        left = self.or_f()
        if self.accept("=>"):
            sem = self.tag()
            scale = None
            if self.accept("#"):
                scale = self.positive_number()
            right = self.formula()
            return Implies(left, right, sem, scale)
        return left

    def or_f(self) -> Formula:
        f = self.and_f()
        while self.accept("or"):
            sem = self.tag()
            f = Or(f, self.and_f(), sem)
        return f

    def and_f(self) -> Formula:
        f = self.until_f()
        while self.accept("and"):
            sem = self.tag()
            f = And(f, self.until_f(), sem)
        return f

    def until_f(self) -> Formula:
        f = self.unary()
        if self.at("until") or self.at("until_"):
            self.i += 1
            a, b = self.interval()
            sem = self.tag()
            return Until(f, self.unary(), a, b, sem)
        return f

    def unary(self) -> Formula:
        if self.accept("not"):
            return Not(self.unary())
        t = self.tok
        if t.kind == "name" and t.text in ("alw", "alw_", "ev", "ev_"):
            self.i += 1
            a, b = self.interval()
            sem = self.tag()
            child = self.unary()
            cls = Always if t.text.startswith("alw") else Eventually
            return cls(child, a, b, sem)
        if self.accept("#"):
            k = self.positive_number()
            return Scaled(self.unary(), k)
        return self.atom()

    def atom(self) -> Formula:
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if self.at("("):
            save = self.i
            try:
                return self.predicate()
            except StlSyntaxError:
                self.i = save
            self.expect("(")
            f = self.formula()
            self.expect(")")
            return f
        return self.predicate()

    def predicate(self) -> Formula:
        lhs = self.expr()
        t = self.tok
        if t.kind == "op" and t.text in ("<", "<=", ">=", ">", "==", "="):
            self.i += 1
            op = "==" if t.text == "=" else t.text
            return Predicate(lhs, op, self.expr())
        self.fail(f"expected a comparison, found {t.text!r}")

    def tag(self) -> Optional[str]:
        if self.accept("@"):
            t = self.tok
            if t.kind == "name" and t.text in ("max", "add"):
                self.i += 1
                return t.text
            self.fail("semantics tag must be @max or @add")
        return None

    def positive_number(self) -> float:
        t = self.tok
        if t.kind != "num" or not t.value > 0:
            self.fail("expected a positive number")
        self.i += 1
        return t.value

    def interval(self) -> tuple[float, float]:
        if not self.at("["):
            return 0.0, INF
        open_tok = self.expect("[")
        a = self.bound()
        self.expect(",")
        b = self.bound()
        self.expect("]")
        if not (a >= 0 and b >= a) or math.isinf(a):
            raise MalformedInterval(f"malformed interval [{a:g}, {b:g}]", open_tok.line, open_tok.col)
        return a, b

    def bound(self) -> float:
        t = self.tok
        e = self.expr()
        v = const_value(e)
        if v is None or math.isnan(v):
            self.fail("interval bounds must be constant", t)
        return v

    # expressions
    def expr(self):
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.factor()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.factor())
        return e

    def factor(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Const(t.value)
        if self.accept("inf"):
            return Const(INF)
        if self.accept("-"):
            nxt = self.tok
            if nxt.kind == "num":
                self.i += 1
                return Const(-nxt.value)
            if self.accept("inf"):
                return Const(-INF)
            return Neg(self.factor())
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("|"):
            e = self.expr()
            self.expect("|")
            return Abs(e)
        if self.accept("abs"):
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return Abs(e)
        if t.kind == "name" and t.text not in KEYWORDS and t.text not in ("alw_", "ev_", "until_"):
            self.i += 1
            if self.at("(") and self.peek().kind == "name" and self.peek().text == "t":
                self.i += 2
                shift = 0.0
                if self.tok.kind == "op" and self.tok.text in ("+", "-"):
                    sign = -1.0 if self.tok.text == "-" else 1.0
                    self.i += 1
                    if self.tok.kind != "num":
                        self.fail("expected a time offset")
                    shift = sign * self.tok.value
                    self.i += 1
                self.expect(")")
                return Var(t.text, shift)
            return Var(t.text)
        self.fail(f"unexpected {t.text!r}")


def parse_stl(text: str, params: Mapping[str, float] | None = None) -> Formula:
    """Parse formula text; names in ``params`` are replaced by their values."""
    return Parser(tokenize(text, params)).parse()


# Printing ----------------------------------------------------------------------


def format_number(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def format_expr(e) -> str:
    if isinstance(e, Const):
        return format_number(e.value)
    if isinstance(e, Var):
        if e.shift == 0:
            return e.name
        sign = "+" if e.shift > 0 else "-"
        return f"{e.name}(t{sign}{format_number(abs(e.shift))})"
    if isinstance(e, BinOp):
        return f"({format_expr(e.left)} {e.op} {format_expr(e.right)})"
    if isinstance(e, Neg):
        return f"-({format_expr(e.arg)})"
    if isinstance(e, Abs):
        return f"abs({format_expr(e.arg)})"
    raise TypeError(f"not an expression: {e!r}")


def _interval(a: float, b: float) -> str:
    if a == 0 and math.isinf(b):
        return ""
    return f"_[{format_number(a)},{format_number(b)}]"


def _tag(sem: Optional[str]) -> str:
    return f"@{sem}" if sem else ""


def format_formula(f: Formula) -> str:
    """Render a formula in the concrete syntax accepted by :func:`parse_stl`."""
    return _fmt(f, top=True)


def _fmt(f: Formula, top: bool = False) -> str:
    if isinstance(f, TrueConst):
        return "true"
    if isinstance(f, FalseConst):
        return "false"
    if isinstance(f, Predicate):
        s = f"{format_expr(f.lhs)} {f.op} {format_expr(f.rhs)}"
    elif isinstance(f, Not):
        s = f"not {_fmt(f.child)}"
    elif isinstance(f, And):
        s = f"{_fmt(f.left)} and{_tag(f.sem)} {_fmt(f.right)}"
    elif isinstance(f, Or):
        s = f"{_fmt(f.left)} or{_tag(f.sem)} {_fmt(f.right)}"
    elif isinstance(f, Implies):
        scale = f"#{format_number(f.scale)}" if f.scale is not None else ""
        s = f"{_fmt(f.left)} =>{_tag(f.sem)}{scale} {_fmt(f.right)}"
    elif isinstance(f, Scaled):
        s = f"#{format_number(f.factor)} {_fmt(f.child)}"
    elif isinstance(f, Always):
        s = f"alw{_interval(f.a, f.b)}{_tag(f.sem)} {_fmt(f.child)}"
    elif isinstance(f, Eventually):
        s = f"ev{_interval(f.a, f.b)}{_tag(f.sem)} {_fmt(f.child)}"
    elif isinstance(f, Until):
        s = f"{_fmt(f.left)} until{_interval(f.a, f.b)}{_tag(f.sem)} {_fmt(f.right)}"
    else:
        raise TypeError(f"not a formula: {f!r}")
    return s if top else f"({s})"


# Spec files --------------------------------------------------------------------

_PARAM_RE = re.compile(r"^\s*param\s+([A-Za-z_][A-Za-z0-9_]*)\s*(?:=\s*(\S+))?\s*$")


def _is_comment(line: str) -> bool:
    s = line.lstrip()
    # "#3 (p)" is a scale prefix, not a comment
    return s.startswith("#") and not (len(s) > 1 and (s[1].isdigit() or s[1] == "."))


def read_spec(text: str, overrides: Mapping[str, float] | None = None) -> tuple[Formula, dict[str, float]]:
    """Parse spec-file text: ``#`` comments, ``param NAME = value`` lines, one formula.

    A ``param NAME`` line without a value declares a parameter the caller must
    supply through ``overrides``.
    """
    declared: dict[str, Optional[float]] = {}
    body = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if _is_comment(line) or not line.strip():
            body.append("")
            continue
        m = _PARAM_RE.match(line)
        if m:
            name, value = m.group(1), m.group(2)
            if name in KEYWORDS:
                raise SpecError(f"line {lineno}: parameter name {name!r} is reserved")
            try:
                declared[name] = float(value) if value is not None else None
            except ValueError:
                raise SpecError(f"line {lineno}: bad value for parameter {name!r}") from None
            body.append("")
            continue
        body.append(line)
    params = dict(declared)
    params.update(overrides or {})
    missing = sorted(k for k, v in params.items() if v is None)
    if missing:
        raise SpecError(f"parameters need values: {', '.join(missing)}")
    source = "\n".join(body)
    if not source.strip():
        raise SpecError("spec file contains no formula")
    return parse_stl(source, params), params  # type: ignore[arg-type]


def load_spec(path: str | Path, overrides: Mapping[str, float] | None = None) -> tuple[Formula, dict[str, float]]:
    return read_spec(Path(path).read_text(encoding="utf-8"), overrides)

"""Parser and printer for the plain-text system format.

    params: g L
    unknowns: x1 x2 lam
    equations:
      x1'' - lam*x1
      x2'' - lam*x2 + g
      x1^2 + x2^2 - L^2 = 0

Derivatives are written with trailing quotes or ``D(x, k)``.  Lines may hold
several equations separated by ``;``; ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..diffpoly import DerivVar, DiffPoly
from ..errors import InvalidSystem, NonIntegerExponent, ParseError, UndeclaredSymbol
from ..system import DAESystem

SECTIONS = ("params", "unknowns", "equations")

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+\.\d*|\.\d+|\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<quotes>'+)
  | (?P<op>[-+*/^(),=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    column: int  # 1-based


def tokenize(text: str, line: int = 0, offset: int = 0) -> list[Token]:
    out: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, offset + pos + 1)
        if m.lastgroup != "ws":
            out.append(Token(m.lastgroup, m.group(), offset + pos + 1))
        pos = m.end()
    out.append(Token("end", "", offset + len(text) + 1))
    return out


class _Parser:
    def __init__(self, tokens, unknowns, params, line):
        self.tokens = tokens
        self.pos = 0
        self.unknowns = {name: j for j, name in enumerate(unknowns, 1)}
        self.params = set(params)
        self.line = line

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, msg: str, tok: Token | None = None, cls=ParseError):
        tok = tok or self.tok
        return cls(msg, self.line, tok.column)

    def take(self, kind: str, text: str | None = None) -> Token:
        tok = self.tok
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            got = tok.text or "end of input"
            raise self.error(f"expected {want!r}, found {got!r}")
        self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def equation(self) -> DiffPoly:
        lhs = self.expr()
        if self.at("="):
            self.pos += 1
            lhs = lhs - self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return lhs

    def expr(self) -> DiffPoly:
        if self.at("-") or self.at("+"):
            neg = self.tok.text == "-"
            self.pos += 1
            acc = self.term()
            if neg:
                acc = -acc
        else:
            acc = self.term()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.pos += 1
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> DiffPoly:
        acc = self.power()
        while self.at("*") or self.at("/"):
            op = self.tok
            self.pos += 1
            rhs = self.power()
            if op.text == "*":
                acc = acc * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise self.error("division is only allowed by a nonzero number", op)
                acc = acc * DiffPoly.const(1 / rhs.constant_term())
        return acc

    def power(self) -> DiffPoly:
        if self.at("-"):
            self.pos += 1
            return -self.power()
        base = self.atom()
        while self.at("^"):
            self.pos += 1
            tok = self.tok
            if tok.kind != "num" or "." in tok.text:
                raise self.error(
                    "exponents must be non-negative integers", tok, NonIntegerExponent
                )
            self.pos += 1
            base = base ** int(tok.text)
        return base

    def atom(self) -> DiffPoly:
        tok = self.tok
        if tok.kind == "num":
            self.pos += 1
            return DiffPoly.const(Fraction(tok.text))
        if self.at("("):
            self.pos += 1
            inner = self.expr()
            self.take("op", ")")
            return inner
        if tok.kind == "ident":
            self.pos += 1
            if tok.text == "D" and self.at("("):
                self.pos += 1
                name = self.take("ident")
                self.take("op", ",")
                k = self.take("num")
                if "." in k.text:
                    raise self.error("derivative order must be an integer", k)
                self.take("op", ")")
                return DiffPoly.var(self.variable(name, int(k.text)))
            order = 0
            if self.tok.kind == "quotes":
                order = len(self.tok.text)
                self.pos += 1
            return DiffPoly.var(self.variable(tok, order))
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")

    def variable(self, tok: Token, order: int) -> DerivVar:
        if tok.text in self.unknowns:
            return DerivVar(self.unknowns[tok.text], order)
        if tok.text in self.params:
            if order:
                raise self.error(f"parameter {tok.text!r} cannot be differentiated", tok)
            return DerivVar(0, 0, tok.text)
        raise self.error(f"undeclared symbol {tok.text!r}", tok, UndeclaredSymbol)


def parse_expression(
    text: str, unknowns, params=(), line: int = 0, offset: int = 0
) -> DiffPoly:
    return _Parser(tokenize(text, line, offset), unknowns, params, line).equation()


def parse_variable_name(s: DAESystem, name: str) -> DerivVar:
    p = parse_expression(name.strip(), s.unknowns, s.params)
    vs = p.variables()
    if len(p) != 1 or len(vs) != 1 or p != DiffPoly.var(next(iter(vs))):
        raise ParseError(f"{name!r} is not a single variable name")
    return next(iter(vs))


def _split_section(line: str):
    m = re.match(r"\s*(params|unknowns|equations)\s*:", line)
    if m:
        return m.group(1), m.end()
    return None, 0


def parse_system(text: str) -> DAESystem:
    params: list[str] = []
    unknowns: list[str] = []
    raw_eqs: list[tuple[str, int, int]] = []
    section = None
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        name, start = _split_section(line)
        if name:
            if name in seen:
                raise ParseError(f"section {name!r} appears twice", lineno, 1)
            seen.add(name)
            section = name
        body = line[start:]
        if not body.strip():
            continue
        if section is None:
            raise ParseError("text before the first section header", lineno, 1)
        if section in ("params", "unknowns"):
            target = params if section == "params" else unknowns
            for m in re.finditer(r"[^\s,]+", body):
                ident = m.group()
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", ident) or ident == "D":
                    raise ParseError(f"bad identifier {ident!r}", lineno, start + m.start() + 1)
                target.append(ident)
        else:
            col = start
            for piece in body.split(";"):
                if piece.strip():
                    raw_eqs.append((piece, lineno, col))
                col += len(piece) + 1
    if "unknowns" not in seen:
        raise ParseError("missing 'unknowns:' section", 1, 1)
    if not raw_eqs:
        raise ParseError("no equations", 1, 1)
    equations = [
        parse_expression(piece, unknowns, params, lineno, col)
        for piece, lineno, col in raw_eqs
    ]
    try:
        return DAESystem(tuple(equations), tuple(unknowns), tuple(params))
    except InvalidSystem:
        raise
    except ValueError as exc:  # pragma: no cover - defensive
        raise InvalidSystem(str(exc)) from exc


def format_system(s: DAESystem) -> str:
    lines = []
    if s.params:
        lines.append("params: " + " ".join(s.params))
    lines.append("unknowns: " + " ".join(s.unknowns))
    lines.append("equations:")
    lines.extend("  " + s.format_poly(f) for f in s.equations)
    return "\n".join(lines) + "\n"

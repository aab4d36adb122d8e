"""Recursive-descent parser for exact rational expressions.

Grammar (EBNF), shared with the metric file format::

    expr     = term { ("+" | "-") term } ;
    term     = unary { ("*" | "/") unary } ;
    unary    = ("+" | "-") unary | power ;
    power    = atom [ ("^" | "**") exponent ] ;
    exponent = [ "+" | "-" ] integer | "(" [ "+" | "-" ] integer ")" ;
    atom     = integer | identifier | "(" expr ")" ;

Identifiers must be registered in the symbol context.
"""

from __future__ import annotations

import re

from .expr import Expr

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}" + (f" in {text!r}" if text else ""))
        self.position = position


def _tokenize(text: str):
    pos = 0
    out = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("int", m.group(1), start))
        elif m.group(2):
            out.append(("name", m.group(2), start))
        else:
            out.append(("op", m.group(3), start))
        pos = m.end()
    out.append(("end", "", n))
    return out


class _Parser:
    def __init__(self, text: str, ctx):
        self.text = text
        self.ctx = ctx
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}", tok[2], self.text)

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, tok[2], self.text)

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()
            rhs_tok = self.peek()
            rhs = self.unary()
            if op[1] == "*":
                e = e * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", rhs_tok[2], self.text)
                e = e / rhs
        return e

    def unary(self) -> Expr:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            e = self.unary()
            return -e if tok[1] == "-" else e
        return self.power()

    def power(self) -> Expr:
        base_tok = self.peek()
        e = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("^", "**"):
            self.take()
            k = self.exponent()
            if k < 0 and e.is_zero():
                raise ParseError("division by zero", base_tok[2], self.text)
            e = e**k
        return e

    def exponent(self) -> int:
        paren = False
        if self.peek()[1] == "(":
            self.take()
            paren = True
        sign = 1
        if self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        tok = self.take()
        if tok[0] != "int":
            raise ParseError("exponent must be an integer", tok[2], self.text)
        if paren:
            self.expect(")")
        return sign * int(tok[1])

    def atom(self) -> Expr:
        tok = self.take()
        kind, value, pos = tok
        if kind == "int":
            return Expr.const(int(value))
        if kind == "name":
            if value not in self.ctx:
                raise ParseError(f"unknown symbol {value!r}", pos, self.text)
            return self.ctx[value]
        if value == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "end":
            raise ParseError("unexpected end of input", pos, self.text)
        raise ParseError(f"unexpected token {value!r}", pos, self.text)


def parse_expression(text: str, ctx) -> Expr:
    """Parse ``text`` into a canonical :class:`Expr` over ``ctx``'s symbols."""
    return _Parser(text, ctx).parse()

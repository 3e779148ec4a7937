"""Expressions in T and pi with rational literals.

Grammar, loosest binding first::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' int)?        int may carry a sign or parentheses
    atom  := NUMBER | 'pi' | 'T' | '(' expr ')'
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .laurent import LaurentPoly, RatFunc


class ExprError(ValueError):
    def __init__(self, msg, pos, text):
        self.pos = pos
        self.text = text
        super().__init__(f"{msg} at position {pos}: {text!r}")


@dataclass(frozen=True)
class Num:
    value: Fraction
    pos: int = 0


@dataclass(frozen=True)
class Sym:
    name: str
    pos: int = 0


@dataclass(frozen=True)
class Neg:
    arg: object
    pos: int = 0


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    pos: int = 0


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int
    pos: int = 0


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(\S))")


def _tokenize(text):
    toks = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None or m.end() == i:
            break
        if m.group(1):
            toks.append(("num", m.group(1), m.start(1)))
        elif m.group(2):
            toks.append(("name", m.group(2), m.start(2)))
        elif m.group(3):
            toks.append(("op", m.group(3), m.start(3)))
        i = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ExprError(msg, tok[2], self.text)

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            self.error(f"expected {value!r}", tok)
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty expression")
        node = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            tok = self.take()
            node = BinOp(tok[1], node, self.term(), tok[2])
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            tok = self.take()
            node = BinOp(tok[1], node, self.unary(), tok[2])
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return Neg(self.unary(), tok[2])
        if tok[0] == "op" and tok[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            return Pow(base, self.exponent(), tok[2])
        return base

    def exponent(self):
        tok = self.peek()
        if tok[1] == "(":
            self.take()
            k = self.exponent()
            self.expect(")")
            return k
        sign = 1
        if tok[0] == "op" and tok[1] in ("-", "+"):
            self.take()
            sign = -1 if tok[1] == "-" else 1
            tok = self.peek()
        if tok[0] != "num":
            self.error("exponent must be an integer literal", tok)
        self.take()
        nxt = self.peek()
        if nxt[0] == "op" and nxt[1] == ".":
            self.error("exponent must be an integer literal", nxt)
        return sign * int(tok[1])

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == ".":
                self.error("decimal literals are not supported; write a fraction", nxt)
            return Num(Fraction(int(val)), pos)
        if kind == "name":
            if val not in ("pi", "T"):
                self.error(f"unknown symbol {val!r}", tok)
            return Sym(val, pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected {val!r}", tok)


def parse_ast(text):
    return _Parser(text).parse()


def evaluate(node, config, text=""):
    """Exact RatFunc value of an AST over ``config``."""
    if isinstance(node, Num):
        return RatFunc(LaurentPoly.const(config, node.value))
    if isinstance(node, Sym):
        if node.name == "T":
            return RatFunc(LaurentPoly.T(config))
        return RatFunc(LaurentPoly.const(config, config.pi))
    if isinstance(node, Neg):
        return -evaluate(node.arg, config, text)
    if isinstance(node, Pow):
        base = evaluate(node.base, config, text)
        if node.exp < 0 and base.is_zero():
            raise ExprError("negative power of zero", node.pos, text)
        return _simplify(base ** node.exp)
    a = evaluate(node.left, config, text)
    b = evaluate(node.right, config, text)
    if node.op == "+":
        return _simplify(a + b)
    if node.op == "-":
        return _simplify(a - b)
    if node.op == "*":
        return _simplify(a * b)
    if b.is_zero():
        raise ExprError("division by zero", node.pos, text)
    return _simplify(a / b)


def _simplify(f):
    lp = f.as_laurent()
    return RatFunc(lp) if lp is not None else f


def parse_expr(text, config):
    """Parse to a LaurentPoly when possible, otherwise a RatFunc."""
    f = evaluate(parse_ast(text), config, text)
    lp = f.as_laurent()
    return lp if lp is not None else f


def render(f):
    """Text that parses back to an equal function."""
    if isinstance(f, RatFunc):
        lp = f.as_laurent()
        if lp is not None:
            return render(lp)
        return f"({render(f.num)})/({render(f.den)})"
    if isinstance(f, LaurentPoly):
        if f.is_zero():
            return "0"
        parts = []
        for k in sorted(f.terms):
            c = f.terms[k]
            mono = "" if k == 0 else ("T" if k == 1 else f"T^{k}")
            coef = f"({c})"
            parts.append(coef if not mono else f"{coef}*{mono}")
        return " + ".join(parts)
    if isinstance(f, (Num, Sym, Neg, BinOp, Pow)):
        return render_ast(f)
    raise TypeError(f"cannot render {type(f).__name__}")


def render_ast(node):
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Neg):
        return f"-({render_ast(node.arg)})"
    if isinstance(node, Pow):
        return f"({render_ast(node.base)})^({node.exp})"
    return f"({render_ast(node.left)}) {node.op} ({render_ast(node.right)})"

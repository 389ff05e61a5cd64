"""Expression language for generating functions of (xi, eta).

Grammar::

    expr     := term (('+' | '-') term)*
    term     := factor (('*' | '/') factor)*
    factor   := '-' factor | power
    power    := base ('^' exponent)?
    exponent := signed_number | '(' signed_number ')'
    base     := number | 'xi' | 'eta' | param | '(' expr ')' | func '(' args ')'

Unary minus binds looser than ``^``, so ``-xi^2`` is ``-(xi^2)``.
The Greek letters ``ξ`` and ``η`` are accepted as aliases of the variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from ..errors import ExprSyntaxError, UnboundParameter

VARIABLES = ("xi", "eta")
_VAR_ALIASES = {"xi": "xi", "eta": "eta", "ξ": "xi", "η": "eta"}

UNARY_FUNCS = ("sin", "cos", "tan", "sinh", "cosh", "tanh",
               "exp", "log", "sqrt", "abs")
BINARY_FUNCS = ("atan2",)
ZPOW_FUNCS = ("rezpow", "imzpow", "rejpow", "imjpow")
FUNCTIONS = UNARY_FUNCS + BINARY_FUNCS + ZPOW_FUNCS


# -- AST -----------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Param:
    name: str
    value: float


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: float


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


@dataclass(frozen=True)
class ZPow:
    """Real or imaginary part of (xi + i eta)^n or (xi + j eta)^n, j^2 = 1."""
    func: str
    n: int


@dataclass(frozen=True)
class ScalarField:
    """A parsed generating function with all of its parameters bound."""
    ast: object
    params: Mapping[str, float] = field(default_factory=dict, compare=False)
    source: str = field(default="", compare=False)

    def pretty(self) -> str:
        return pretty(self.ast)

    def __str__(self):
        return self.pretty()


# -- tokenizer -------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_ξη][A-Za-z_0-9ξη]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str   # 'num', 'ident', 'op', 'eof'
    text: str
    offset: int


def _tokenize(source):
    toks = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExprSyntaxError(pos, ["number", "name", "operator"],
                                  source[pos], source)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(source)))
    return toks


# -- parser ------------------------------------------------------------------------

_OPERAND_START = ["number", "xi", "eta", "parameter", "function", "(", "-"]


class _Parser:
    def __init__(self, source, params):
        self.source = source
        self.params = params
        self.toks = _tokenize(source)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def _fail(self, expected):
        t = self.tok
        raise ExprSyntaxError(t.offset, expected,
                              None if t.kind == "eof" else t.text, self.source)

    def _take(self, text):
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def _expect(self, text):
        if not self._take(text):
            self._fail([text])

    def parse(self):
        node = self.expr()
        if self.tok.kind != "eof":
            self._fail(["+", "-", "*", "/", "^", "end of input"])
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self._take("-"):
            return Neg(self.factor())
        return self.power()

    def power(self):
        base = self.base()
        if self._take("^"):
            return Pow(base, self.exponent())
        return base

    def exponent(self):
        if self._take("("):
            value = self.signed_number()
            self._expect(")")
            return value
        return self.signed_number()

    def signed_number(self):
        sign = 1.0
        if self._take("-"):
            sign = -1.0
        elif self._take("+"):
            pass
        if self.tok.kind != "num":
            self._fail(["number"])
        value = float(self.tok.text)
        self.i += 1
        return sign * value

    def base(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Num(float(t.text))
        if t.kind == "op" and t.text == "(":
            self.i += 1
            node = self.expr()
            self._expect(")")
            return node
        if t.kind == "ident":
            self.i += 1
            if t.text in _VAR_ALIASES:
                return Var(_VAR_ALIASES[t.text])
            if t.text in FUNCTIONS:
                return self.call(t)
            if t.text not in self.params:
                raise UnboundParameter(t.text)
            return Param(t.text, float(self.params[t.text]))
        self._fail(_OPERAND_START)

    def call(self, name_tok):
        name = name_tok.text
        self._expect("(")
        if name in ZPOW_FUNCS:
            t = self.tok
            if t.kind != "num":
                self._fail(["positive integer"])
            value = float(t.text)
            if not value.is_integer() or value < 1:
                raise ExprSyntaxError(t.offset, ["positive integer"], t.text,
                                      self.source)
            self.i += 1
            self._expect(")")
            return ZPow(name, int(value))
        arity = 2 if name in BINARY_FUNCS else 1
        args = [self.expr()]
        while len(args) < arity:
            self._expect(",")
            args.append(self.expr())
        self._expect(")")
        return Call(name, tuple(args))


def parse(source: str, params: Mapping[str, float] | None = None) -> ScalarField:
    """Parse `source` into a `ScalarField`, binding the named `params`."""
    params = dict(params or {})
    for name in params:
        if name in _VAR_ALIASES or name in FUNCTIONS:
            raise ExprSyntaxError(0, ["parameter name"], name, source)
    ast = _Parser(source, params).parse()
    used = {n.name for n in walk(ast) if isinstance(n, Param)}
    return ScalarField(ast, {k: float(v) for k, v in params.items() if k in used},
                       source)


def walk(node):
    yield node
    if isinstance(node, Neg):
        yield from walk(node.arg)
    elif isinstance(node, BinOp):
        yield from walk(node.left)
        yield from walk(node.right)
    elif isinstance(node, Pow):
        yield from walk(node.base)
    elif isinstance(node, Call):
        for a in node.args:
            yield from walk(a)


# -- pretty printer ------------------------------------------------------------------

_ADD, _MUL, _UNARY, _POW, _ATOM = 1, 2, 3, 4, 5


def _fmt_number(v):
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _pp(node):
    """Return (text, precedence level)."""
    if isinstance(node, Num):
        return _fmt_number(node.value), _ATOM
    if isinstance(node, (Var, Param)):
        return node.name, _ATOM
    if isinstance(node, ZPow):
        return "%s(%d)" % (node.func, node.n), _ATOM
    if isinstance(node, Call):
        return "%s(%s)" % (node.func, ", ".join(pretty(a) for a in node.args)), _ATOM
    if isinstance(node, Neg):
        return "-" + _wrap(node.arg, _UNARY), _UNARY
    if isinstance(node, Pow):
        e = node.exponent
        etext = _fmt_number(e) if e >= 0 else "(%s)" % _fmt_number(e)
        return "%s^%s" % (_wrap(node.base, _ATOM), etext), _POW
    if isinstance(node, BinOp):
        level = _ADD if node.op in "+-" else _MUL
        left = _wrap(node.left, level)
        right = _wrap(node.right, level + 1)
        return "%s %s %s" % (left, node.op, right), level
    raise TypeError("not an expression node: %r" % (node,))


def _wrap(node, min_level):
    text, level = _pp(node)
    return text if level >= min_level else "(" + text + ")"


def pretty(node) -> str:
    return _pp(node)[0]


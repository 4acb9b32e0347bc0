"""ASCII expression grammar: parser and the session context of declared names.

Grammar (operators by increasing precedence): `+ -`, `* /`, unary minus,
`^` (right-associative).  Primaries are integers, parenthesized expressions,
base variables (`zeta` may be written `z`), declared parameters, the
imaginary unit `I`, and applications of declared uninterpreted functions
`f(arg, ...)`, optionally with a formal derivative tag `f@(1,1,2)(arg, ...)`.

Exponents must reduce to rational functions of parameters.  Printing (see
expr._print_expr) emits fully parenthesized normal form; parse(print(e)) == e
on canonical expressions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .expr import ALL_VARS, Expr, ExprError, expr_pow
from .ratfunc import Q2_I

VAR_ALIASES = {"z": "zeta"}

PARAM_KINDS = ("exponent", "mass", "constant")


@dataclass(frozen=True)
class Context:
    """Declared parameter and function names visible to the parser."""

    params: dict[str, str] = field(default_factory=dict)
    funcs: frozenset[str] = frozenset()

    def __post_init__(self):
        for name, kind in self.params.items():
            if kind not in PARAM_KINDS:
                raise ValueError(f"unknown parameter kind {kind!r} for {name!r}")
            if name in ALL_VARS or name in VAR_ALIASES or name == "I":
                raise ValueError(f"parameter name {name!r} collides with a reserved symbol")

    def with_params(self, **kinds: str) -> "Context":
        p = dict(self.params)
        p.update(kinds)
        return replace(self, params=p)

    def with_funcs(self, *names: str) -> "Context":
        return replace(self, funcs=self.funcs | set(names))

    def mass_params(self) -> frozenset[str]:
        return frozenset(n for n, k in self.params.items() if k == "mass")


def default_context() -> Context:
    return Context(
        params={
            "x": "exponent",
            "y": "exponent",
            "yh": "exponent",
            "s": "exponent",
            "M": "mass",
            "m": "mass",
            "m0": "constant",
            "k0": "constant",
            "k0p": "constant",
            "p01": "constant",
            "lam": "constant",
        },
        funcs=frozenset({"f", "fb"}),
    )


DEFAULT_CONTEXT = default_context()


class ParseError(ExprError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} (at position {pos})")
        self.pos = pos


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([()+\-*/^@,]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos:].strip()[0]!r}", pos)
            break
        if m.group(1):
            toks.append(("num", int(m.group(1)), m.start(1)))
        elif m.group(2):
            toks.append(("ident", m.group(2), m.start(2)))
        else:
            toks.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ctx: Context):
        self.toks = _tokenize(text)
        self.i = 0
        self.ctx = ctx

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op: str):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, got {val!r}", pos)

    def parse(self) -> Expr:
        e = self.sum()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"trailing input starting with {val!r}", pos)
        return e

    def sum(self) -> Expr:
        e = self.product()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.product()
                e = e + rhs if val == "+" else e - rhs
            else:
                return e

    def product(self) -> Expr:
        e = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                rhs = self.unary()
                e = e * rhs if val == "*" else e / rhs
            else:
                return e

    def unary(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return -self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.next()
            exp = self.unary()  # right-assoc via recursion in unary->power
            try:
                return expr_pow(base, exp.as_ratfunc())
            except ExprError as exc:
                raise ParseError(f"exponent is not a rational function: {exc}", pos)
        return base

    def primary(self) -> Expr:
        kind, val, pos = self.next()
        if kind == "num":
            return Expr.number(val)
        if kind == "op" and val == "(":
            e = self.sum()
            self.expect(")")
            return e
        if kind == "ident":
            return self.ident(val, pos)
        raise ParseError(f"unexpected token {val!r}", pos)

    def ident(self, name: str, pos: int) -> Expr:
        name = VAR_ALIASES.get(name, name)
        if name == "I":
            return Expr.number(Q2_I)
        if name in ALL_VARS:
            return Expr.var(name)
        if name in self.ctx.funcs:
            return self.call(name)
        if name in self.ctx.params:
            return Expr.param(name)
        raise ParseError(f"unknown identifier {name!r}", pos)

    def call(self, fname: str) -> Expr:
        derivs_idx: list[int] = []
        kind, val, _ = self.peek()
        if kind == "op" and val == "@":
            self.next()
            self.expect("(")
            while True:
                k, v, p = self.next()
                if k != "num" or v < 1:
                    raise ParseError("derivative tag expects positive argument indices", p)
                derivs_idx.append(v)
                k, v, p = self.next()
                if k == "op" and v == ",":
                    continue
                if k == "op" and v == ")":
                    break
                raise ParseError("malformed derivative tag", p)
        self.expect("(")
        args = [self.sum()]
        while True:
            kind, val, pos = self.next()
            if kind == "op" and val == ",":
                args.append(self.sum())
            elif kind == "op" and val == ")":
                break
            else:
                raise ParseError(f"expected ',' or ')' in argument list, got {val!r}", pos)
        derivs = [0] * len(args)
        for idx in derivs_idx:
            if idx > len(args):
                raise ParseError(f"derivative index {idx} exceeds arity {len(args)}", 0)
            derivs[idx - 1] += 1
        return Expr.func(fname, args, derivs)


def parse(text: str, ctx: Context = DEFAULT_CONTEXT) -> Expr:
    """Parse an expression in the session context; canonical by construction."""
    return _Parser(text, ctx).parse()

"""Exact scalar arithmetic: Gaussian rationals, multivariate polynomials in
symbolic parameters, and normalized rational functions of those parameters.

Rational functions (`RatFunc`) are the coefficient and exponent domain of the
expression kernel.  Canonical form: numerator/denominator with their gcd
removed and the denominator monic under lex monomial order, so structural
equality decides mathematical equality.
"""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Mapping, Union

ScalarLike = Union[int, Fraction, "Q2"]


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@total_ordering
class Q2:
    """A Gaussian rational a + b*I with exact Fraction parts.

    The imaginary unit of the kernel lives here, so I^2 -> -1 happens in
    ordinary coefficient arithmetic rather than as a rewrite rule.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: int | Fraction = 0, im: int | Fraction = 0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Q2 is immutable")

    @staticmethod
    def of(v: ScalarLike) -> "Q2":
        if isinstance(v, Q2):
            return v
        return Q2(Fraction(v))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_one(self) -> bool:
        return self.re == 1 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1

    def conjugate(self) -> "Q2":
        return Q2(self.re, -self.im)

    def __add__(self, o) -> "Q2":
        o = Q2.of(o)
        return Q2(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "Q2":
        return Q2(-self.re, -self.im)

    def __sub__(self, o) -> "Q2":
        return self + (-Q2.of(o))

    def __rsub__(self, o) -> "Q2":
        return Q2.of(o) + (-self)

    def __mul__(self, o) -> "Q2":
        o = Q2.of(o)
        return Q2(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inv(self) -> "Q2":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return Q2(self.re / n, -self.im / n)

    def __truediv__(self, o) -> "Q2":
        return self * Q2.of(o).inv()

    def __rtruediv__(self, o) -> "Q2":
        return Q2.of(o) * self.inv()

    def __pow__(self, n: int) -> "Q2":
        if n < 0:
            return self.inv() ** (-n)
        out, base = Q2(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, o) -> bool:
        if isinstance(o, (int, Fraction)):
            o = Q2(o)
        if not isinstance(o, Q2):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __lt__(self, o) -> bool:
        # Lexicographic; only used for deterministic ordering, not analysis.
        o = Q2.of(o)
        return (self.re, self.im) < (o.re, o.im)

    def __hash__(self):
        return hash((self.re, self.im))

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __str__(self) -> str:
        if self.im == 0:
            return _frac_str(self.re)
        if self.re == 0:
            if self.im == 1:
                return "I"
            if self.im == -1:
                return "-I"
            return f"{_frac_str(self.im)}*I"
        sign = "+" if self.im > 0 else "-"
        imag = abs(self.im)
        istr = "I" if imag == 1 else f"{_frac_str(imag)}*I"
        return f"{_frac_str(self.re)} {sign} {istr}"

    def __repr__(self) -> str:
        return f"Q2({self.re!r}, {self.im!r})"


Q2_ZERO = Q2(0)
Q2_ONE = Q2(1)
Q2_I = Q2(0, 1)


# A monomial is a sorted tuple of (param_name, positive_int_power).
Monomial = tuple[tuple[str, int], ...]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    d = dict(a)
    for name, p in b:
        d[name] = d.get(name, 0) + p
    return tuple(sorted((k, v) for k, v in d.items() if v != 0))


def _mono_vec(m: Monomial, names: tuple[str, ...]) -> tuple[int, ...]:
    d = dict(m)
    return tuple(d.get(n, 0) for n in names)


class Poly:
    """Multivariate polynomial in named parameters over Q2."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Q2]):
        object.__setattr__(self, "terms", {m: c for m, c in terms.items() if not c.is_zero()})

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Poly is immutable")

    @staticmethod
    def const(c: ScalarLike) -> "Poly":
        c = Q2.of(c)
        return Poly({(): c}) if not c.is_zero() else Poly({})

    @staticmethod
    def var(name: str) -> "Poly":
        return Poly({((name, 1),): Q2_ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(m == () for m in self.terms)

    def const_value(self) -> Q2:
        if self.is_zero():
            return Q2_ZERO
        if not self.is_const():
            raise ValueError("not a constant polynomial")
        return self.terms[()]

    def variables(self) -> set[str]:
        return {name for m in self.terms for name, _ in m}

    def __add__(self, o: "Poly") -> "Poly":
        t = dict(self.terms)
        for m, c in o.terms.items():
            t[m] = t.get(m, Q2_ZERO) + c
        return Poly(t)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, o: "Poly") -> "Poly":
        return self + (-o)

    def __mul__(self, o: "Poly") -> "Poly":
        t: dict[Monomial, Q2] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = _mono_mul(m1, m2)
                t[m] = t.get(m, Q2_ZERO) + c1 * c2
        return Poly(t)

    def scale(self, c: Q2) -> "Poly":
        if c.is_zero():
            return Poly({})
        return Poly({m: cc * c for m, cc in self.terms.items()})

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out, base = Poly.const(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, o) -> bool:
        return isinstance(o, Poly) and self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def leading(self) -> tuple[Monomial, Q2]:
        """Leading term under lex order over the sorted variable names."""
        names = tuple(sorted(self.variables()))
        m = max(self.terms, key=lambda mm: _mono_vec(mm, names))
        return m, self.terms[m]

    # -- univariate views (used by gcd) --------------------------------

    def degree_in(self, v: str) -> int:
        return max((dict(m).get(v, 0) for m in self.terms), default=0)

    def coeffs_in(self, v: str) -> dict[int, "Poly"]:
        out: dict[int, dict[Monomial, Q2]] = {}
        for m, c in self.terms.items():
            d = dict(m)
            k = d.pop(v, 0)
            rest = tuple(sorted(d.items()))
            out.setdefault(k, {})[rest] = out.get(k, {}).get(rest, Q2_ZERO) + c
        return {k: Poly(t) for k, t in out.items()}

    @staticmethod
    def from_coeffs_in(v: str, coeffs: Mapping[int, "Poly"]) -> "Poly":
        t: dict[Monomial, Q2] = {}
        for k, p in coeffs.items():
            for m, c in p.terms.items():
                mm = _mono_mul(m, ((v, k),)) if k else m
                t[mm] = t.get(mm, Q2_ZERO) + c
        return Poly(t)

    def eval(self, env: Mapping[str, ScalarLike]) -> Q2:
        out = Q2_ZERO
        for m, c in self.terms.items():
            v = c
            for name, p in m:
                if name not in env:
                    raise KeyError(f"unbound parameter {name!r}")
                v = v * Q2.of(env[name]) ** p
            out = out + v
        return out

    def conj_params(self, flips: Iterable[str]) -> "Poly":
        """Complex-conjugate coefficients and flip the sign of listed params."""
        fl = set(flips)
        t: dict[Monomial, Q2] = {}
        for m, c in self.terms.items():
            sgn = sum(p for name, p in m if name in fl)
            cc = c.conjugate() * (Q2(-1) ** sgn)
            t[m] = t.get(m, Q2_ZERO) + cc
        return Poly(t)

    def subs(self, env: Mapping[str, "RatFunc"]) -> "RatFunc":
        out = RatFunc.const(0)
        for m, c in self.terms.items():
            v = RatFunc.from_q2(c)
            for name, p in m:
                base = env.get(name, RatFunc.param(name))
                v = v * base ** p
            out = out + v
        return out

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        names = tuple(sorted(self.variables()))
        parts = []
        for m in sorted(self.terms, key=lambda mm: _mono_vec(mm, names), reverse=True):
            c = self.terms[m]
            factors = [f"{n}^{p}" if p > 1 else n for n, p in m]
            cs = str(c)
            if " " in cs:  # complex with two parts: keep it one token
                cs = f"({cs})"
            if factors and c.is_one():
                parts.append("*".join(factors))
            elif factors and c == Q2(-1):
                parts.append("-" + "*".join(factors))
            else:
                parts.append("*".join([cs] + factors))
        s = parts[0]
        for p in parts[1:]:
            s += " - " + p[1:] if p.startswith("-") else " + " + p
        return s

    def __repr__(self) -> str:
        return f"Poly({self})"


def _poly_content_and_primitive(p: Poly, v: str) -> tuple[Poly, Poly]:
    coeffs = p.coeffs_in(v)
    cont = None
    for c in coeffs.values():
        cont = c if cont is None else poly_gcd(cont, c)
        if cont.is_const():
            break
    assert cont is not None
    return cont, poly_exact_div(p, cont)


def poly_exact_div(p: Poly, d: Poly) -> Poly:
    """Exact division p/d; raises if d does not divide p."""
    if d.is_const():
        return p.scale(d.const_value().inv())
    if p.is_zero():
        return p
    v = sorted(d.variables())[-1]
    q, (r, scale) = _pseudo_divmod(p, d, v)
    if not r.is_zero():
        raise ArithmeticError("inexact polynomial division")
    # pseudo-division scaled p by lc(d)^k; lc(d) is free of v, so recurse
    return poly_exact_div(q, scale)


def _pseudo_divmod(p: Poly, d: Poly, v: str) -> tuple[Poly, tuple[Poly, Poly]]:
    """Pseudo-division in variable v: lc(d)^k * p = q*d + r with deg_v r < deg_v d.

    Returns (q, (r, lc(d)^k)).
    """
    dd = d.degree_in(v)
    dcs = d.coeffs_in(v)
    lc = dcs[dd]
    q = Poly({})
    r = p
    scale = Poly.const(1)
    while not r.is_zero() and r.degree_in(v) >= dd:
        rd = r.degree_in(v)
        rcs = r.coeffs_in(v)
        rlc = rcs[rd]
        term = Poly.from_coeffs_in(v, {rd - dd: rlc})
        q = q * lc + term
        r = r * lc - term * d
        scale = scale * lc
        if r.degree_in(v) == rd and not r.coeffs_in(v).get(rd, Poly({})).is_zero():
            raise ArithmeticError("pseudo-division failed to reduce degree")
    return q, (r, scale)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """GCD up to a unit, by primitive pseudo-remainder sequences."""
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if a.is_const() or b.is_const():
        return Poly.const(1)
    avars, bvars = a.variables(), b.variables()
    common = sorted(avars & bvars)
    if not common:
        return Poly.const(1)
    v = common[-1]
    ca, pa = _poly_content_and_primitive(a, v)
    cb, pb = _poly_content_and_primitive(b, v)
    cont = poly_gcd(ca, cb)
    # Euclid on primitive parts
    f, g = pa, pb
    if f.degree_in(v) < g.degree_in(v):
        f, g = g, f
    while not g.is_zero():
        _, (r, _) = _pseudo_divmod(f, g, v)
        f, g = g, r
        if not g.is_zero():
            _, g = _poly_content_and_primitive(g, v)
    _, f = _poly_content_and_primitive(f, v)
    return cont * f


class RatFunc:
    """A rational function of parameters over the Gaussian rationals.

    Normal form: gcd(num, den) = 1 and den monic (leading coefficient 1 under
    lex monomial order), so equality and hashing are structural.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator in rational function")
        if num.is_zero():
            den = Poly.const(1)
        else:
            g = poly_gcd(num, den)
            if not g.is_const():
                num = poly_exact_div(num, g)
                den = poly_exact_div(den, g)
            _, lc = den.leading()
            if not lc.is_one():
                inv = lc.inv()
                num = num.scale(inv)
                den = den.scale(inv)
            if den.is_const():
                num = num.scale(den.const_value().inv())
                den = Poly.const(1)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("RatFunc is immutable")

    @staticmethod
    def const(v: int | Fraction) -> "RatFunc":
        return RatFunc(Poly.const(v), Poly.const(1))

    @staticmethod
    def from_q2(v: Q2) -> "RatFunc":
        return RatFunc(Poly.const(v), Poly.const(1))

    @staticmethod
    def param(name: str) -> "RatFunc":
        return RatFunc(Poly.var(name), Poly.const(1))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.den.is_const() and self.num.is_const() and self.num.const_value().is_one()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> Q2:
        if not self.is_const():
            raise ValueError(f"not constant: {self}")
        return self.num.const_value()

    def is_integer(self) -> bool:
        return self.is_const() and self.const_value().is_integer()

    def as_int(self) -> int:
        v = self.const_value()
        if not v.is_integer():
            raise ValueError(f"not an integer: {self}")
        return int(v.re)

    def __add__(self, o) -> "RatFunc":
        o = _coerce(o)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __sub__(self, o) -> "RatFunc":
        return self + (-_coerce(o))

    def __rsub__(self, o) -> "RatFunc":
        return _coerce(o) + (-self)

    def __mul__(self, o) -> "RatFunc":
        o = _coerce(o)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, o) -> "RatFunc":
        o = _coerce(o)
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, o) -> "RatFunc":
        return _coerce(o) / self

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return RatFunc(self.den, self.num) ** (-n)
        return RatFunc(self.num ** n, self.den ** n)

    def __eq__(self, o) -> bool:
        if isinstance(o, (int, Fraction)):
            o = RatFunc.const(o)
        if not isinstance(o, RatFunc):
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def variables(self) -> set[str]:
        return self.num.variables() | self.den.variables()

    def subs(self, env: Mapping[str, "RatFunc"]) -> "RatFunc":
        return self.num.subs(env) / self.den.subs(env)

    def eval(self, env: Mapping[str, ScalarLike]) -> Q2:
        d = self.den.eval(env)
        if d.is_zero():
            raise ZeroDivisionError(f"parameter assignment hits a pole of {self}")
        return self.num.eval(env) / d

    def conj_params(self, flips: Iterable[str]) -> "RatFunc":
        return RatFunc(self.num.conj_params(flips), self.den.conj_params(flips))

    def key(self) -> str:
        return str(self)

    def __str__(self) -> str:
        if self.den.is_const():
            return str(self.num)
        ns, ds = str(self.num), str(self.den)
        if " " in ns or "*" in ns or "^" in ns:
            ns = f"({ns})"
        return f"{ns}/({ds})"

    def __repr__(self) -> str:
        return f"RatFunc({self})"


def _coerce(v) -> RatFunc:
    if isinstance(v, RatFunc):
        return v
    if isinstance(v, Q2):
        return RatFunc.from_q2(v)
    if isinstance(v, (int, Fraction)):
        return RatFunc.const(v)
    raise TypeError(f"cannot coerce {type(v).__name__} to RatFunc")


RF_ZERO = RatFunc.const(0)
RF_ONE = RatFunc.const(1)
RF_HALF = RatFunc.const(Fraction(1, 2))

"""Minimal symbolic expression kernel with canonical forms.

An `Expr` is a finite sum of terms; each term is a rational-function
coefficient (in the declared parameters) times a product of atoms raised to
rational-function exponents.  Atoms are the base variables (t, r, zeta, g),
the field symbols (Psi, PsiS), uninterpreted function applications with
formal derivative indices, and composite power bases for non-monomial
expressions raised to symbolic exponents.

Canonical form: like factors merged, composite powers with nonnegative
integer exponents expanded, like terms merged, zero terms dropped, terms
sorted under a fixed total order.  Structural equality of canonical forms is
mathematical equality.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

from .ratfunc import Q2, RatFunc, RF_ONE, RF_ZERO

BASE_VARS = ("t", "r", "zeta", "g")
FIELD_VARS = ("Psi", "PsiS")
ALL_VARS = BASE_VARS + FIELD_VARS

Scalar = Union[int, Fraction, Q2, RatFunc]


class ExprError(ValueError):
    pass


class SubstitutionError(ExprError):
    """Raised when a substitution hits a pole or an ill-typed binding."""


def _rf(v: Scalar) -> RatFunc:
    if isinstance(v, RatFunc):
        return v
    if isinstance(v, Q2):
        return RatFunc.from_q2(v)
    return RatFunc.const(Fraction(v))


# ---------------------------------------------------------------------------
# Atoms
# ---------------------------------------------------------------------------


class VarAtom:
    __slots__ = ("name", "_key")

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_key", ("0var", name))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("immutable")

    def key(self):
        return self._key

    def __eq__(self, o):
        return isinstance(o, VarAtom) and o.name == self.name

    def __hash__(self):
        return hash(self._key)

    def to_str(self) -> str:
        return self.name

    def __repr__(self):
        return self.name


class FuncAtom:
    """Uninterpreted function application f(args), optionally differentiated.

    `derivs[i]` counts formal derivatives with respect to argument slot i;
    they only ever accumulate, never evaluate.
    """

    __slots__ = ("name", "derivs", "args", "_key")

    def __init__(self, name: str, args: Sequence["Expr"], derivs: Sequence[int] | None = None):
        args = tuple(args)
        if not args:
            raise ExprError(f"function {name!r} applied to no arguments")
        dv = tuple(derivs) if derivs is not None else (0,) * len(args)
        if len(dv) != len(args) or any(d < 0 for d in dv):
            raise ExprError("malformed derivative multi-index")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "derivs", dv)
        object.__setattr__(self, "args", args)
        object.__setattr__(
            self, "_key", ("1func", name, dv, tuple(a.key() for a in args))
        )

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("immutable")

    def key(self):
        return self._key

    def __eq__(self, o):
        return isinstance(o, FuncAtom) and o._key == self._key

    def __hash__(self):
        return hash(self._key)

    def bump(self, slot: int) -> "FuncAtom":
        dv = list(self.derivs)
        dv[slot] += 1
        return FuncAtom(self.name, self.args, dv)

    def to_str(self) -> str:
        head = self.name
        if any(self.derivs):
            idx = []
            for i, d in enumerate(self.derivs):
                idx.extend([str(i + 1)] * d)
            head += "@(" + ",".join(idx) + ")"
        return head + "(" + ", ".join(a.to_str() for a in self.args) + ")"

    def __repr__(self):
        return self.to_str()


class PowAtom:
    """Base of a composite power: a multi-term Expr raised (at the factor
    level) to an exponent that cannot be distributed."""

    __slots__ = ("base", "_key")

    def __init__(self, base: "Expr"):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "_key", ("2pow", base.key()))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("immutable")

    def key(self):
        return self._key

    def __eq__(self, o):
        return isinstance(o, PowAtom) and o.base == self.base

    def __hash__(self):
        return hash(self._key)

    def to_str(self) -> str:
        return "(" + self.base.to_str() + ")"

    def __repr__(self):
        return self.to_str()


Atom = Union[VarAtom, FuncAtom, PowAtom]


# ---------------------------------------------------------------------------
# Terms and expressions
# ---------------------------------------------------------------------------


class Term:
    __slots__ = ("coeff", "factors", "sig")

    def __init__(self, coeff: RatFunc, factors: tuple[tuple[Atom, RatFunc], ...]):
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "sig", tuple((a.key(), p.key()) for a, p in factors))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("immutable")

    def __eq__(self, o):
        return isinstance(o, Term) and o.coeff == self.coeff and o.factors == self.factors

    def __hash__(self):
        return hash((self.coeff, self.factors))


class Expr:
    __slots__ = ("terms", "_str", "_hash")

    def __init__(self, terms: tuple[Term, ...]):
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "_str", None)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero() -> "Expr":
        return _ZERO

    @staticmethod
    def one() -> "Expr":
        return _ONE

    @staticmethod
    def number(v: Scalar) -> "Expr":
        return expr_from_factors(_rf(v), [])

    @staticmethod
    def var(name: str) -> "Expr":
        if name not in ALL_VARS:
            raise ExprError(f"unknown base variable {name!r}")
        return expr_from_factors(RF_ONE, [(VarAtom(name), RF_ONE)])

    @staticmethod
    def param(name: str) -> "Expr":
        return expr_from_factors(RatFunc.param(name), [])

    @staticmethod
    def func(name: str, args: Sequence["Expr"], derivs: Sequence[int] | None = None) -> "Expr":
        return expr_from_factors(RF_ONE, [(FuncAtom(name, args, derivs), RF_ONE)])

    # -- predicates -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self == _ONE

    def is_single_term(self) -> bool:
        return len(self.terms) == 1

    def is_coefficient(self) -> bool:
        return self.is_zero() or (self.is_single_term() and not self.terms[0].factors)

    def as_ratfunc(self) -> RatFunc:
        if self.is_zero():
            return RF_ZERO
        if self.is_coefficient():
            return self.terms[0].coeff
        raise ExprError(f"not a pure coefficient: {self}")

    # -- arithmetic -----------------------------------------------------

    def __add__(self, o) -> "Expr":
        o = _as_expr(o)
        return _merge_terms(list(self.terms) + list(o.terms))

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr(tuple(Term(-t.coeff, t.factors) for t in self.terms))

    def __sub__(self, o) -> "Expr":
        return self + (-_as_expr(o))

    def __rsub__(self, o) -> "Expr":
        return _as_expr(o) + (-self)

    def __mul__(self, o) -> "Expr":
        o = _as_expr(o)
        out = _ZERO
        for t1 in self.terms:
            for t2 in o.terms:
                out = out + expr_from_factors(
                    t1.coeff * t2.coeff, list(t1.factors) + list(t2.factors)
                )
        return out

    __rmul__ = __mul__

    def __truediv__(self, o) -> "Expr":
        return self * expr_pow(_as_expr(o), RatFunc.const(-1))

    def __rtruediv__(self, o) -> "Expr":
        return _as_expr(o) * expr_pow(self, RatFunc.const(-1))

    def __pow__(self, p) -> "Expr":
        return expr_pow(self, p if isinstance(p, RatFunc) else _rf(p))

    def scale(self, c: Scalar) -> "Expr":
        c = _rf(c)
        if c.is_zero():
            return _ZERO
        return Expr(tuple(Term(t.coeff * c, t.factors) for t in self.terms))

    def __eq__(self, o) -> bool:
        if not isinstance(o, (Expr, int, Fraction, Q2, RatFunc)):
            return NotImplemented
        o = _as_expr(o)
        return self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self.terms))
        return self._hash

    # -- structure ------------------------------------------------------

    def key(self) -> tuple:
        return tuple((t.sig, t.coeff.key()) for t in self.terms)

    def atoms(self) -> set[str]:
        """Names of base/field variables appearing anywhere in the expression."""
        out: set[str] = set()
        for t in self.terms:
            for a, _ in t.factors:
                if isinstance(a, VarAtom):
                    out.add(a.name)
                elif isinstance(a, FuncAtom):
                    for arg in a.args:
                        out |= arg.atoms()
                else:
                    out |= a.base.atoms()
        return out

    def params(self) -> set[str]:
        out: set[str] = set()
        for t in self.terms:
            out |= t.coeff.variables()
            for a, p in t.factors:
                out |= p.variables()
                if isinstance(a, FuncAtom):
                    for arg in a.args:
                        out |= arg.params()
                elif isinstance(a, PowAtom):
                    out |= a.base.params()
        return out

    def monomials(self) -> dict[tuple[tuple[Atom, RatFunc], ...], RatFunc]:
        """Map factor-product -> coefficient, for linear algebra over terms."""
        return {t.factors: t.coeff for t in self.terms}

    def to_str(self) -> str:
        if self._str is None:
            object.__setattr__(self, "_str", _print_expr(self))
        return self._str

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Expr[{self.to_str()}]"


_ZERO = Expr(())
_ONE = Expr((Term(RF_ONE, ()),))


def _as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction, Q2, RatFunc)):
        return Expr.number(v)
    raise TypeError(f"cannot treat {type(v).__name__} as Expr")


def _merge_terms(terms: Iterable[Term]) -> Expr:
    acc: dict[tuple, Term] = {}
    has_pow = False
    for t in terms:
        if t.coeff.is_zero():
            continue
        has_pow = has_pow or any(isinstance(a, PowAtom) for a, _ in t.factors)
        prev = acc.get(t.sig)
        if prev is None:
            acc[t.sig] = t
        else:
            c = prev.coeff + t.coeff
            if c.is_zero():
                del acc[t.sig]
            else:
                acc[t.sig] = Term(c, prev.factors)
    if has_pow and len(acc) > 1:
        return _normalize_pow_shifts(list(acc.values()))
    return Expr(tuple(acc[k] for k in sorted(acc)))


def _normalize_pow_shifts(terms: list[Term]) -> Expr:
    """Align composite-power exponents that differ by integers.

    Sums like c1*B^p + c2*(piece of B)*B^(p-1) cannot cancel term-by-term
    unless every occurrence of the base B within one integer-offset class is
    rewritten to the minimal exponent, expanding the integer difference.
    """
    while True:
        # exponent classes per base: base_key -> list of distinct exponents
        classes: dict[tuple, list[RatFunc]] = {}
        for t in terms:
            for a, p in t.factors:
                if isinstance(a, PowAtom):
                    exps = classes.setdefault(a.key(), [])
                    if p not in exps:
                        exps.append(p)
        rewrite: dict[tuple, tuple[RatFunc, RatFunc]] = {}
        for bkey, exps in classes.items():
            for i, p in enumerate(exps):
                for q in exps[i + 1 :]:
                    d = p - q
                    if d.is_integer() and not d.is_zero():
                        lo = q if d.as_int() > 0 else p
                        hi = p if d.as_int() > 0 else q
                        rewrite[(bkey, hi.key())] = (lo, hi)
                        break
                if (bkey, p.key()) in rewrite:
                    break
        if not rewrite:
            break
        new_terms: list[Term] = []
        expanded: list[Expr] = []
        for t in terms:
            hit = None
            for a, p in t.factors:
                if isinstance(a, PowAtom) and (a.key(), p.key()) in rewrite:
                    hit = (a, p)
                    break
            if hit is None:
                new_terms.append(t)
                continue
            a, p = hit
            lo, _ = rewrite[(a.key(), p.key())]
            n = (p - lo).as_int()
            rest = tuple((aa, pp) if aa.key() != a.key() else (aa, lo) for aa, pp in t.factors)
            expanded.append(Expr((Term(t.coeff, rest),)) * _int_pow(a.base, n))
        merged: dict[tuple, Term] = {}
        for t in new_terms + [tt for e in expanded for tt in e.terms]:
            prev = merged.get(t.sig)
            if prev is None:
                merged[t.sig] = t
            else:
                c = prev.coeff + t.coeff
                if c.is_zero():
                    del merged[t.sig]
                else:
                    merged[t.sig] = Term(c, prev.factors)
        terms = list(merged.values())
    out: dict[tuple, Term] = {t.sig: t for t in terms}
    return Expr(tuple(out[k] for k in sorted(out)))


def expr_from_factors(coeff: RatFunc, factors: Iterable[tuple[Atom, RatFunc]]) -> Expr:
    """Build a canonical Expr from one raw coefficient-and-factors product.

    Merges repeated atoms, expands composite powers whose merged exponent
    is a nonnegative integer, and folds pure-number power bases.
    """
    if coeff.is_zero():
        return _ZERO
    merged: dict[tuple, tuple[Atom, RatFunc]] = {}
    for a, p in factors:
        k = a.key()
        if k in merged:
            merged[k] = (a, merged[k][1] + p)
        else:
            merged[k] = (a, p)
    kept: list[tuple[Atom, RatFunc]] = []
    pending: list[Expr] = []
    for a, p in merged.values():
        if p.is_zero():
            continue
        if isinstance(a, PowAtom):
            expanded = _expand_pow(a.base, p)
            if expanded is None:
                kept.append((a, p))
            else:
                pending.append(expanded)
        else:
            kept.append((a, p))
    kept.sort(key=lambda ap: (ap[0].key(), ap[1].key()))
    out = Expr((Term(coeff, tuple(kept)),))
    for e in pending:
        out = out * e
    return out


def _expand_pow(base: Expr, p: RatFunc) -> Expr | None:
    """Expand a composite power if the exponent now permits it, else None."""
    if base.is_zero():
        return _ZERO
    if p.is_integer():
        n = p.as_int()
        if n >= 0:
            return _int_pow(base, n)
        if base.is_single_term():
            return _int_pow(_invert_term(base), -n)
        return None
    if base.is_single_term():
        t = base.terms[0]
        if t.coeff.is_one():
            return expr_from_factors(RF_ONE, [(a, q * p) for a, q in t.factors])
    return None


def _int_pow(e: Expr, n: int) -> Expr:
    out = _ONE
    base = e
    while n:
        if n & 1:
            out = out * base
        base = base * base
        n >>= 1
    return out


def _invert_term(e: Expr) -> Expr:
    t = e.terms[0]
    return expr_from_factors(RF_ONE / t.coeff, [(a, -p) for a, p in t.factors])


def expr_pow(e: Expr, p: RatFunc) -> Expr:
    """Raise an expression to a rational-function power."""
    if p.is_zero():
        return _ONE
    if e.is_zero():
        return _ZERO
    if p.is_integer():
        n = p.as_int()
        if n >= 0:
            return _int_pow(e, n)
        if e.is_single_term():
            return _int_pow(_invert_term(e), -n)
        return expr_from_factors(RF_ONE, [(PowAtom(e), p)])
    if e.is_single_term():
        t = e.terms[0]
        if t.coeff.is_one():
            if not t.factors:
                return _ONE
            return expr_from_factors(RF_ONE, [(a, q * p) for a, q in t.factors])
        if not t.factors:
            raise ExprError(f"cannot raise the number {t.coeff} to symbolic power {p}")
    return expr_from_factors(RF_ONE, [(PowAtom(e), p)])


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------


def diff(e: Expr, var: str) -> Expr:
    """Exact partial derivative with respect to a base or field variable."""
    if var not in ALL_VARS:
        raise ExprError(f"cannot differentiate with respect to {var!r}")
    out = _ZERO
    for t in e.terms:
        for i, (a, p) in enumerate(t.factors):
            da = _atom_diff(a, var)
            if da.is_zero():
                continue
            rest = list(t.factors)
            rest[i] = (a, p - RF_ONE)
            out = out + expr_from_factors(t.coeff * p, rest) * da
    return out


def _atom_diff(a: Atom, var: str) -> Expr:
    if isinstance(a, VarAtom):
        return _ONE if a.name == var else _ZERO
    if isinstance(a, FuncAtom):
        out = _ZERO
        for i, arg in enumerate(a.args):
            darg = diff(arg, var)
            if not darg.is_zero():
                out = out + Expr.func(a.name, a.args, a.bump(i).derivs) * darg
        return out
    return diff(a.base, var)


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------


def substitute(e: Expr, bindings: Mapping[str, object]) -> Expr:
    """Simultaneous substitution of parameters and variables, then
    canonicalization.

    Parameter bindings must be pure coefficients (they enter exponents and
    coefficients); variable bindings may be arbitrary expressions.
    """
    param_map: dict[str, RatFunc] = {}
    var_map: dict[str, Expr] = {}
    for name, val in bindings.items():
        if name in ALL_VARS:
            var_map[name] = _as_expr(val if isinstance(val, Expr) else _rf(val))
        else:
            ev = val if isinstance(val, Expr) else _as_expr(_rf(val))
            try:
                param_map[name] = ev.as_ratfunc()
            except ExprError as exc:
                raise SubstitutionError(
                    f"parameter {name!r} must be bound to a pure coefficient"
                ) from exc
    try:
        out = _ZERO
        for t in e.terms:
            piece = Expr.number(t.coeff.subs(param_map) if param_map else t.coeff)
            for a, p in t.factors:
                p2 = p.subs(param_map) if param_map else p
                piece = piece * expr_pow(_subst_atom(a, param_map, var_map), p2)
            out = out + piece
        return out
    except ZeroDivisionError as exc:
        raise SubstitutionError(str(exc)) from exc


def _subst_atom(a: Atom, param_map, var_map) -> Expr:
    if isinstance(a, VarAtom):
        if a.name in var_map:
            return var_map[a.name]
        return expr_from_factors(RF_ONE, [(a, RF_ONE)])
    bindings = dict(param_map)
    bindings.update(var_map)
    if isinstance(a, FuncAtom):
        args = tuple(substitute(arg, bindings) for arg in a.args)
        return Expr.func(a.name, args, a.derivs)
    return substitute(a.base, bindings)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def eval_exact(e: Expr, env: Mapping[str, Q2 | Fraction | int]) -> Q2:
    """Exact evaluation; requires integer exponents and no function atoms."""
    out = Q2(0)
    for t in e.terms:
        v = t.coeff.eval(env)
        for a, p in t.factors:
            pe = p.eval(env)
            if not pe.is_integer():
                raise ExprError(f"non-integer exponent {p} in exact evaluation")
            n = int(pe.re)
            if isinstance(a, VarAtom):
                base = Q2.of(env[a.name])
            elif isinstance(a, PowAtom):
                base = eval_exact(a.base, env)
            else:
                raise ExprError("cannot exactly evaluate an uninterpreted function")
            v = v * base ** n
        out = out + v
    return out


def eval_num(
    e: Expr,
    env: Mapping[str, complex],
    funcs: Mapping[object, Callable[..., complex]] | None = None,
) -> complex:
    """Numeric evaluation.  `funcs` maps a function name (underived) or a
    (name, derivs) pair to a callable on the argument values."""
    funcs = funcs or {}
    out = 0j
    cenv = {k: complex(v) for k, v in env.items()}
    for t in e.terms:
        v = t.coeff.eval(env).to_complex() if _rf_exactable(t.coeff, env) else _rf_num(t.coeff, cenv)
        for a, p in t.factors:
            pv = _rf_num(p, cenv)
            if isinstance(a, VarAtom):
                base = cenv[a.name]
            elif isinstance(a, PowAtom):
                base = eval_num(a.base, env, funcs)
            else:
                key = (a.name, a.derivs) if any(a.derivs) else a.name
                if key not in funcs:
                    raise ExprError(f"no numeric rule for function atom {a.to_str()}")
                base = complex(funcs[key](*[eval_num(arg, env, funcs) for arg in a.args]))
            v = v * base ** pv
        out = out + v
    return out


def _rf_exactable(rf: RatFunc, env) -> bool:
    try:
        rf.eval(env)
        return True
    except (TypeError, KeyError, ZeroDivisionError):
        return False


def _rf_num(rf: RatFunc, cenv) -> complex:
    num = sum(
        c.to_complex() * _mono_num(m, cenv) for m, c in rf.num.terms.items()
    )
    den = sum(
        c.to_complex() * _mono_num(m, cenv) for m, c in rf.den.terms.items()
    )
    return num / den


def _mono_num(m, cenv) -> complex:
    v = 1 + 0j
    for name, p in m:
        v *= cenv[name] ** p
    return v


# ---------------------------------------------------------------------------
# Structure queries
# ---------------------------------------------------------------------------


def is_zero(e: Expr) -> bool:
    return e.is_zero()


def collect_unknowns(e: Expr) -> dict[tuple, Expr]:
    """Partition an expression by its uninterpreted-function content.

    Returns a map whose keys are tuples of (FuncAtom, exponent) and whose
    values are the summed coefficient expressions; the empty tuple keys the
    function-free remainder.  collect_unknowns(0) is the empty map.
    """
    out: dict[tuple, Expr] = {}
    for t in e.terms:
        fpart = tuple((a, p) for a, p in t.factors if isinstance(a, FuncAtom))
        rest = [(a, p) for a, p in t.factors if not isinstance(a, FuncAtom)]
        piece = expr_from_factors(t.coeff, rest)
        out[fpart] = out.get(fpart, _ZERO) + piece
    return {k: v for k, v in out.items() if not v.is_zero()}


def unknowns_all_zero(e: Expr) -> bool:
    return not collect_unknowns(e)


# ---------------------------------------------------------------------------
# Printing (grammar-compatible; see parser.parse for the inverse)
# ---------------------------------------------------------------------------


def _print_expr(e: Expr) -> str:
    if e.is_zero():
        return "0"
    return " + ".join(_print_term(t) for t in e.terms)


def _print_term(t: Term) -> str:
    pieces = []
    if not t.factors or not t.coeff.is_one():
        pieces.append(f"({t.coeff})")
    for a, p in t.factors:
        if p.is_one():
            pieces.append(a.to_str())
        else:
            pieces.append(f"{a.to_str()}^({p})")
    return "*".join(pieces)

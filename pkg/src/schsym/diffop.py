"""Polynomial differential operators in (∂t, ∂r, ∂ζ, ∂g) with expression
coefficients, and the conditional-invariance decomposition

    [S, X] = λ·S + Σ μ_i·S_extra_i + Σ B_j ∘ A_j + ρ·id + residual

where λ, μ_i are multiplier functions, the A_j are declared first-order
constraint operators (annihilating admissible wave functions) with arbitrary
left operator cofactors B_j, ρ is an order-0 obstruction, and a nonzero
residual means the decomposition failed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Mapping, Sequence

from .expr import BASE_VARS, Expr, diff
from .fields import VectorField

MultiIndex = tuple[int, int, int, int]

_ZERO_IDX: MultiIndex = (0, 0, 0, 0)


def _idx_add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])


def _idx_sub(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3])


def _idx_leq(a: MultiIndex, b: MultiIndex) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _idx_order(a: MultiIndex) -> tuple[int, MultiIndex]:
    return (sum(a), a)


def _subindices(s: MultiIndex):
    for i0 in range(s[0] + 1):
        for i1 in range(s[1] + 1):
            for i2 in range(s[2] + 1):
                for i3 in range(s[3] + 1):
                    yield (i0, i1, i2, i3)


def _multi_binom(s: MultiIndex, r: MultiIndex) -> int:
    return comb(s[0], r[0]) * comb(s[1], r[1]) * comb(s[2], r[2]) * comb(s[3], r[3])


def _diff_multi(e: Expr, idx: MultiIndex) -> Expr:
    for v, k in zip(BASE_VARS, idx):
        for _ in range(k):
            e = diff(e, v)
            if e.is_zero():
                return e
    return e


class DiffOperator:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[MultiIndex, Expr] | None = None):
        tt = {}
        for idx, e in (terms or {}).items():
            if not e.is_zero():
                tt[tuple(idx)] = e
        object.__setattr__(self, "terms", tt)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero() -> "DiffOperator":
        return DiffOperator({})

    @staticmethod
    def identity() -> "DiffOperator":
        return DiffOperator({_ZERO_IDX: Expr.one()})

    @staticmethod
    def from_expr(e: Expr) -> "DiffOperator":
        return DiffOperator({_ZERO_IDX: e})

    @staticmethod
    def partial(var: str, k: int = 1) -> "DiffOperator":
        idx = [0, 0, 0, 0]
        idx[BASE_VARS.index(var)] = k
        return DiffOperator({tuple(idx): Expr.one()})

    @staticmethod
    def from_vectorfield(X: VectorField) -> "DiffOperator":
        terms: dict[MultiIndex, Expr] = {}
        for i, v in enumerate(BASE_VARS):
            c = X.coeff(v)
            if not c.is_zero():
                idx = [0, 0, 0, 0]
                idx[i] = 1
                terms[tuple(idx)] = c
        if not X.scalar.is_zero():
            terms[_ZERO_IDX] = X.scalar
        return DiffOperator(terms)

    # -- algebra ----------------------------------------------------------

    def __add__(self, o: "DiffOperator") -> "DiffOperator":
        t = dict(self.terms)
        for idx, e in o.terms.items():
            t[idx] = t.get(idx, Expr.zero()) + e
        return DiffOperator(t)

    def __neg__(self) -> "DiffOperator":
        return DiffOperator({i: -e for i, e in self.terms.items()})

    def __sub__(self, o: "DiffOperator") -> "DiffOperator":
        return self + (-o)

    def scale(self, c) -> "DiffOperator":
        ce = c if isinstance(c, Expr) else Expr.number(c)
        return DiffOperator({i: e * ce for i, e in self.terms.items()})

    def compose(self, other: "DiffOperator") -> "DiffOperator":
        """Operator product self ∘ other, Leibniz-expanding the action of
        self's derivatives on other's coefficient functions."""
        out: dict[MultiIndex, Expr] = {}
        for s, a in self.terms.items():
            for t, b in other.terms.items():
                for rho in _subindices(s):
                    db = _diff_multi(b, rho)
                    if db.is_zero():
                        continue
                    coeff = a * db
                    if _multi_binom(s, rho) != 1:
                        coeff = coeff.scale(_multi_binom(s, rho))
                    idx = _idx_add(_idx_sub(s, rho), t)
                    out[idx] = out.get(idx, Expr.zero()) + coeff
        return DiffOperator(out)

    def commutator(self, other: "DiffOperator") -> "DiffOperator":
        return self.compose(other) - other.compose(self)

    def apply(self, e: Expr) -> Expr:
        out = Expr.zero()
        for idx, c in self.terms.items():
            out = out + c * _diff_multi(e, idx)
        return out

    def order(self) -> int:
        return max((sum(i) for i in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def leading(self) -> tuple[MultiIndex, Expr]:
        idx = max(self.terms, key=_idx_order)
        return idx, self.terms[idx]

    def __eq__(self, o):
        return isinstance(o, DiffOperator) and self.terms == o.terms

    def __hash__(self):
        return hash(frozenset((i, e) for i, e in self.terms.items()))

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for idx in sorted(self.terms, key=_idx_order, reverse=True):
            ops = "".join(
                f"D{'z' if v == 'zeta' else v}" * k for v, k in zip(BASE_VARS, idx)
            )
            c = self.terms[idx]
            cs = str(c) if c.is_single_term() else f"({c})"
            parts.append(f"{cs}*{ops}" if ops else cs)
        return " + ".join(parts)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"DiffOperator[{self.to_str()}]"


def compose(a: DiffOperator, b: DiffOperator) -> DiffOperator:
    return a.compose(b)


def commute_op(S: DiffOperator, X: VectorField | DiffOperator) -> DiffOperator:
    """[S, X] with X lifted to an operator (derivative part + scalar part)."""
    Xop = DiffOperator.from_vectorfield(X) if isinstance(X, VectorField) else X
    return S.commutator(Xop)


# ---------------------------------------------------------------------------
# Conditional-invariance decomposition
# ---------------------------------------------------------------------------


class DivisionError(ValueError):
    pass


def _expr_div(a: Expr, b: Expr) -> Expr:
    if not b.is_single_term():
        raise DivisionError(f"cannot divide by multi-term coefficient {b}")
    return a / b


@dataclass
class Decomposition:
    ok: bool                       # residual vanished (modulo declared pieces)
    strict: bool                   # λ·S alone sufficed (no extras/conditions/ρ)
    lam: Expr
    mus: list[Expr]
    cond_usage: dict[str, DiffOperator] = field(default_factory=dict)
    rho: Expr = field(default_factory=Expr.zero)
    residual: DiffOperator = field(default_factory=DiffOperator.zero)

    def conditions_used(self) -> list[str]:
        return [n for n, b in self.cond_usage.items() if not b.is_zero()]


def decompose_commutator(
    K: DiffOperator,
    primary: DiffOperator,
    extras: Sequence[DiffOperator] = (),
    conditions: Sequence[tuple[str, DiffOperator]] = (),
    allow_rho: bool = False,
) -> Decomposition:
    """Reduce K against λ·primary, function multiples of the extras, and the
    left ideal generated by the condition operators.

    The reduction is exact division at leading multi-indices, so it can only
    under-approximate (never claim a decomposition that does not exist).
    """
    work = K
    lead_p, leadc_p = primary.leading()
    lam = _expr_div(work.terms.get(lead_p, Expr.zero()), leadc_p)
    if not lam.is_zero():
        work = work - DiffOperator.from_expr(lam).compose(primary)

    mus: list[Expr] = []
    for ex in extras:
        lead_e, leadc_e = ex.leading()
        mu = _expr_div(work.terms.get(lead_e, Expr.zero()), leadc_e)
        mus.append(mu)
        if not mu.is_zero():
            work = work - DiffOperator.from_expr(mu).compose(ex)

    usage = {name: DiffOperator.zero() for name, _ in conditions}
    changed = True
    while changed and not work.is_zero():
        changed = False
        for idx in sorted(work.terms, key=_idx_order, reverse=True):
            coeff = work.terms.get(idx)
            if coeff is None or coeff.is_zero():
                continue
            for name, A in conditions:
                lead_a, leadc_a = A.leading()
                if _idx_leq(lead_a, idx) and idx != _ZERO_IDX:
                    bterm = DiffOperator({_idx_sub(idx, lead_a): _expr_div(coeff, leadc_a)})
                    work = work - bterm.compose(A)
                    usage[name] = usage[name] + bterm
                    changed = True
                    break
            if changed:
                break

    rho = work.terms.get(_ZERO_IDX, Expr.zero())
    if allow_rho and not rho.is_zero():
        work = work - DiffOperator.from_expr(rho)
    else:
        rho = Expr.zero()

    ok = work.is_zero()
    strict = (
        ok
        and rho.is_zero()
        and all(m.is_zero() for m in mus)
        and all(b.is_zero() for b in usage.values())
    )
    return Decomposition(ok, strict, lam, mus, usage, rho, work)


def conditional_invariance(
    S_list: Sequence[DiffOperator],
    X: VectorField,
    conditions: Sequence[tuple[str, DiffOperator]] = (),
    allow_rho: bool = False,
) -> Decomposition:
    """Test [S₁, X] = λ·S₁ + Σ μ_i·S_{i+1} + (condition ideal); the leading
    operator of the list is the equation, later entries are auxiliary forms."""
    K = commute_op(S_list[0], X)
    return decompose_commutator(K, S_list[0], S_list[1:], conditions, allow_rho)


def condition_menu(M0_op: DiffOperator) -> list[tuple[str, DiffOperator]]:
    """The constraint operators a wave function may be required to satisfy:
    the representation's own mass operator, r-independence, g-independence."""
    return [
        ("M0", M0_op),
        ("Dr", DiffOperator.partial("r")),
        ("Dg", DiffOperator.partial("g")),
    ]


def minimal_conditions(
    S_list: Sequence[DiffOperator],
    X: VectorField,
    menu: Sequence[tuple[str, DiffOperator]],
    allow_rho: bool = False,
) -> Decomposition | None:
    """Search the condition lattice smallest-first; return the first
    successful decomposition, else None."""
    from itertools import combinations

    for k in range(len(menu) + 1):
        for subset in combinations(menu, k):
            d = conditional_invariance(S_list, X, subset, allow_rho)
            if d.ok:
                return d
    return None

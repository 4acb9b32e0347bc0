"""First-order differential operators with a multiplication part, their Lie
brackets, and structure-constant machinery for the generator catalogs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .expr import BASE_VARS, Expr, diff, substitute
from .linsolve import solve
from .parser import Context, DEFAULT_CONTEXT, parse
from .ratfunc import RatFunc, RF_ZERO


class NotClosedError(Exception):
    def __init__(self, pair: tuple[str, str], residual: "VectorField"):
        super().__init__(f"bracket [{pair[0]}, {pair[1]}] leaves the span; residual {residual}")
        self.pair = pair
        self.residual = residual


class NotEigenvectorError(Exception):
    def __init__(self, name: str):
        super().__init__(f"generator {name!r} is not an ad-eigenvector of the Cartan choice")
        self.name = name


class VectorField:
    """ξ^t ∂t + ξ^r ∂r + ξ^ζ ∂ζ + ξ^g ∂g + (scalar multiplication part)."""

    __slots__ = ("coeffs", "scalar")

    def __init__(self, coeffs: Mapping[str, Expr] | None = None, scalar: Expr | None = None):
        cc = {}
        for v, e in (coeffs or {}).items():
            if v not in BASE_VARS:
                raise ValueError(f"unknown variable {v!r}")
            if not e.is_zero():
                cc[v] = e
        object.__setattr__(self, "coeffs", cc)
        object.__setattr__(self, "scalar", scalar if scalar is not None else Expr.zero())

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("immutable")

    def coeff(self, v: str) -> Expr:
        return self.coeffs.get(v, Expr.zero())

    def apply(self, e: Expr) -> Expr:
        """Derivative part only: Σ ξ^v ∂v e (the scalar part does not act)."""
        out = Expr.zero()
        for v, c in self.coeffs.items():
            out = out + c * diff(e, v)
        return out

    def full_apply(self, e: Expr) -> Expr:
        return self.apply(e) + self.scalar * e

    def is_zero(self) -> bool:
        return not self.coeffs and self.scalar.is_zero()

    def __add__(self, o: "VectorField") -> "VectorField":
        return VectorField(
            {v: self.coeff(v) + o.coeff(v) for v in BASE_VARS}, self.scalar + o.scalar
        )

    def __sub__(self, o: "VectorField") -> "VectorField":
        return self + o.scale(-1)

    def scale(self, c) -> "VectorField":
        if isinstance(c, Expr):
            return VectorField({v: e * c for v, e in self.coeffs.items()}, self.scalar * c)
        return VectorField(
            {v: e.scale(c) for v, e in self.coeffs.items()}, self.scalar.scale(c)
        )

    def subs(self, bindings: Mapping[str, object]) -> "VectorField":
        return VectorField(
            {v: substitute(e, bindings) for v, e in self.coeffs.items()},
            substitute(self.scalar, bindings),
        )

    def __eq__(self, o):
        return (
            isinstance(o, VectorField)
            and self.coeffs == o.coeffs
            and self.scalar == o.scalar
        )

    def __hash__(self):
        return hash((tuple(sorted((v, e) for v, e in self.coeffs.items())), self.scalar))

    def to_str(self) -> str:
        parts = [f"({e})*D{'z' if v == 'zeta' else v}" for v, e in sorted(self.coeffs.items())]
        if not self.scalar.is_zero() or not parts:
            parts.append(f"({self.scalar})")
        return " + ".join(parts)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"VectorField[{self.to_str()}]"


def bracket(X: VectorField, Y: VectorField) -> VectorField:
    """Lie bracket [X, Y]: vector part X(Yv) − Y(Xv), scalar part
    X(scalar_Y) − Y(scalar_X) using only the derivative parts."""
    coeffs = {v: X.apply(Y.coeff(v)) - Y.apply(X.coeff(v)) for v in BASE_VARS}
    scalar = X.apply(Y.scalar) - Y.apply(X.scalar)
    return VectorField(coeffs, scalar)


# ---------------------------------------------------------------------------
# Representations
# ---------------------------------------------------------------------------

ALGEBRA_LABELS = ("sch1", "age1", "alt1", "sch1~", "age1~", "alt1~", "conf3")

GENERATOR_ORDER = ("X-1", "X0", "X1", "Y-1/2", "Y1/2", "M0", "N", "D", "V+", "V-", "W")


@dataclass(frozen=True)
class Representation:
    label: str
    generators: dict[str, VectorField]
    params: dict[str, object] = field(default_factory=dict)
    variant: str = "fixed-mass"  # or "NMG" / "MMG"

    def __post_init__(self):
        if self.label not in ALGEBRA_LABELS:
            raise ValueError(f"unknown algebra label {self.label!r}")
        for name in self.generators:
            if name not in GENERATOR_ORDER:
                raise ValueError(f"unknown generator name {name!r}")

    def names(self) -> list[str]:
        return [n for n in GENERATOR_ORDER if n in self.generators]

    def __getitem__(self, name: str) -> VectorField:
        return self.generators[name]

    def restrict(self, names: Iterable[str], label: str | None = None) -> "Representation":
        names = set(names)
        return Representation(
            label or self.label,
            {n: g for n, g in self.generators.items() if n in names},
            dict(self.params),
            self.variant,
        )

    def drop(self, *names: str, label: str | None = None) -> "Representation":
        keep = [n for n in self.generators if n not in names]
        return self.restrict(keep, label)

    def subs(self, bindings: Mapping[str, object]) -> "Representation":
        return Representation(
            self.label,
            {n: g.subs(bindings) for n, g in self.generators.items()},
            dict(self.params),
            self.variant,
        )


class StructureTable:
    """Commutator table: (a, b) with a before b in generator order maps to a
    linear combination {name: RatFunc}."""

    def __init__(self, names: list[str], entries: dict[tuple[str, str], dict[str, RatFunc]]):
        self.names = list(names)
        self.entries = {
            k: {n: c for n, c in v.items() if not c.is_zero()} for k, v in entries.items()
        }

    def combo(self, a: str, b: str) -> dict[str, RatFunc]:
        if (a, b) in self.entries:
            return self.entries[(a, b)]
        if (b, a) in self.entries:
            return {n: -c for n, c in self.entries[(b, a)].items()}
        if a == b:
            return {}
        raise KeyError((a, b))

    def restrict(self, names: Iterable[str]) -> "StructureTable":
        names = [n for n in self.names if n in set(names)]
        sub = {
            k: v
            for k, v in self.entries.items()
            if k[0] in names and k[1] in names
        }
        return StructureTable(names, sub)

    def __eq__(self, o):
        return (
            isinstance(o, StructureTable)
            and set(self.names) == set(o.names)
            and self._normal() == o._normal()
        )

    def _normal(self):
        return {k: tuple(sorted(v.items())) for k, v in self.entries.items() if v}

    def rows(self) -> list[tuple[str, str, str]]:
        out = []
        for (a, b), combo in sorted(self.entries.items()):
            rhs = " + ".join(f"({c})*{n}" for n, c in sorted(combo.items())) or "0"
            out.append((a, b, rhs))
        return out


def _slot_items(f: VectorField):
    for v in BASE_VARS:
        for mono, coeff in f.coeff(v).monomials().items():
            yield (v, mono), coeff
    for mono, coeff in f.scalar.monomials().items():
        yield ("scalar", mono), coeff


def _span_decompose(
    target: VectorField, basis: Mapping[str, VectorField]
) -> dict[str, RatFunc] | None:
    """Write target = Σ c_name * basis[name] with rational-function constants,
    or None when target is outside the span."""
    names = list(basis)
    columns = [dict(_slot_items(basis[n])) for n in names]
    tgt = dict(_slot_items(target))
    keys = set(tgt)
    for col in columns:
        keys |= set(col)
    skeys = sorted(keys, key=lambda k: (k[0], str(k[1])))
    rows = [[col.get(key, RF_ZERO) for col in columns] for key in skeys]
    rhs = [tgt.get(key, RF_ZERO) for key in skeys]
    sol = solve(rows, rhs)
    if sol is None:
        return None
    return {n: c for n, c in zip(names, sol) if not c.is_zero()}


def derive_structure_table(rep: Representation) -> StructureTable:
    """Compute every pairwise bracket and express it in the generator basis.

    Raises NotClosedError when a bracket leaves the span: either the
    representation has a bug or the structure is genuinely conditional.
    """
    names = rep.names()
    entries: dict[tuple[str, str], dict[str, RatFunc]] = {}
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            br = bracket(rep[a], rep[b])
            if br.is_zero():
                entries[(a, b)] = {}
                continue
            combo = _span_decompose(br, rep.generators)
            if combo is None:
                raise NotClosedError((a, b), br)
            entries[(a, b)] = combo
    return StructureTable(names, entries)


@dataclass
class CheckRow:
    pair: tuple[str, str]
    ok: bool
    expected: str
    got: str


def check_structure(rep: Representation, table: StructureTable) -> list[CheckRow]:
    """Verify every bracket of rep against the table entry, exactly."""
    out = []
    names = rep.names()
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            br = bracket(rep[a], rep[b])
            combo = table.combo(a, b)
            expected = VectorField()
            for n, c in combo.items():
                expected = expected + rep[n].scale(c)
            residual = br - expected
            rhs = " + ".join(f"({c})*{n}" for n, c in sorted(combo.items())) or "0"
            out.append(CheckRow((a, b), residual.is_zero(), rhs, str(br)))
    return out


def is_subalgebra(rep: Representation, names: Iterable[str]) -> bool:
    sub = rep.restrict(names)
    try:
        derive_structure_table(sub)
        return True
    except NotClosedError:
        return False


def cartan_weights(
    rep: Representation, cartan: tuple[str, str] = ("X0", "N")
) -> dict[str, tuple[RatFunc, RatFunc]]:
    """Adjoint eigenvalue pair of each non-Cartan generator under the chosen
    Cartan pair.  Cartan elements named "D" are synthesized as 2*X0 - N when
    absent from the representation."""
    h = [_cartan_element(rep, c) for c in cartan]
    out: dict[str, tuple[RatFunc, RatFunc]] = {}
    for name in rep.names():
        if name in cartan:
            continue
        g = rep[name]
        weights = []
        for hel in h:
            br = bracket(hel, g)
            w = _proportionality(br, g)
            if w is None:
                raise NotEigenvectorError(name)
            weights.append(w)
        out[name] = (weights[0], weights[1])
    return out


def _cartan_element(rep: Representation, name: str) -> VectorField:
    if name in rep.generators:
        return rep[name]
    if name == "D" and "X0" in rep.generators and "N" in rep.generators:
        return rep["X0"].scale(2) - rep["N"]
    raise KeyError(f"Cartan generator {name!r} not available")


def _proportionality(br: VectorField, g: VectorField) -> RatFunc | None:
    """br = w*g for a rational-function constant w, or None."""
    if br.is_zero():
        return RF_ZERO
    combo = _span_decompose(br, {"g": g})
    if combo is None:
        return None
    return combo.get("g", RF_ZERO)


# ---------------------------------------------------------------------------
# Serialization (one generator per line, expr grammar with Dt/Dr/Dz/Dg tags)
# ---------------------------------------------------------------------------

_D_TAGS = {"t": "Dt", "r": "Dr", "zeta": "Dz", "g": "Dg"}


def rep_to_text(rep: Representation) -> str:
    lines = [f"# label={rep.label} variant={rep.variant}"]
    for name in rep.names():
        f = rep[name]
        parts = [f"({f.coeff(v)})*{_D_TAGS[v]}" for v in BASE_VARS if not f.coeff(v).is_zero()]
        if not f.scalar.is_zero() or not parts:
            parts.append(f"({f.scalar})")
        lines.append(f"{name} = " + " + ".join(parts))
    return "\n".join(lines) + "\n"


def rep_from_text(text: str, ctx: Context = DEFAULT_CONTEXT) -> Representation:
    label, variant = "conf3", "fixed-mass"
    gens: dict[str, VectorField] = {}
    # Derivative tags parse as extra constants; the expression must be linear
    # in them, and the coefficient of each tag is extracted by substitution.
    tag_ctx = ctx.with_params(Dt="constant", Dr="constant", Dz="constant", Dg="constant")
    zeros = {tag: 0 for tag in _D_TAGS.values()}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for kv in line[1:].split():
                k, _, v = kv.partition("=")
                if k == "label":
                    label = v
                elif k == "variant":
                    variant = v
            continue
        name, _, rhs = line.partition("=")
        name = name.strip()
        e = parse(rhs.strip(), tag_ctx)
        scalar = substitute(e, zeros)
        coeffs = {}
        for v, tag in _D_TAGS.items():
            at1 = substitute(e, {**zeros, tag: 1})
            at2 = substitute(e, {**zeros, tag: 2})
            cv = at1 - scalar
            if at2 - scalar != cv + cv:
                raise ValueError(f"nonlinear use of {tag} in line {line!r}")
            coeffs[v] = cv
        gens[name] = VectorField(coeffs, scalar)
    return Representation(label, gens, {}, variant)

"""Constructors for every concrete generator representation and invariant
linear operator in the verification suite.

Case ids 1..8 index the rows of the variable-mass classification: odd cases
are the almost-parabolic algebras (no N), even cases the parabolic ones
(with N).  Cases 1/2 and 7/8 are NMG families (L = 0), cases 3/4 and 5/6
carry the modified, coupling-dependent generators (L != 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .diffop import DiffOperator, condition_menu
from .expr import Expr, substitute
from .fields import Representation, VectorField, bracket
from .parser import DEFAULT_CONTEXT, parse


class UnknownCaseError(ValueError):
    def __init__(self, case):
        super().__init__(f"unknown case id {case!r}; valid cases are 1..8")


def _e(text: str) -> Expr:
    return parse(text, DEFAULT_CONTEXT)


def _vf(coeffs: Mapping[str, str], scalar: str = "0") -> VectorField:
    return VectorField({v: _e(c) for v, c in coeffs.items()}, _e(scalar))


# ---------------------------------------------------------------------------
# Fixed-mass representations (mass M a constant, field Phi(t, r))
# ---------------------------------------------------------------------------


def build_fixed_mass() -> Representation:
    """The six-generator Schrodinger algebra acting on (t, r) with constant
    mass M and scaling dimension x."""
    gens = {
        "X-1": _vf({"t": "-1"}),
        "Y-1/2": _vf({"r": "-1"}),
        "M0": _vf({}, "-M"),
        "Y1/2": _vf({"r": "-t"}, "-M*r"),
        "X0": _vf({"t": "-t", "r": "-r/2"}, "-x/2"),
        "X1": _vf({"t": "-t^2", "r": "-t*r"}, "-M/2*r^2 - x*t"),
    }
    return Representation("sch1", gens, {"x": "x", "M": "M"}, "fixed-mass")


def build_fixed_mass_with_coupling(m0_zero: bool = False, yhat: str = "y") -> Representation:
    """Fixed-mass generators extended by the dimensionful coupling g of scale
    dimension y.  m0 = 0 selects the sch1 form; m0 != 0 only makes sense for
    the ageing subalgebra (time translations drop out).

    The exponent of the m0 term defaults to the coupling dimension y itself:
    keeping it an independent parameter breaks [X0, X1] = -X1 (closure forces
    the identification; pass yhat="yh" to see that failure).
    """
    rep = build_fixed_mass()
    gens = dict(rep.generators)
    gens["X0"] = _vf({"t": "-t", "r": "-r/2", "g": "-y*g"}, "-x/2")
    p = "-2*y*t*g" if m0_zero else f"-2*y*t*g - m0*g^(1+1/{yhat})"
    gens["X1"] = _vf({"t": "-t^2", "r": "-t*r", "g": p}, "-M/2*r^2 - x*t")
    label = "sch1" if m0_zero else "age1"
    if not m0_zero:
        gens.pop("X-1")
    return Representation(label, gens, {"x": "x", "y": "y", "m0": 0 if m0_zero else "m0"},
                          "fixed-mass")


def schrodinger_operator() -> DiffOperator:
    """2*M*Dt - Dr^2, the fixed-mass linear operator."""
    return DiffOperator.from_expr(_e("2*M")).compose(DiffOperator.partial("t")) - DiffOperator.partial("r", 2)


# ---------------------------------------------------------------------------
# Variable-mass representations (field Psi(zeta, t, r), coupling g)
# ---------------------------------------------------------------------------

# (label, variant, L, Q, P, K, F) per case; cases 7/8 override P by branch.
_CASE_DATA = {
    1: ("age1", "NMG", "0", "0", "p01*t*g", "k0*g", None),
    2: ("age1~", "NMG", "0", "0", "p01*t*g", "k0*g", None),
    3: ("age1", "MMG", "-2*y*g/z", "-2*y*g*r/z", "-y*g*r^2/z", "k0*g", None),
    4: ("age1~", "MMG", "-2*y*g/z", "-2*y*g*r/z", "-y*g*r^2/z", "k0*g", None),
    5: ("alt1", "MMG", "s*g/z", "s*r*g/z", "s*r^2*g/(2*z)", "k0p*g", "2*s*r*g"),
    6: ("alt1~", "MMG", "s*g/z", "s*r*g/z", "s*r^2*g/(2*z)", "k0p*g", "2*s*r*g"),
    7: ("sch1", "NMG", "0", "0", None, "k0*g", None),
    8: ("sch1~", "NMG", "0", "0", None, "k0*g", None),
}

_MEMBERS = {
    "age1": ("X0", "X1", "Y-1/2", "Y1/2", "M0"),
    "age1~": ("X0", "X1", "Y-1/2", "Y1/2", "M0", "N"),
    "alt1": ("D", "X1", "Y-1/2", "Y1/2", "M0", "V+"),
    "alt1~": ("D", "X1", "Y-1/2", "Y1/2", "M0", "N", "V+"),
    "sch1": ("X-1", "X0", "X1", "Y-1/2", "Y1/2", "M0"),
    "sch1~": ("X-1", "X0", "X1", "Y-1/2", "Y1/2", "M0", "N"),
}

BRANCHES = ("x=1/2", "x!=1/2")


def _check_case(case: int) -> None:
    if case not in _CASE_DATA:
        raise UnknownCaseError(case)


def _check_branch(branch: str) -> None:
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}, got {branch!r}")


def build_variable_mass(
    case: int,
    branch: str = "x=1/2",
    bind: Mapping[str, object] | None = None,
) -> Representation:
    """Generators of the given classification row.

    On the x=1/2 branch the scaling dimension is bound to 1/2; on the other
    branch x stays symbolic.  `bind` substitutes parameter values (e.g.
    k0=0) into every generator.
    """
    _check_case(case)
    _check_branch(branch)
    label, variant, L, Q, P, K, F = _CASE_DATA[case]
    inert_coupling = False
    if P is None:
        # sch1 rows: [X-1, X1] = -2*X0 forces the coupling term of X1 to
        # match the dilatation's y*g*Dg term.  The P = 0 branch therefore
        # only closes with an inert (dimensionless) coupling, y = 0.
        if branch == "x=1/2":
            P, inert_coupling = "0", True
        else:
            P = "2*y*t*g"
    gens = {
        "X-1": _vf({"t": "-1"}),
        "Y-1/2": _vf({"r": "-1"}),
        "X0": _vf({"t": "-t", "r": "-r/2", "g": "-y*g"}, "-x/2"),
        "D": _vf({"t": "-t", "r": "-r", "zeta": "-z", "g": "-s*g"}, "-x"),
        "M0": _vf({"zeta": "-1", "g": f"-({L})"}),
        "Y1/2": _vf({"r": "-t", "zeta": "-r", "g": f"-({Q})"}),
        "X1": _vf({"t": "-t^2", "r": "-t*r", "zeta": "-r^2/2", "g": f"-({P})"}, "-x*t"),
        "N": _vf({"t": "-t", "zeta": "z", "g": f"-({K})"}),
        "V+": _vf(
            {"t": "-2*t*r", "r": "-(r^2 + 2*z*t)", "zeta": "-2*z*r", "g": f"-({F or '0'})"},
            "-2*x*r",
        ),
    }
    rep = Representation(label, gens, {"case": case, "branch": branch}, variant).restrict(
        _MEMBERS[label]
    )
    subs: dict[str, object] = {}
    if branch == "x=1/2":
        subs["x"] = Fraction(1, 2)
    if inert_coupling:
        subs["y"] = 0
    if bind:
        subs.update(bind)
    return rep.subs(subs) if subs else rep


def zeta_operator() -> DiffOperator:
    """2*Dz*Dt - Dr^2, the variable-mass linear operator."""
    return DiffOperator.partial("zeta").compose(DiffOperator.partial("t")).scale(2) - DiffOperator.partial("r", 2)


def _op(coeff_by_idx: Mapping[str, str]) -> DiffOperator:
    key = {"t": 0, "r": 1, "zeta": 2, "g": 3}
    terms = {}
    for spec, coeff in coeff_by_idx.items():
        idx = [0, 0, 0, 0]
        if spec:
            for part in spec.split(","):
                idx[key[part]] += 1
        terms[tuple(idx)] = _e(coeff)
    return DiffOperator(terms)


def invariant_operators(case: int, branch: str = "x=1/2") -> list[DiffOperator]:
    """The linear operator list of the row: first the equation's operator,
    then (where listed) the modified/auxiliary form valid on the constrained
    solutions."""
    _check_case(case)
    _check_branch(branch)
    S = zeta_operator()
    Drr = DiffOperator.partial("r", 2)
    if case in (1, 2):
        return [S] if branch == "x=1/2" else [S, Drr]
    if case in (3, 4):
        if branch == "x=1/2":
            return [_op({"zeta,t": "2", "g,t": "-4*y*g/z", "r,r": "-1"})]
        return [S]
    if case in (5, 6):
        if branch == "x=1/2":
            return [_op({"zeta,t": "2", "g,t": "2*s*g/z", "r,r": "-1"})]
        return [_op({"zeta,t": "1"})]
    if branch == "x=1/2":
        return [S, Drr]
    return [Drr, S]


def case_conditions(case: int, branch: str = "x=1/2") -> list[tuple[str, DiffOperator]]:
    """Constraint operators admissible for the row: the row's own mass
    operator plus r- and g-independence."""
    rep = build_variable_mass(case, branch)
    return condition_menu(DiffOperator.from_vectorfield(rep["M0"]))


@dataclass(frozen=True)
class CaseInfo:
    case: int
    label: str
    variant: str
    parabolic: bool
    unknowns: dict[str, str]
    members: tuple[str, ...]


def case_info(case: int) -> CaseInfo:
    _check_case(case)
    label, variant, L, Q, P, K, F = _CASE_DATA[case]
    unknowns = {"L": L, "Q": Q, "P": P if P is not None else "0 | 2*y*t*g", "K": K}
    if F is not None:
        unknowns["F"] = F
    return CaseInfo(case, label, variant, "~" in label, unknowns, _MEMBERS[label])


def list_cases() -> list[CaseInfo]:
    return [case_info(c) for c in sorted(_CASE_DATA)]


# ---------------------------------------------------------------------------
# Full conformal algebra catalog (coupling-free, for the root diagram)
# ---------------------------------------------------------------------------


def build_conf3() -> Representation:
    """All ten generators of the conformal algebra acting on (t, r, zeta).

    V- and W are not constructor inputs: they are produced from brackets of
    the other generators, with normalization fixed so the derived structure
    constants come out integer or half-integer.
    """
    gens = {
        "X-1": _vf({"t": "-1"}),
        "Y-1/2": _vf({"r": "-1"}),
        "M0": _vf({"zeta": "-1"}),
        "X0": _vf({"t": "-t", "r": "-r/2"}, "-x/2"),
        "N": _vf({"t": "-t", "zeta": "z"}),
        "Y1/2": _vf({"r": "-t", "zeta": "-r"}),
        "X1": _vf({"t": "-t^2", "r": "-t*r", "zeta": "-r^2/2"}, "-x*t"),
        "V+": _vf({"t": "-2*t*r", "r": "-(r^2 + 2*z*t)", "zeta": "-2*z*r"}, "-2*x*r"),
    }
    vminus = bracket(gens["X-1"], gens["V+"]).scale(Fraction(-1, 2))
    gens["V-"] = vminus
    gens["W"] = bracket(gens["V+"], vminus).scale(Fraction(1, 2))
    return Representation("conf3", gens, {"x": "x"}, "fixed-mass")


def parabolic_subalgebra(label: str) -> tuple[str, ...]:
    """Generator names of the (almost-)parabolic subalgebras inside conf3."""
    table = {
        "sch1~": ("X-1", "X0", "X1", "Y-1/2", "Y1/2", "M0", "N"),
        "age1~": ("X0", "X1", "Y-1/2", "Y1/2", "M0", "N"),
        "alt1~": ("D", "X1", "Y-1/2", "Y1/2", "M0", "N", "V+"),
        "sch1": ("X-1", "X0", "X1", "Y-1/2", "Y1/2", "M0"),
        "age1": ("X0", "X1", "Y-1/2", "Y1/2", "M0"),
        "alt1": ("D", "X1", "Y-1/2", "Y1/2", "M0", "V+"),
    }
    if label not in table:
        raise ValueError(f"unknown subalgebra label {label!r}")
    return table[label]


def conf3_with_D() -> Representation:
    """conf3 catalog with D = 2*X0 - N adjoined (for the alt-type subalgebras)."""
    rep = build_conf3()
    gens = dict(rep.generators)
    gens["D"] = gens["X0"].scale(2) - gens["N"]
    return Representation("conf3", gens, dict(rep.params), rep.variant)


# ---------------------------------------------------------------------------
# Bridge between the fixed-mass and variable-mass pictures
# ---------------------------------------------------------------------------


def zeta_lift(rep: Representation) -> Representation:
    """Lift a fixed-mass representation to the zeta picture: multiplication
    by the mass parameter M becomes a -d/dzeta coefficient."""
    gens = {}
    for name, f in rep.generators.items():
        for v, c in f.coeffs.items():
            if "M" in c.params():
                raise ValueError(f"mass parameter in a derivative coefficient of {name}")
        s0 = substitute(f.scalar, {"M": 0})
        s1 = substitute(f.scalar, {"M": 1}) - s0
        if substitute(f.scalar, {"M": 2}) - s0 != s1 + s1:
            raise ValueError(f"scalar part of {name} is not linear in the mass")
        coeffs = dict(f.coeffs)
        if not s1.is_zero():
            coeffs["zeta"] = coeffs.get("zeta", Expr.zero()) + s1
        gens[name] = VectorField(coeffs, s0)
    return Representation(rep.label, gens, dict(rep.params), rep.variant)


# ---------------------------------------------------------------------------
# Mutation controls
# ---------------------------------------------------------------------------


def _flip_coeff(rep: Representation, gen: str, var: str) -> Representation:
    gens = dict(rep.generators)
    f = gens[gen]
    coeffs = dict(f.coeffs)
    coeffs[var] = -coeffs.get(var, Expr.zero())
    gens[gen] = VectorField(coeffs, f.scalar)
    return Representation(rep.label, gens, dict(rep.params), rep.variant)


def mutation_controls(case: int, branch: str = "x=1/2") -> list[tuple[str, Representation]]:
    """Deliberately corrupted copies of the row's representation.

    Sign flips of the coupling functions L, Q, P where they are nonzero,
    plus sign flips of structural coefficients; each control must be caught
    by the closure check or by the row's conditional-invariance run.
    """
    rep = build_variable_mass(case, branch)
    out = []
    for gen, var, tag in (("M0", "g", "L"), ("Y1/2", "g", "Q"), ("X1", "g", "P")):
        if not rep[gen].coeff(var).is_zero():
            out.append((f"sign flip of {tag} in {gen}", _flip_coeff(rep, gen, var)))
    dil = "X0" if "X0" in rep.generators else "D"
    out.append((f"sign flip of t-coefficient of X1", _flip_coeff(rep, "X1", "t")))
    out.append((f"sign flip of r-coefficient of X1", _flip_coeff(rep, "X1", "r")))
    out.append((f"sign flip of r-coefficient of {dil}", _flip_coeff(rep, dil, "r")))
    return out

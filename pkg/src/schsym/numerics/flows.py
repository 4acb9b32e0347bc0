"""Finite symmetry transformations.

Each flow is the exponential of a catalog generator, obtained by solving its
characteristic system:

    Phi_lam(t, r) = prefactor(lam; t, r) * Phi(tmap(t), rmap(t, r)),
    g -> gmap(g),

with prefactor solving dP/dlam = scalar_part(flow) P.  The lam -> 0
derivative of each flow is validated against the generator's coefficients in
the test suite."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class FlowSpec:
    name: str
    lam: float
    tmap: Callable[[float], float]
    rmap: Callable[[float, np.ndarray], np.ndarray]
    prefactor: Callable[[float, np.ndarray], np.ndarray]
    gmap: Callable[[float], float] = field(default=lambda g: g)
    window: str = ""  # nonempty describes a parameter restriction

    def check_window(self, t: float):
        if self.window and self.name == "special" and 1 + self.lam * t <= 0:
            raise ValueError(f"special transformation singular at t={t} (1+lam*t <= 0)")


def flow_catalog(name: str, lam: float, M: complex = 1.0, x: float = 0.5,
                 y: float = 0.0) -> FlowSpec:
    """Finite flows of the fixed-mass generators.

    time/space translations and dilatations are elementary; the boost and the
    special transformation carry the mass prefactor; the coupling moves under
    dilatation (e^(y*lam)-factor) and the special flow ((1+lam*t)^(-2y))."""
    if name == "translation_t":
        return FlowSpec(name, lam, lambda t: t - lam, lambda t, r: r,
                        lambda t, r: np.ones_like(np.asarray(r, dtype=complex)))
    if name == "translation_r":
        return FlowSpec(name, lam, lambda t: t, lambda t, r: r - lam,
                        lambda t, r: np.ones_like(np.asarray(r, dtype=complex)))
    if name == "boost":
        return FlowSpec(
            name, lam, lambda t: t, lambda t, r: r - lam * t,
            lambda t, r: np.exp(-M * (lam * r - lam ** 2 * t / 2.0)),
        )
    if name == "dilatation":
        return FlowSpec(
            name, lam,
            lambda t: t * np.exp(-lam),
            lambda t, r: r * np.exp(-lam / 2.0),
            lambda t, r: np.exp(-x * lam / 2.0) * np.ones_like(np.asarray(r, dtype=complex)),
            gmap=lambda g: g * np.exp(-y * lam),
        )
    if name == "special":
        # the coupling map of this flow is time-dependent, g*(1+lam*t)^(-2y);
        # numeric covariance only exercises it at fixed (dimensionless) g
        return FlowSpec(
            name, lam,
            lambda t: t / (1 + lam * t),
            lambda t, r: r / (1 + lam * t),
            lambda t, r: (1 + lam * t) ** (-x)
            * np.exp(-M * lam * r ** 2 / (2 * (1 + lam * t))),
            window="1 + lam*t > 0",
        )
    raise KeyError(f"unknown flow {name!r}")


def apply_flow(flow: FlowSpec, fieldfn: Callable[[float, np.ndarray], np.ndarray],
               t: float, r: np.ndarray) -> np.ndarray:
    """Transformed field at time t on the r-samples, from a callable field."""
    flow.check_window(t)
    tt = flow.tmap(t)
    rr = flow.rmap(t, r)
    return flow.prefactor(t, r) * fieldfn(tt, rr)


def flow_generator_coefficients(name: str, M: complex = 1.0, x: float = 0.5,
                                y: float = 0.0):
    """(xi_t, xi_r, scalar) of the generator, as callables of (t, r); the
    lam->0 derivative of the flow must match them."""
    if name == "translation_t":
        return (lambda t, r: -1.0, lambda t, r: 0.0 * r, lambda t, r: 0.0 * r)
    if name == "translation_r":
        return (lambda t, r: 0.0, lambda t, r: -np.ones_like(r), lambda t, r: 0.0 * r)
    if name == "boost":
        return (lambda t, r: 0.0, lambda t, r: -t * np.ones_like(r), lambda t, r: -M * r)
    if name == "dilatation":
        return (lambda t, r: -t, lambda t, r: -r / 2.0, lambda t, r: -x / 2.0 * np.ones_like(r))
    if name == "special":
        return (
            lambda t, r: -t ** 2,
            lambda t, r: -t * r,
            lambda t, r: -M * r ** 2 / 2.0 - x * t * np.ones_like(r),
        )
    raise KeyError(name)

"""Quadrature bridge between the zeta picture and the fixed-mass picture:

    Phi_m(t, r) = (2*pi)^(-1/2) Integral dzeta e^(-i m zeta) Psi(zeta, t, r)

by composite Simpson on a truncated zeta interval.  When the caller supplies
the analytic t- and rr-partials of Psi the fixed-mass defect
2 i m dPhi/dt - d2Phi/dr2 is itself a quadrature (of the exactly transformed
integrand), so the measured defect decays at the quadrature's own rate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

FieldFn = Callable[[np.ndarray, float, np.ndarray], np.ndarray]


class DecayWarning(UserWarning):
    pass


@dataclass
class BridgeResult:
    phi: np.ndarray          # Phi_m on the r-samples at t
    defect: float            # normalized fixed-mass-equation defect, nan if unknown
    boundary_ratio: float    # |Psi| at the zeta boundary over its maximum


def _simpson_weights(n: int, h: float) -> np.ndarray:
    if n % 2 == 0:
        raise ValueError("Simpson rule needs an odd number of nodes")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def fourier_bridge(psi: FieldFn, m: float, t: float, r: np.ndarray,
                   zeta_n: int = 129, zeta_L: float = 8.0,
                   psi_t: FieldFn | None = None,
                   psi_rr: FieldFn | None = None) -> BridgeResult:
    """Transform Psi(zeta, t, r) to Phi_m(t, r) and measure the fixed-mass
    defect.  zeta_n must be odd (Simpson); zeta_L sets the truncation."""
    zeta = np.linspace(-zeta_L, zeta_L, zeta_n)
    w = _simpson_weights(zeta_n, zeta[1] - zeta[0]) / np.sqrt(2 * np.pi)
    phase = np.exp(-1j * m * zeta)

    samples = np.array([psi(z, t, r) for z in zeta])  # (zeta_n, len(r))
    amax = float(np.max(np.abs(samples)))
    edge = float(max(np.max(np.abs(samples[0])), np.max(np.abs(samples[-1]))))
    boundary_ratio = edge / amax if amax > 0 else 0.0

    phi = (w[:, None] * phase[:, None] * samples).sum(axis=0)

    defect = float("nan")
    if psi_t is not None and psi_rr is not None:
        st = np.array([psi_t(z, t, r) for z in zeta])
        srr = np.array([psi_rr(z, t, r) for z in zeta])
        integrand = 2j * m * st - srr
        d = (w[:, None] * phase[:, None] * integrand).sum(axis=0)
        norm = np.linalg.norm(phi)
        defect = float(np.linalg.norm(d) / norm) if norm > 0 else float("inf")
    return BridgeResult(phi, defect, boundary_ratio)

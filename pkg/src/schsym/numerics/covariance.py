"""PDE defect of (transformed) fields: does the candidate still solve the
equation?

The time derivative is a fourth-order central difference over a five-point
stencil, the space derivative is spectral, so the measured residual is
dominated by the field's own error (solver or interpolation), not by the
defect operator."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .grid import Grid1D, spectral_d2

_STENCIL = (-2, -1, 0, 1, 2)
_WEIGHTS = (1.0, -8.0, 0.0, 8.0, -1.0)  # f' ~ sum w_k f(t+k dt) / (12 dt)


def equation_defect(fields: np.ndarray, dt: float, L: float, M: complex,
                    g: float = 0.0, F: Callable[[np.ndarray], np.ndarray] | None = None
                    ) -> np.ndarray:
    """Defect 2M dPhi/dt - d2Phi/dr2 - g F(Phi) at the stencil center.

    `fields` has shape (5, n): samples at t + k*dt for k in -2..2."""
    if fields.shape[0] != 5:
        raise ValueError("need a five-point time stencil")
    dphi = sum(w * fields[i] for i, w in enumerate(_WEIGHTS)) / (12 * dt)
    center = fields[2]
    defect = 2 * M * dphi - spectral_d2(center, L)
    if F is not None and g != 0.0:
        defect = defect - g * F(center)
    return defect


def covariance_residual(fieldfn: Callable[[float, np.ndarray], np.ndarray],
                        t_center: float, dt_stencil: float, grid: Grid1D,
                        M: complex, g: float = 0.0,
                        F: Callable[[np.ndarray], np.ndarray] | None = None) -> float:
    """Normalized L2 residual of the equation on the given field."""
    r = grid.r
    fields = np.array([fieldfn(t_center + k * dt_stencil, r) for k in _STENCIL])
    defect = equation_defect(fields, dt_stencil, grid.L, M, g, F)
    norm = np.linalg.norm(fields[2])
    if norm == 0:
        raise ValueError("zero field has no normalized residual")
    return float(np.linalg.norm(defect) / norm)

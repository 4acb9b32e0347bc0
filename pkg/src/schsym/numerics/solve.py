"""Spectral split-step solvers for 2*M dPhi/dt = d^2Phi/dr^2 + g*F(Phi).

The linear propagator is exact per step on the periodic grid (diagonal in
Fourier space); the semilinear solver is Strang splitting with an RK4
pointwise nonlinear substep, second order overall.  M may be real positive
(diffusion) or purely imaginary (unitary Schrodinger mode)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import Grid1D


class Instability(RuntimeError):
    pass


@dataclass
class Trajectory:
    grid: Grid1D
    times: np.ndarray
    states: np.ndarray  # shape (len(times), grid.n)
    M: complex
    g: float = 0.0

    def at(self, t: float) -> np.ndarray:
        idx = int(round((t - self.times[0]) / (self.times[1] - self.times[0])))
        if not (0 <= idx < len(self.times)) or abs(self.times[idx] - t) > 1e-9:
            raise KeyError(f"time {t} not on the saved grid")
        return self.states[idx]

    def interp(self, t: float) -> np.ndarray:
        """Cubic interpolation in time between saved states."""
        from scipy.interpolate import CubicSpline

        cs = CubicSpline(self.times, self.states, axis=0)
        return cs(t)


def _propagator(grid: Grid1D, M: complex, dt: float) -> np.ndarray:
    return np.exp(-(grid.k ** 2) * dt / (2 * M))


def _check(state: np.ndarray, step: int, norm0: float):
    norm = float(np.linalg.norm(state))
    if not np.isfinite(norm) or norm > 1e6 * (norm0 + 1e-300):
        raise Instability(f"norm blow-up at step {step}: |Phi| = {norm:.3e}")


def solve_linear(phi0: np.ndarray, grid: Grid1D, M: complex, t0: float = 0.0,
                 save_every: int = 1) -> Trajectory:
    """Evolve the linear equation; exact in space and time per step."""
    phi = np.asarray(phi0, dtype=complex).copy()
    prop = _propagator(grid, M, grid.dt)
    times = [t0]
    states = [phi.copy()]
    norm0 = float(np.linalg.norm(phi))
    for step in range(1, grid.nt + 1):
        phi = np.fft.ifft(np.fft.fft(phi) * prop)
        _check(phi, step, norm0)
        if step % save_every == 0:
            times.append(t0 + step * grid.dt)
            states.append(phi.copy())
    return Trajectory(grid, np.array(times), np.array(states), M)


def solve_semilinear(phi0: np.ndarray, grid: Grid1D, M: complex, g: float,
                     F: Callable[[np.ndarray], np.ndarray], t0: float = 0.0,
                     save_every: int = 1) -> Trajectory:
    """Strang splitting: half nonlinear step, full linear step, half
    nonlinear step.  F(phi) evaluates the potential pointwise."""
    phi = np.asarray(phi0, dtype=complex).copy()
    dt = grid.dt
    prop = _propagator(grid, M, dt)
    c = g / (2 * M)

    def nl_half(u: np.ndarray) -> np.ndarray:
        # RK4 on du/dt = c*F(u) over dt/2: keeps the splitting second order
        hh = dt / 2
        k1 = c * F(u)
        k2 = c * F(u + hh / 2 * k1)
        k3 = c * F(u + hh / 2 * k2)
        k4 = c * F(u + hh * k3)
        return u + hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    times = [t0]
    states = [phi.copy()]
    norm0 = float(np.linalg.norm(phi))
    for step in range(1, grid.nt + 1):
        phi = nl_half(phi)
        phi = np.fft.ifft(np.fft.fft(phi) * prop)
        phi = nl_half(phi)
        _check(phi, step, norm0)
        if step % save_every == 0:
            times.append(t0 + step * grid.dt)
            states.append(phi.copy())
    return Trajectory(grid, np.array(times), np.array(states), M, g)


def heat_kernel(M: complex, r: np.ndarray | float, t: float,
                t_shift: complex = 0.0) -> np.ndarray:
    """Fundamental solution (t - t_shift)^(-1/2) exp(-M r^2 / (2 (t-t_shift)))
    of the linear equation.  For unitary M = i*m a purely imaginary t_shift
    turns it into a decaying Gaussian wave packet."""
    tt = t - t_shift
    return tt ** (-0.5) * np.exp(-M * np.asarray(r) ** 2 / (2 * tt))

"""Uniform periodic space grid and time-step bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid1D:
    """Periodic r-grid on [-L, L) with n points; dt and nt describe the time
    axis of a solve."""

    n: int
    L: float
    dt: float
    nt: int
    periodic: bool = True

    def __post_init__(self):
        if self.n < 16 or self.n & (self.n - 1):
            raise ValueError("n must be a power of two, at least 16")
        if self.dt <= 0 or self.L <= 0:
            raise ValueError("grid spacings must be positive")

    @property
    def h(self) -> float:
        return 2 * self.L / self.n

    @property
    def r(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.n)

    @property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.h)

    def refine(self, factor: int = 2) -> "Grid1D":
        return Grid1D(self.n * factor, self.L, self.dt / factor, self.nt * factor, self.periodic)


def spectral_shift(values: np.ndarray, shift: float, L: float) -> np.ndarray:
    """Evaluate a periodic band-limited field at r + shift (exact for
    band-limited data)."""
    n = len(values)
    k = 2 * np.pi * np.fft.fftfreq(n, d=2 * L / n)
    return np.fft.ifft(np.fft.fft(values) * np.exp(1j * k * shift))


def spectral_d2(values: np.ndarray, L: float) -> np.ndarray:
    n = len(values)
    k = 2 * np.pi * np.fft.fftfreq(n, d=2 * L / n)
    return np.fft.ifft(-(k ** 2) * np.fft.fft(values))

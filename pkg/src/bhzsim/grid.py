"""Discretized Brillouin zone lattice."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BZGrid:
    """Periodic momentum lattice k_r = -pi + 2 pi r / R, k_n = -pi + 2 pi n / N.

    Points are stored once (r = 0..R-1, n = 0..N-1); index arithmetic wraps
    modulo R and N, so the duplicate k = +pi row never appears.
    """

    R: int = 60
    N: int = 60

    def __post_init__(self):
        if self.R < 8 or self.N < 8:
            raise ValueError(f"grid must be at least 8x8, got {self.R}x{self.N}")

    @property
    def kx_values(self) -> np.ndarray:
        return -np.pi + 2.0 * np.pi * np.arange(self.R) / self.R

    @property
    def ky_values(self) -> np.ndarray:
        return -np.pi + 2.0 * np.pi * np.arange(self.N) / self.N

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """(kx, ky) arrays of shape (R, N), kx varying along axis 0."""
        return np.meshgrid(self.kx_values, self.ky_values, indexing="ij")

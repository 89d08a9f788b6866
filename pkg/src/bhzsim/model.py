"""BHZ model: coefficient fields, Bloch Hamiltonians, spectra, derivatives.

Reduced units throughout: A sets the energy unit (default 1), time is
measured in 1/A.  The four-level basis order is fixed globally as
{|+,E1>, |+,H1>, |-,E1>, |-,H1>}; every block and projector convention
downstream depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .grid import BZGrid

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Pseudospin operator resolving the S+/S- blocks: +1 on {|+,E1>, |+,H1>},
# -1 on {|-,E1>, |-,H1>}.
SPIN_Z = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)


def wrap_momentum(k: float) -> float:
    """Wrap a momentum component into [-pi, pi)."""
    return float((k + np.pi) % (2.0 * np.pi) - np.pi)


@dataclass(frozen=True)
class ModelParams:
    """BHZ parameter set {A, B, M, g} in reduced units (A = 1 by default)."""

    A: float = 1.0
    B: float = 1.0
    M: float = 2.0
    g: float = 0.0

    def __post_init__(self):
        for name in ("A", "B", "M", "g"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"parameter {name} must be finite")
        if self.A <= 0:
            raise ValueError("A must be positive (it sets the energy unit)")
        if self.g < 0:
            raise ValueError("coupling g must be non-negative")


@dataclass(frozen=True)
class Momentum:
    """A Bloch momentum (kx, ky), stored wrapped into [-pi, pi)."""

    kx: float
    ky: float

    def __post_init__(self):
        object.__setattr__(self, "kx", wrap_momentum(self.kx))
        object.__setattr__(self, "ky", wrap_momentum(self.ky))


@dataclass(frozen=True)
class CoefficientPair:
    """The two pseudospin coefficient 3-vectors B+ and B-.

    They differ only in the sign of the x component; the z component is
    M(k) = M - 2B(2 - cos kx - cos ky).
    """

    bplus: tuple[float, float, float]
    bminus: tuple[float, float, float]


def coefficients(params: ModelParams, k: Momentum) -> CoefficientPair:
    """Coefficient fields B+(k) and B-(k)."""
    bx = params.A * np.sin(k.kx)
    by = -params.A * np.sin(k.ky)
    bz = params.M - 2.0 * params.B * (2.0 - np.cos(k.kx) - np.cos(k.ky))
    return CoefficientPair((bx, by, bz), (-bx, by, bz))


def _field_arrays(params: ModelParams, kx, ky):
    """B+ components on arrays of momenta (bx, by, bz), broadcasting."""
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    bx = params.A * np.sin(kx)
    by = -params.A * np.sin(ky)
    bz = params.M - 2.0 * params.B * (2.0 - np.cos(kx) - np.cos(ky))
    return bx, by, bz


def hamiltonian_batch(params: ModelParams, kx, ky) -> np.ndarray:
    """Bloch Hamiltonians for arrays of momenta; shape (..., 4, 4)."""
    bx, by, bz = _field_arrays(params, kx, ky)
    bx, by, bz = np.broadcast_arrays(bx, by, bz)
    h = np.zeros(bx.shape + (4, 4), dtype=complex)
    # + block: B+ . sigma
    h[..., 0, 0] = bz
    h[..., 1, 1] = -bz
    h[..., 0, 1] = bx - 1j * by
    h[..., 1, 0] = bx + 1j * by
    # - block: x component flipped
    h[..., 2, 2] = bz
    h[..., 3, 3] = -bz
    h[..., 2, 3] = -bx - 1j * by
    h[..., 3, 2] = -bx + 1j * by
    # intermediate coupling g * sigma_x between the blocks
    h[..., 0, 3] = params.g
    h[..., 3, 0] = params.g
    h[..., 1, 2] = params.g
    h[..., 2, 1] = params.g
    return h


def hamiltonian(params: ModelParams, k: Momentum) -> np.ndarray:
    """4x4 Bloch Hamiltonian [[H+, g sx], [g sx, H-]] at one momentum."""
    return hamiltonian_batch(params, k.kx, k.ky)


def eigenvalues_closed_form(params: ModelParams, k: Momentum) -> tuple[float, float, float, float]:
    """Closed-form spectrum (-E, -E, E, E) with E = sqrt(|B|^2 + g^2)."""
    bx, by, bz = coefficients(params, k).bplus
    e = float(np.sqrt(bx * bx + by * by + bz * bz + params.g * params.g))
    return (-e, -e, e, e)


def energies_batch(params: ModelParams, kx, ky) -> np.ndarray:
    """Closed-form positive eigenvalue E(k) = sqrt(|B|^2 + g^2) on arrays."""
    bx, by, bz = _field_arrays(params, kx, ky)
    return np.sqrt(bx * bx + by * by + bz * bz + params.g * params.g)


class GapMinimum(NamedTuple):
    """A gap minimum and the grid point where it is attained."""

    value: float
    at: "Momentum"


def energy_gap(params: ModelParams, grid: BZGrid) -> GapMinimum:
    """Minimum of the conduction-valence gap 2E(k) over the grid."""
    kxg, kyg = grid.meshgrid()
    gap = 2.0 * energies_batch(params, kxg, kyg)
    idx = np.unravel_index(int(np.argmin(gap)), gap.shape)
    return GapMinimum(float(gap[idx]), Momentum(float(kxg[idx]), float(kyg[idx])))


def gamma_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three 4x4 generalized-force matrices (Gx, Gy, Gz).

    Gy equals -blockdiag(sigma_y, sigma_y); the sign is part of the
    convention and is asserted entry-wise in the tests.
    """
    gx = np.zeros((4, 4), dtype=complex)
    gx[0, 1] = gx[1, 0] = gx[2, 3] = gx[3, 2] = 1.0
    gy = np.zeros((4, 4), dtype=complex)
    gy[0, 1] = gy[2, 3] = 1.0j
    gy[1, 0] = gy[3, 2] = -1.0j
    gz = np.diag([1.0, -1.0, 1.0, -1.0]).astype(complex)
    return gx, gy, gz


def dky_hamiltonian(params: ModelParams, k: Momentum) -> np.ndarray:
    """Analytic derivative dH/dky = A cos(ky) Gy - 2B sin(ky) Gz."""
    _, gy, gz = gamma_matrices()
    return params.A * np.cos(k.ky) * gy - 2.0 * params.B * np.sin(k.ky) * gz

"""Occupied-band projection, projected spin spectrum, and U-link invariants.

The spin-resolving operator is SPIN_Z = diag(+1, +1, -1, -1) in the fixed
basis order: that is the operator whose g = 0 limit separates the two
pseudospin blocks exactly and reproduces C_s = (C+ - C-)/2.  The orbital
matrix diag(1, -1, 1, -1) (equal to Gz) fails that limit; the acceptance
suite documents the distinction.

Plaquette field strengths use the counterclockwise corner order
(r, n) -> (r+1, n) -> (r+1, n+1) -> (r, n+1) and the principal branch of
the argument.  With this orientation C+ = +1 at M = 2B, g = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GapClosedError, IllConditionedLinkError
from .grid import BZGrid
from .linalg import eigh_batch, hermitian_eigh
from .model import GapMinimum, ModelParams, Momentum, SPIN_Z, hamiltonian, hamiltonian_batch

GAP_FLOOR = 1e-6
LINK_MODULUS_FLOOR = 1e-8


@dataclass(frozen=True)
class SpinSplitPair:
    """Occupied-band states resolved by the projected spin operator.

    psi_plus / psi_minus are unit-norm 4-vectors in the occupied subspace;
    spin_values = (E+, E-) with E+ >= E-; occupied_energy is the (doubly
    degenerate) lowest band energy.
    """

    psi_plus: np.ndarray
    psi_minus: np.ndarray
    spin_values: tuple[float, float]
    occupied_energy: float

    @property
    def spin_gap(self) -> float:
        return self.spin_values[0] - self.spin_values[1]


@dataclass(frozen=True)
class InvariantRecord:
    """U-link invariants and gap minima for one parameter point."""

    c_plus: float
    c_minus: float
    c_s: float
    delta_s: float
    delta_cv: float
    grid_R: int
    grid_N: int


def occupied_states(
    params: ModelParams, k: Momentum, gap_floor: float = GAP_FLOOR
) -> tuple[np.ndarray, np.ndarray, float]:
    """Orthonormal basis (phi1, phi2) of the two-lowest-band subspace and E1.

    The intra-subspace gauge is arbitrary; only the projector is defined.
    """
    vals, vecs = hermitian_eigh(hamiltonian(params, k))
    if vals[2] - vals[0] < gap_floor:
        raise GapClosedError("energy", k.kx, k.ky, float(vals[2] - vals[0]), gap_floor)
    return vecs[:, 0], vecs[:, 1], float(vals[0])


def spin_matrix(phi1: np.ndarray, phi2: np.ndarray, operator: np.ndarray | None = None) -> np.ndarray:
    """2x2 projection <phi_j| S |phi_l> of the spin operator onto span{phi1, phi2}."""
    s = SPIN_Z if operator is None else np.asarray(operator, dtype=complex)
    basis = np.stack([phi1, phi2], axis=1)
    return np.conj(basis.T) @ s @ basis


def _split_from_basis(
    phi1: np.ndarray,
    phi2: np.ndarray,
    energy: float,
    k: Momentum,
    gap_floor: float,
    operator: np.ndarray | None,
) -> SpinSplitPair:
    hs = spin_matrix(phi1, phi2, operator)
    svals, svecs = hermitian_eigh(hs)
    if svals[1] - svals[0] < gap_floor:
        raise GapClosedError("spin", k.kx, k.ky, float(svals[1] - svals[0]), gap_floor)
    basis = np.stack([phi1, phi2], axis=1)
    psi_minus = basis @ svecs[:, 0]
    psi_plus = basis @ svecs[:, 1]

    def fix_gauge(psi: np.ndarray) -> np.ndarray:
        j = int(np.argmax(np.abs(psi)))
        phase = psi[j] / abs(psi[j])
        return psi / phase

    return SpinSplitPair(
        psi_plus=fix_gauge(psi_plus),
        psi_minus=fix_gauge(psi_minus),
        spin_values=(float(svals[1]), float(svals[0])),
        occupied_energy=energy,
    )


def spin_split(
    params: ModelParams,
    k: Momentum,
    gap_floor: float = GAP_FLOOR,
    operator: np.ndarray | None = None,
) -> SpinSplitPair:
    """Diagonalize the projected spin matrix at one momentum.

    tau = + is the larger spin eigenvalue; each state's gauge is fixed by
    making its largest-magnitude component real positive.
    """
    phi1, phi2, energy = occupied_states(params, k, gap_floor)
    return _split_from_basis(phi1, phi2, energy, k, gap_floor, operator)


def _branch_states_on_grid(
    params: ModelParams,
    grid: BZGrid,
    gap_floor: float,
    operator: np.ndarray | None = None,
    gauge_rng: np.random.Generator | None = None,
    spin_floor: float | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Spin-split branch states on the full grid.

    Returns (psi_plus (R,N,4), psi_minus (R,N,4), delta_s_map (R,N),
    gap_map (R,N)).  With gauge_rng set, the occupied pair at every grid
    point is premixed by an independent random U(2); the plaquette products
    are invariant under that scrambling.  spin_floor defaults to gap_floor
    (spin_gap passes 0 to measure the minimum instead of erroring on it).
    """
    kxg, kyg = grid.meshgrid()
    h = hamiltonian_batch(params, kxg, kyg)
    vals, vecs = eigh_batch(h, check=False)

    gap_map = vals[..., 2] - vals[..., 0]
    if np.min(gap_map) < gap_floor:
        idx = np.unravel_index(int(np.argmin(gap_map)), gap_map.shape)
        raise GapClosedError(
            "energy", float(kxg[idx]), float(kyg[idx]), float(gap_map[idx]), gap_floor
        )

    occ = vecs[..., :, :2]  # (R, N, 4, 2) columns phi1, phi2
    if gauge_rng is not None:
        occ = occ @ _random_u2_field(gauge_rng, occ.shape[:2])

    s = SPIN_Z if operator is None else np.asarray(operator, dtype=complex)
    hs = np.conj(np.swapaxes(occ, -1, -2)) @ s @ occ
    svals, svecs = eigh_batch(hs, check=False)

    ds_map = svals[..., 1] - svals[..., 0]
    floor = gap_floor if spin_floor is None else spin_floor
    if np.min(ds_map) < floor:
        idx = np.unravel_index(int(np.argmin(ds_map)), ds_map.shape)
        raise GapClosedError(
            "spin", float(kxg[idx]), float(kyg[idx]), float(ds_map[idx]), floor
        )

    psi_minus = np.einsum("...ij,...j->...i", occ, svecs[..., :, 0])
    psi_plus = np.einsum("...ij,...j->...i", occ, svecs[..., :, 1])
    return psi_plus, psi_minus, ds_map, gap_map


def _random_u2_field(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Independent Haar-ish U(2) matrices of the given leading shape."""
    z = rng.normal(size=shape + (2, 2)) + 1j * rng.normal(size=shape + (2, 2))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[..., None, :]


def spin_gap(params: ModelParams, grid: BZGrid, gap_floor: float = GAP_FLOOR) -> GapMinimum:
    """Minimum projected-spin splitting over the grid, with its location.

    Requires the energy gap open everywhere (propagates the closed-gap
    error); the spin splitting itself is the measured quantity.
    """
    _, _, ds_map, _ = _branch_states_on_grid(params, grid, gap_floor, spin_floor=0.0)
    idx = np.unravel_index(int(np.argmin(ds_map)), ds_map.shape)
    kxg, kyg = grid.meshgrid()
    return GapMinimum(float(ds_map[idx]), Momentum(float(kxg[idx]), float(kyg[idx])))


def ulink_field_strength(states: np.ndarray) -> float:
    """Plaquette field strength Arg(U1 U2 U3 U4) from four corner states.

    ``states`` holds the same spin branch at the counterclockwise corners
    (r, n), (r+1, n), (r+1, n+1), (r, n+1); invariant under per-corner
    phases.  Raises IllConditionedLinkError when a link modulus is below
    1e-8 (state discontinuity; the grid is too coarse).
    """
    states = np.asarray(states, dtype=complex)
    if states.shape != (4, 4):
        raise ValueError("expected four 4-component corner states")
    prod = 1.0 + 0.0j
    for i in range(4):
        link = np.vdot(states[i], states[(i + 1) % 4])
        if abs(link) < LINK_MODULUS_FLOOR:
            raise IllConditionedLinkError(
                f"link {i} modulus {abs(link):.3e} below {LINK_MODULUS_FLOOR:.0e}"
            )
        prod *= link
    return float(np.angle(prod))


def _plaquette_angles(psi: np.ndarray) -> np.ndarray:
    """Field strengths of every plaquette for one branch field psi (R,N,4)."""
    ux = np.einsum("rni,rni->rn", np.conj(psi), np.roll(psi, -1, axis=0))
    uy = np.einsum("rni,rni->rn", np.conj(psi), np.roll(psi, -1, axis=1))
    if min(float(np.min(np.abs(ux))), float(np.min(np.abs(uy)))) < LINK_MODULUS_FLOOR:
        raise IllConditionedLinkError(
            "a plaquette link modulus fell below 1e-8; refine the grid "
            "(R, N) or move away from a gap closing"
        )
    prod = ux * np.roll(uy, -1, axis=0) * np.conj(np.roll(ux, -1, axis=1)) * np.conj(uy)
    return np.angle(prod)


def spin_chern(
    params: ModelParams,
    grid: BZGrid,
    gap_floor: float = GAP_FLOOR,
    gauge_seed: int | None = None,
) -> InvariantRecord:
    """U-link Chern numbers C+, C- and the spin Chern number C_s = (C+ - C-)/2.

    C_tau = (1/2 pi) sum of plaquette field strengths of branch tau; exact
    integers (to rounding) whenever both gaps are open on the grid.
    ``gauge_seed`` premixes the occupied pair at every grid point by a
    random U(2) (validation knob; the result must not change).
    """
    rng = None if gauge_seed is None else np.random.default_rng(gauge_seed)
    psi_plus, psi_minus, ds_map, gap_map = _branch_states_on_grid(
        params, grid, gap_floor, gauge_rng=rng
    )
    c_plus = float(np.sum(_plaquette_angles(psi_plus)) / (2.0 * np.pi))
    c_minus = float(np.sum(_plaquette_angles(psi_minus)) / (2.0 * np.pi))
    return InvariantRecord(
        c_plus=c_plus,
        c_minus=c_minus,
        c_s=(c_plus - c_minus) / 2.0,
        delta_s=float(np.min(ds_map)),
        delta_cv=float(np.min(gap_map)),
        grid_R=grid.R,
        grid_N=grid.N,
    )

"""Projective population measurement pipeline and frame rotation.

The noiseless pipeline: three z-basis population sums (direct, after a
pi swap of |+,E1> <-> |+,H1>, after a pi swap of |+,E1> <-> |-,H1>),
linear unfolding of the four level populations, and x/y readout through
blockwise pi/2 analysis pulses applied with both rotation signs.

Pulse convention: chi_x(+-pi/2) = exp(-+ i (pi/4) sigma_x) per block and
likewise for chi_y.  With it, <sigma_y> is the half difference of the
z readouts after chi_x(+pi/2) and chi_x(-pi/2), and <sigma_x> the half
difference after chi_y(-pi/2) and chi_y(+pi/2).

The z formula <sigma_z>' = 2 P_{tau,E1} - 1 assumes unit block norm; for
coupled blocks (g != 0) it differs from the unnormalized block expectation
by the documented offset (block_norm^2 - 1), see
pipeline_reference_from_state.
"""

from __future__ import annotations

import numpy as np

from .dynamics import SweepProtocol, bloch_expectations, norm_squared, project_pseudospin
from .errors import InconsistentDataError
from .model import ModelParams, SIGMA_X, SIGMA_Y

NORM_TOL = 1e-8


def _require_norm2(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    n2 = norm_squared(psi)
    if abs(n2 - 2.0) > NORM_TOL:
        raise ValueError(f"state norm squared is {n2!r}, expected 2")
    return psi


def measure_populations(psi: np.ndarray) -> tuple[float, float, float, float]:
    """(P_+E1, P_+H1, P_-E1, P_-H1): squared moduli in basis order."""
    psi = _require_norm2(psi)
    p = np.abs(psi) ** 2
    return (float(p[0]), float(p[1]), float(p[2]), float(p[3]))


def _swap_unitary(i: int, j: int) -> np.ndarray:
    u = np.eye(4, dtype=complex)
    u[i, i] = u[j, j] = 0.0
    u[i, j] = u[j, i] = 1.0
    return u


def projective_sequence(psi: np.ndarray) -> tuple[float, float, float]:
    """The three z-measurement sums (P_z1, P_z2, P_z3).

    Each pi pulse is applied as an exact two-level swap on a copy of the
    state; the measured quantity is always the total |E1> population.
    """
    psi = _require_norm2(psi)

    def upper_population(state: np.ndarray) -> float:
        p = np.abs(state) ** 2
        return float(p[0] + p[2])

    p_z1 = upper_population(psi)
    p_z2 = upper_population(_swap_unitary(0, 1) @ psi)
    p_z3 = upper_population(_swap_unitary(0, 3) @ psi)
    return (p_z1, p_z2, p_z3)


def solve_populations(
    p_z1: float, p_z2: float, p_z3: float
) -> tuple[float, float, float, float]:
    """Invert the three sums plus total normalization 2 for the populations.

    The system {P+E + P-E, P+H + P-E, P-E + P-H, sum = 2} has a unique
    solution; recovered populations outside [-1e-9, 2 + 1e-9] raise
    InconsistentDataError.
    """
    for name, val in (("P_z1", p_z1), ("P_z2", p_z2), ("P_z3", p_z3)):
        if not (0.0 <= val <= 2.0):
            raise ValueError(f"{name} = {val!r} outside [0, 2]")
    p_me = (p_z1 + p_z2 + p_z3 - 2.0) / 2.0
    p_pe = p_z1 - p_me
    p_ph = p_z2 - p_me
    p_mh = p_z3 - p_me
    quad = (p_pe, p_ph, p_me, p_mh)
    for val in quad:
        if val < -1e-9 or val > 2.0 + 1e-9:
            raise InconsistentDataError(
                f"recovered populations {quad} are unphysical; the three "
                "sums are inconsistent with normalization to 2"
            )
    return quad


def _block_rotation(axis: str, angle: float) -> np.ndarray:
    """Blockwise rotation exp(-i (angle/2) sigma_axis) on both pseudospins."""
    sigma = {"x": SIGMA_X, "y": SIGMA_Y}[axis]
    half = np.cos(angle / 2.0) * np.eye(2) - 1j * np.sin(angle / 2.0) * sigma
    u = np.zeros((4, 4), dtype=complex)
    u[0:2, 0:2] = half
    u[2:4, 2:4] = half
    return u


def _z_readout(psi: np.ndarray) -> dict[int, float]:
    """<sigma_z>' = 2 P_{tau,E1} - 1 for both blocks, via the full sequence."""
    p_pe, _, p_me, _ = solve_populations(*projective_sequence(psi))
    return {1: 2.0 * p_pe - 1.0, -1: 2.0 * p_me - 1.0}


def reconstruct_bloch(psi: np.ndarray) -> dict[int, tuple[float, float, float]]:
    """Per-pseudospin lab-frame Bloch triples from the population pipeline.

    Returns {+1: (sx', sy', sz'), -1: (...)}.  x and y come from the half
    difference of the two analysis-pulse signs, so they equal the
    unnormalized block expectations exactly; z carries the unit-block-norm
    convention of the population formula.
    """
    psi = _require_norm2(psi)
    z = _z_readout(psi)
    y_plus = _z_readout(_block_rotation("x", np.pi / 2.0) @ psi)
    y_minus = _z_readout(_block_rotation("x", -np.pi / 2.0) @ psi)
    x_plus = _z_readout(_block_rotation("y", np.pi / 2.0) @ psi)
    x_minus = _z_readout(_block_rotation("y", -np.pi / 2.0) @ psi)
    out = {}
    for tau in (1, -1):
        sy = (y_plus[tau] - y_minus[tau]) / 2.0
        sx = (x_minus[tau] - x_plus[tau]) / 2.0
        out[tau] = (sx, sy, z[tau])
    return out


def pipeline_reference_from_state(psi: np.ndarray) -> dict[int, tuple[float, float, float]]:
    """Expected pipeline output computed directly from block expectations.

    The conversion between the unnormalized direct expectations and the
    population pipeline's convention: x and y agree as-is, while
    z_pipeline = z_direct + (block_norm^2 - 1).
    """
    psi = np.asarray(psi, dtype=complex)
    out = {}
    for tau in (1, -1):
        eta = project_pseudospin(psi, tau)
        sx, sy, sz = bloch_expectations(eta)
        n2 = float(np.real(np.vdot(eta, eta)))
        out[tau] = (sx, sy, sz + (n2 - 1.0))
    return out


def frame_rotation(
    bloch_lab: tuple[float, float, float], phi0: float
) -> tuple[float, float, float]:
    """Rotate a lab-frame Bloch triple about z by phi0 into the rotating frame."""
    sx, sy, sz = bloch_lab
    c, s = np.cos(phi0), np.sin(phi0)
    return (c * sx - s * sy, s * sx + c * sy, sz)


def frame_angle(params: ModelParams, protocol: SweepProtocol, t: float) -> float:
    """Accumulated z-rotation phi0(t) = integral of Bz(kx(t'), ky) dt'.

    Trapezoid rule on the propagator's substep grid, so the angle is
    consistent between step counts (exactly so over the full sweep).
    """
    dt = protocol.total_time / protocol.steps
    n_full = int(np.floor(t / dt + 1e-12))
    n_full = min(n_full, protocol.steps)
    tgrid = np.arange(n_full + 1) * dt

    def bz(tv):
        kx = protocol.kx(np.asarray(tv, dtype=float))
        return params.M - 2.0 * params.B * (
            2.0 - np.cos(kx) - np.cos(protocol.ky)
        )

    phi = float(np.trapezoid(bz(tgrid), dx=dt)) if n_full >= 1 else 0.0
    t_rem = t - n_full * dt
    if t_rem > 1e-12 * protocol.total_time:
        phi += 0.5 * t_rem * float(bz(n_full * dt) + bz(t))
    return phi


def derotate_state(psi: np.ndarray, phi0: float) -> np.ndarray:
    """Blockwise z-rotation taking a rotating-frame state to the lab frame.

    The lab-frame Bloch vectors are the rotating ones turned by -phi0
    about z, so frame_rotation(phi0) applied to the lab triples recovers
    the rotating-frame values.
    """
    half = np.exp(0.5j * phi0)
    return np.asarray(psi, dtype=complex) * np.array(
        [half, np.conj(half), half, np.conj(half)]
    )

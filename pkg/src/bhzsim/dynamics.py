"""Driven evolution: kx sweep, pseudospin forces, linear-response curvature.

The sweep protocol is kx(t) = v t - pi with v = 2 pi / T, ky held fixed.
States are 4-component with total squared norm 2 (each pseudospin block
normalized to one at preparation).  Curvature samples are the physical
Berry curvature, so C_tau = (1/2 pi) * integral F_tau and
C_s = (C+ - C-)/2 = (1/4 pi) * integral F_s.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IntegrationError
from .invariants import GAP_FLOOR, spin_split
from .linalg import unitary_exp_batch
from .model import ModelParams, Momentum, SIGMA_X, SIGMA_Y, SIGMA_Z, hamiltonian_batch

REFERENCE_MODES = ("adiabatic", "initial", "paper-constant")

NORM_TOL = 1e-8
DRIFT_TOL = 1e-6


@dataclass(frozen=True)
class SweepProtocol:
    """One kx ramp at fixed ky: duration, substeps, and tomography stops.

    total_time is in units of 1/A; snapshots are taken at the midpoints of
    the meas_count uniform measurement intervals, so the sampled momenta
    form a uniform midpoint lattice on [-pi, pi).  steps must be a multiple
    of 2 * meas_count for the midpoints to land on substep boundaries.
    hold_kx freezes the ramp at a fixed kx (stationary-state validation).
    """

    ky: float
    total_time: float
    steps: int = 4800
    meas_count: int = 60
    hold_kx: float | None = None

    def __post_init__(self):
        if self.total_time <= 0:
            raise ValueError("total_time must be positive")
        if self.meas_count < 8:
            raise ValueError("meas_count must be at least 8")
        if self.steps % (2 * self.meas_count) != 0:
            raise ValueError(
                f"steps ({self.steps}) must be a multiple of "
                f"2 * meas_count ({2 * self.meas_count})"
            )

    @property
    def sweep_rate(self) -> float:
        """v_kx = 2 pi / T."""
        return 2.0 * np.pi / self.total_time

    def kx(self, t) -> np.ndarray:
        """Instantaneous momentum kx(t) (unwrapped; spans [-pi, pi])."""
        if self.hold_kx is not None:
            return np.full_like(np.asarray(t, dtype=float), self.hold_kx)
        return self.sweep_rate * np.asarray(t, dtype=float) - np.pi

    def snapshot_times(self) -> np.ndarray:
        """Measurement stop times at interval midpoints, (i + 1/2) T / M."""
        m = self.meas_count
        return (np.arange(m) + 0.5) * self.total_time / m


def default_protocol(
    params: ModelParams,
    ky: float,
    omega_t_over_pi: float = 24.0,
    steps: int | None = None,
    meas_count: int | None = None,
) -> SweepProtocol:
    """Protocol with Omega T = omega_t_over_pi * pi, Omega = A.

    Defaults keep the tomography-stop spacing and the substep length fixed
    in time as Omega T grows: 60 stops and 19200 substeps at Omega T = 24 pi.
    A fixed stop count would alias the nonadiabatic ringing (period set by
    the gap, independent of T) and spoil slow-sweep curvature integrals;
    the substep density is what the step-halving integrity check validates.
    """
    total_time = omega_t_over_pi * np.pi / params.A
    if meas_count is None:
        meas_count = max(60, int(np.ceil(8.0 * omega_t_over_pi)))
    if steps is None:
        steps = 2 * meas_count * max(1, int(np.ceil(400.0 * omega_t_over_pi / meas_count)))
    return SweepProtocol(ky=ky, total_time=total_time, steps=steps, meas_count=meas_count)


def norm_squared(psi: np.ndarray) -> float:
    return float(np.real(np.vdot(psi, psi)))


def prepare_initial_state(
    params: ModelParams, ky: float, gap_floor: float = GAP_FLOOR
) -> np.ndarray:
    """Equal superposition of the two spin-split occupied states at kx = -pi.

    Norm squared is exactly 2 (the two states are orthonormal).  At g = 0
    the state is block supported: one unit spinor per pseudospin.
    """
    pair = spin_split(params, Momentum(-np.pi, ky), gap_floor)
    return pair.psi_plus + pair.psi_minus


def initial_state_parameters(psi0: np.ndarray) -> dict[str, float]:
    """Block-form parameterization of a norm-2 state (pulse-design report).

    Decomposes psi0 = (alpha e^{i phi_rel} eta_plus, beta eta_minus) with
    each eta_tau = (-sin(theta/2) e^{i phi}, cos(theta/2)) and the minus
    block's overall phase fixed to zero.  Descriptive only; preparation
    never uses it.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    out: dict[str, float] = {}
    phases: dict[int, float] = {}
    for tau, name in ((1, "plus"), (-1, "minus")):
        eta = project_pseudospin(psi0, tau)
        amp = float(np.linalg.norm(eta))
        out["alpha" if tau == 1 else "beta"] = amp
        unit = eta / amp
        # remove the block phase so the second component is real positive
        block_phase = float(np.angle(unit[1])) if abs(unit[1]) > 1e-12 else float(
            np.angle(unit[0])
        )
        unit = unit * np.exp(-1j * block_phase)
        theta = 2.0 * float(np.arctan2(abs(unit[0]), float(np.real(unit[1]))))
        phi = float(np.angle(-unit[0])) if abs(unit[0]) > 1e-12 else 0.0
        out[f"theta_{name}"] = theta
        out[f"phi_{name}"] = phi
        phases[tau] = block_phase
    out["phi_rel"] = float(
        (phases[1] - phases[-1] + np.pi) % (2.0 * np.pi) - np.pi
    )
    return out


def rebuild_from_parameters(p: dict[str, float]) -> np.ndarray:
    """Inverse of initial_state_parameters, up to a global phase."""

    def eta(theta: float, phi: float) -> np.ndarray:
        return np.array(
            [-np.sin(theta / 2.0) * np.exp(1j * phi), np.cos(theta / 2.0)],
            dtype=complex,
        )

    top = p["alpha"] * np.exp(1j * p["phi_rel"]) * eta(p["theta_plus"], p["phi_plus"])
    bottom = p["beta"] * eta(p["theta_minus"], p["phi_minus"])
    return np.concatenate([top, bottom])


def propagate(
    params: ModelParams, protocol: SweepProtocol, psi0: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint-exponential integration of the sweep.

    Each substep applies unitary_exp(H(kx(t + dt/2), ky), dt); returns
    (times, states) with one row per measurement stop.  The norm is
    conserved exactly up to rounding; drift beyond 1e-6 raises
    IntegrationError.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    n0 = norm_squared(psi0)
    if abs(n0 - 2.0) > NORM_TOL:
        raise ValueError(f"initial state norm squared {n0!r} is not 2")

    dt = protocol.total_time / protocol.steps
    t_mid = (np.arange(protocol.steps) + 0.5) * dt
    h = hamiltonian_batch(params, protocol.kx(t_mid), protocol.ky)
    u = unitary_exp_batch(h, dt, check=False)

    times = protocol.snapshot_times()
    snap_idx = np.rint(times / dt).astype(int)
    snapshots = np.zeros((len(times), psi0.size), dtype=complex)

    psi = psi0.copy()
    pos = 0
    for i, stop in enumerate(snap_idx):
        for j in range(pos, stop):
            psi = u[j] @ psi
        pos = stop
        snapshots[i] = psi
    for j in range(pos, protocol.steps):
        psi = u[j] @ psi

    drift = abs(norm_squared(psi) - n0)
    if drift > DRIFT_TOL:
        raise IntegrationError(
            f"norm drift {drift:.3e} after {protocol.steps} substeps "
            f"(dt = {dt:.3e}); the integrator contract is violated"
        )
    return times, snapshots


def project_pseudospin(psi: np.ndarray, tau: int) -> np.ndarray:
    """The two amplitudes of block S_tau (tau = +1 or -1), unnormalized."""
    psi = np.asarray(psi)
    if tau == 1:
        return psi[..., 0:2]
    if tau == -1:
        return psi[..., 2:4]
    raise ValueError("tau must be +1 or -1")


def bloch_expectations(eta: np.ndarray) -> tuple[float, float, float]:
    """(<sx>, <sy>, <sz>) of a 2-component spinor, without renormalization."""
    eta = np.asarray(eta, dtype=complex)
    return (
        float(np.real(np.conj(eta) @ SIGMA_X @ eta)),
        float(np.real(np.conj(eta) @ SIGMA_Y @ eta)),
        float(np.real(np.conj(eta) @ SIGMA_Z @ eta)),
    )


def generalized_force(
    params: ModelParams, ky: float, bloch: tuple[float, float, float]
) -> float:
    """Pseudospin force A cos(ky) <sy> + 2B sin(ky) <sz> (= -<dH/dky> per block)."""
    _, sy, sz = bloch
    return params.A * np.cos(ky) * sy + 2.0 * params.B * np.sin(ky) * sz


def adiabatic_reference(
    params: ModelParams,
    k: Momentum,
    tau: int,
    mode: str = "adiabatic",
    gap_floor: float = GAP_FLOOR,
) -> float:
    """Reference force <f0^tau> subtracted in the linear-response formula.

    adiabatic: force on the instantaneous spin-split occupied state at k;
    initial: same but frozen at the sweep start (-pi, ky);
    paper-constant: the constant 4B sin(ky).
    """
    if mode not in REFERENCE_MODES:
        raise ValueError(f"unknown reference mode {mode!r}; use one of {REFERENCE_MODES}")
    if mode == "paper-constant":
        return 4.0 * params.B * np.sin(k.ky)
    at = Momentum(-np.pi, k.ky) if mode == "initial" else k
    pair = spin_split(params, at, gap_floor)
    psi = pair.psi_plus if tau == 1 else pair.psi_minus
    return generalized_force(params, k.ky, bloch_expectations(project_pseudospin(psi, tau)))


@dataclass(frozen=True)
class CurvatureLine:
    """Berry-curvature samples along one ky line."""

    ky: float
    kx: np.ndarray
    f_plus: np.ndarray
    f_minus: np.ndarray

    @property
    def f_s(self) -> np.ndarray:
        return self.f_plus - self.f_minus


@dataclass(frozen=True)
class CurvatureMap:
    """Curvature lines plus the protocol metadata they were measured with."""

    lines: list[CurvatureLine]
    omega_t_over_pi: float
    reference_mode: str
    meta: dict = field(default_factory=dict)


def berry_curvature_lr(
    params: ModelParams,
    protocol: SweepProtocol,
    reference_mode: str = "adiabatic",
    gap_floor: float = GAP_FLOOR,
) -> CurvatureLine:
    """Linear-response curvature along one ky line.

    F_tau(kx(t)) = (<f_tau>(t) - <f0_tau>) / v_kx, with the block force
    evaluated on the propagated state at each measurement stop.
    """
    if protocol.hold_kx is not None:
        raise ValueError("curvature extraction requires a running sweep")
    psi0 = prepare_initial_state(params, protocol.ky, gap_floor)
    times, snaps = propagate(params, protocol, psi0)
    kxs = protocol.kx(times)
    v = protocol.sweep_rate

    f = {1: np.zeros(len(times)), -1: np.zeros(len(times))}
    for i, psi in enumerate(snaps):
        for tau in (1, -1):
            bloch = bloch_expectations(project_pseudospin(psi, tau))
            f[tau][i] = generalized_force(params, protocol.ky, bloch)

    f0 = {1: np.zeros(len(times)), -1: np.zeros(len(times))}
    if reference_mode == "adiabatic":
        # one spin_split per sample covers both branches
        for i, kx in enumerate(kxs):
            pair = spin_split(params, Momentum(kx, protocol.ky), gap_floor)
            for tau, psi in ((1, pair.psi_plus), (-1, pair.psi_minus)):
                f0[tau][i] = generalized_force(
                    params, protocol.ky, bloch_expectations(project_pseudospin(psi, tau))
                )
    else:
        for tau in (1, -1):
            f0[tau][:] = adiabatic_reference(
                params, Momentum(-np.pi, protocol.ky), tau, reference_mode, gap_floor
            )

    return CurvatureLine(
        ky=protocol.ky,
        kx=kxs,
        f_plus=(f[1] - f0[1]) / v,
        f_minus=(f[-1] - f0[-1]) / v,
    )


def ky_line_set(count: int = 11) -> np.ndarray:
    """Uniform ky lines spanning [-pi, pi] inclusive (both ends present)."""
    if count < 2:
        raise ValueError("need at least two ky lines")
    return -np.pi + 2.0 * np.pi * np.arange(count) / (count - 1)


def measure_curvature_map(
    params: ModelParams,
    omega_t_over_pi: float = 24.0,
    ky_lines: int = 11,
    meas_count: int | None = None,
    steps: int | None = None,
    reference_mode: str = "adiabatic",
    gap_floor: float = GAP_FLOOR,
) -> CurvatureMap:
    """Run the full linear-response protocol over the standard ky line set."""
    lines = []
    for ky in ky_line_set(ky_lines):
        protocol = default_protocol(params, ky, omega_t_over_pi, steps, meas_count)
        lines.append(berry_curvature_lr(params, protocol, reference_mode, gap_floor))
    return CurvatureMap(lines=lines, omega_t_over_pi=omega_t_over_pi, reference_mode=reference_mode)


def integrate_curvature(cmap: CurvatureMap) -> tuple[float, float, float]:
    """(C_s, C+, C-) from a curvature map.

    C_tau = (1/2 pi) * double integral of F_tau: uniform (midpoint) rule
    along kx, trapezoid along ky with the duplicate end lines at +-pi each
    carrying half weight.  C_s = (C+ - C-)/2 exactly as computed.
    """
    if not cmap.lines:
        raise ValueError("empty curvature map")
    kys = np.array([line.ky for line in cmap.lines])
    order = np.argsort(kys)
    lines = [cmap.lines[i] for i in order]
    kys = kys[order]

    n_samples = {len(line.kx) for line in lines}
    if len(n_samples) != 1:
        raise ValueError("all ky lines must carry the same number of kx samples")
    dky_all = np.diff(kys)
    if len(lines) > 1 and np.max(np.abs(dky_all - dky_all[0])) > 1e-9:
        raise ValueError("ky lines must be uniformly spaced")
    for line in lines:
        dkx_all = np.diff(line.kx)
        if np.max(np.abs(dkx_all - dkx_all[0])) > 1e-9:
            raise ValueError(f"kx samples on line ky={line.ky:.4f} are not uniform")

    dkx = float(lines[0].kx[1] - lines[0].kx[0])
    if len(lines) == 1:
        dky = 2.0 * np.pi
        w = np.array([1.0])
    else:
        dky = float(dky_all[0])
        w = np.ones(len(lines))
        span = float(kys[-1] - kys[0])
        if abs(span - 2.0 * np.pi) < 1e-9:
            # both +-pi lines present: same physical line, half weight each
            w[0] = w[-1] = 0.5
        elif abs(span + dky - 2.0 * np.pi) > 1e-9:
            raise ValueError("ky lines must cover the Brillouin zone periodically")

    c = {}
    for tau, attr in ((1, "f_plus"), (-1, "f_minus")):
        total = sum(wi * float(np.sum(getattr(line, attr))) * dkx * dky
                    for wi, line in zip(w, lines))
        c[tau] = total / (2.0 * np.pi)
    return (c[1] - c[-1]) / 2.0, c[1], c[-1]


def boxcar_smooth(values: np.ndarray, window: int) -> np.ndarray:
    """Centered boxcar average over snapshots (trajectory-plot cosmetics)."""
    if window <= 1:
        return np.asarray(values, dtype=float)
    kernel = np.ones(window) / window
    pad = window // 2
    padded = np.pad(np.asarray(values, dtype=float), pad, mode="edge")
    out = np.convolve(padded, kernel, mode="same")
    return out[pad:len(padded) - pad]

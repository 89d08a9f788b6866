import numpy as np
import pytest

from bhzsim.grid import BZGrid
from bhzsim.linalg import hermitian_eigh
from bhzsim.model import (
    ModelParams,
    Momentum,
    SIGMA_Y,
    coefficients,
    dky_hamiltonian,
    eigenvalues_closed_form,
    energy_gap,
    gamma_matrices,
    hamiltonian,
)


def test_momentum_wrapping():
    k = Momentum(3.5 * np.pi, -np.pi)
    assert -np.pi <= k.kx < np.pi
    assert k.ky == -np.pi
    assert abs(k.kx - (3.5 * np.pi - 4.0 * np.pi)) < 1e-15


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(A=-1.0)
    with pytest.raises(ValueError):
        ModelParams(g=-0.1)
    with pytest.raises(ValueError):
        ModelParams(M=np.inf)


def test_coefficients_examples():
    p = ModelParams(A=1.0, B=1.0, M=2.0)
    c = coefficients(p, Momentum(0.0, 0.0))
    assert np.allclose(c.bplus, (0.0, 0.0, 2.0), atol=1e-15)
    assert np.allclose(c.bminus, (0.0, 0.0, 2.0), atol=1e-15)

    c = coefficients(p, Momentum(np.pi / 2.0, 0.0))
    assert np.allclose(c.bplus, (1.0, 0.0, 0.0), atol=1e-15)

    c = coefficients(p, Momentum(-np.pi, 0.0))
    assert np.allclose(c.bplus, (0.0, 0.0, -2.0), atol=1e-12)

    # the pair differs only in the x component's sign
    assert c.bplus[0] == -c.bminus[0]
    assert c.bplus[1:] == c.bminus[1:]


def test_hamiltonian_block_diagonal_case():
    p = ModelParams(M=2.0, g=0.0)
    h = hamiltonian(p, Momentum(0.0, 0.0))
    assert np.abs(h - np.diag([2.0, -2.0, 2.0, -2.0])).max() < 1e-15


def test_hamiltonian_coupled_eigenvalues():
    p = ModelParams(M=2.0, g=0.15)
    h = hamiltonian(p, Momentum(0.0, 0.0))
    vals, _ = hermitian_eigh(h)
    e = np.sqrt(4.0 + 0.15**2)
    assert np.allclose(vals, [-e, -e, e, e], atol=1e-12)


def test_hamiltonian_exactly_hermitian(rng):
    for _ in range(50):
        p = ModelParams(B=rng.uniform(0.5, 2), M=rng.uniform(-3, 3), g=rng.uniform(0, 0.5))
        k = Momentum(rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi))
        h = hamiltonian(p, k)
        assert np.abs(h - h.conj().T).max() == 0.0


def test_hamiltonian_periodicity():
    p = ModelParams(M=1.3, g=0.2)
    # exact where the 2 pi shift is representable: -pi + 2 pi = pi in floats
    a = hamiltonian(p, Momentum(-np.pi, 0.0))
    b = hamiltonian(p, Momentum(np.pi, 0.0))
    assert np.abs(a - b).max() == 0.0
    # generic k: limited only by the rounding of kx + 2 pi itself
    kx, ky = 0.71, -2.2
    a = hamiltonian(p, Momentum(kx, ky))
    b = hamiltonian(p, Momentum(kx + 2.0 * np.pi, ky - 2.0 * np.pi))
    assert np.abs(a - b).max() < 1e-13


def test_time_reversal_pairing(rng):
    # + block at k equals the conjugate of the - block at -k (g = 0 structure)
    p = ModelParams(M=0.7, g=0.0)
    for _ in range(20):
        kx, ky = rng.uniform(-np.pi, np.pi, size=2)
        hp = hamiltonian(p, Momentum(kx, ky))[:2, :2]
        hm = hamiltonian(p, Momentum(-kx, -ky))[2:, 2:]
        assert np.abs(hp - hm.conj()).max() < 1e-14


def test_closed_form_examples():
    p0 = ModelParams(M=2.0, g=0.0)
    assert np.allclose(eigenvalues_closed_form(p0, Momentum(0, 0)), (-2, -2, 2, 2), atol=1e-15)
    p = ModelParams(M=2.0, g=0.15)
    e = np.sqrt(4.0225)
    assert np.allclose(eigenvalues_closed_form(p, Momentum(0, 0)), (-e, -e, e, e), atol=1e-15)


def test_closed_form_matches_eigensolver(rng):
    # double degeneracy at every k, closed form vs numeric
    for _ in range(1000):
        p = ModelParams(B=rng.uniform(0.3, 2), M=rng.uniform(-4, 4), g=rng.uniform(0, 0.6))
        k = Momentum(rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi))
        vals, _ = hermitian_eigh(hamiltonian(p, k))
        ref = eigenvalues_closed_form(p, k)
        assert np.abs(np.array(ref) - vals).max() < 1e-10


def test_energy_gap_grid_scan():
    p = ModelParams(M=2.0, g=0.0)
    grid = BZGrid(60, 60)
    result = energy_gap(p, grid)
    # independent exhaustive scan over the same lattice
    kx, ky = grid.meshgrid()
    bx = np.sin(kx)
    by = -np.sin(ky)
    bz = 2.0 - 2.0 * (2.0 - np.cos(kx) - np.cos(ky))
    gaps = 2.0 * np.sqrt(bx**2 + by**2 + bz**2)
    idx = np.unravel_index(np.argmin(gaps), gaps.shape)
    assert abs(result.value - gaps[idx]) < 1e-12
    assert abs(result.at.kx - kx[idx]) < 1e-12
    assert abs(result.at.ky - ky[idx]) < 1e-12


def test_energy_gap_closes_at_transition():
    result = energy_gap(ModelParams(M=0.0, g=0.0), BZGrid(24, 24))
    assert result.value < 1e-12
    assert abs(result.at.kx) < 1e-12 and abs(result.at.ky) < 1e-12


def test_energy_gap_grows_with_g():
    grid = BZGrid(24, 24)
    gaps = [energy_gap(ModelParams(M=1.0, g=g), grid).value for g in (0.0, 0.1, 0.2, 0.4)]
    assert all(b > a for a, b in zip(gaps, gaps[1:]))


def test_gamma_matrices():
    gx, gy, gz = gamma_matrices()
    assert np.abs(gz @ gz - np.eye(4)).max() == 0.0
    assert np.abs(gy - gy.conj().T).max() == 0.0
    vals, _ = hermitian_eigh(gy)
    assert np.allclose(vals, [-1, -1, 1, 1], atol=1e-14)
    # documented sign convention: Gy = -blockdiag(sigma_y, sigma_y)
    blocky = np.zeros((4, 4), dtype=complex)
    blocky[:2, :2] = SIGMA_Y
    blocky[2:, 2:] = SIGMA_Y
    assert np.abs(gy + blocky).max() == 0.0
    assert np.abs(gx[:2, :2] - np.array([[0, 1], [1, 0]])).max() == 0.0


def test_dky_special_points():
    p = ModelParams(A=1.0, B=1.0, M=2.0, g=0.1)
    _, gy, gz = gamma_matrices()
    d0 = dky_hamiltonian(p, Momentum(0.4, 0.0))
    assert np.abs(d0 - gy).max() < 1e-15
    d1 = dky_hamiltonian(p, Momentum(0.4, np.pi / 2.0))
    assert np.abs(d1 + 2.0 * gz).max() < 1e-12


def test_dky_finite_difference(rng):
    step = 1e-5
    for _ in range(25):
        p = ModelParams(B=rng.uniform(0.5, 1.5), M=rng.uniform(-2, 2), g=rng.uniform(0, 0.3))
        kx, ky = rng.uniform(-3, 3, size=2)
        fd = (
            hamiltonian(p, Momentum(kx, ky + step)) - hamiltonian(p, Momentum(kx, ky - step))
        ) / (2.0 * step)
        assert np.abs(dky_hamiltonian(p, Momentum(kx, ky)) - fd).max() < 1e-8

import numpy as np
import pytest

from bhzsim.errors import DetuningClosureError

from bhzsim.microwave import (
    MicrowaveParams,
    frame_unitary,
    lab_frame_hamiltonian,
    model_to_microwaves,
    rotating_frame_hamiltonian,
    verify_frame_equivalence,
)
from bhzsim.model import ModelParams, Momentum, hamiltonian


def generic_tones():
    return MicrowaveParams(
        rabi=(0.8, 0.6, 0.2, 0.2),
        detuning=(0.5, 0.1, 0.3, 0.3),
        phase=(0.4, -1.2, 0.0, 0.0),
        levels=(50.0, 0.0, 72.5, 17.5),
    )


def test_lab_frame_drive_free_is_diagonal():
    mw = MicrowaveParams(
        rabi=(0.0, 0.0, 0.0, 0.0),
        detuning=(0.3, 0.1, 0.2, 0.2),
        phase=(0.0, 0.0, 0.0, 0.0),
        levels=(50.0, 0.0, 72.5, 17.5),
    )
    h = lab_frame_hamiltonian(mw, 1.234)
    assert np.abs(h - np.diag(np.diag(h))).max() == 0.0
    assert np.allclose(np.real(np.diag(h)), [50.0, 0.0, 72.5, 17.5], atol=1e-15)


def test_lab_frame_real_at_zero_phase_time():
    mw = MicrowaveParams(
        rabi=(0.8, 0.6, 0.2, 0.2),
        detuning=(0.5, 0.1, 0.3, 0.3),
        phase=(0.0, 0.0, 0.0, 0.0),
        levels=(50.0, 0.0, 72.5, 17.5),
    )
    h = lab_frame_hamiltonian(mw, 0.0)
    assert np.abs(h.imag).max() < 1e-15


def test_lab_frame_hermitian(rng):
    mw = generic_tones()
    for t in rng.uniform(0, 10, size=20):
        h = lab_frame_hamiltonian(mw, float(t))
        assert np.abs(h - h.conj().T).max() < 1e-14


def test_rotating_frame_drive_free_diagonal():
    mw = MicrowaveParams(
        rabi=(0.0, 0.0, 0.0, 0.0),
        detuning=(0.4, 0.2, 0.3, 0.3),
        phase=(0.0, 0.0, 0.0, 0.0),
        levels=(50.0, 0.0, 72.5, 17.5),
    )
    h = rotating_frame_hamiltonian(mw)
    assert np.allclose(np.diag(h), np.array([-0.4, 0.4, -0.2, 0.2]) / 2.0, atol=1e-15)
    assert np.abs(h - np.diag(np.diag(h))).max() == 0.0


def test_rotating_frame_closure_violation():
    mw = MicrowaveParams(
        rabi=(0.1, 0.1, 0.0, 0.0),
        detuning=(0.4, 0.2, 0.3, 0.2),  # Delta' = 0.1
        phase=(0.0, 0.0, 0.0, 0.0),
        levels=(50.0, 0.0, 72.5, 17.5),
    )
    with pytest.raises(DetuningClosureError):
        rotating_frame_hamiltonian(mw)


def test_mapping_fields():
    p = ModelParams(M=2.0, g=0.0)
    # z-only field: no in-plane Rabi drive, detuning carries -Bz
    mw = model_to_microwaves(p, Momentum(0.0, 0.0))
    assert mw.rabi[0] == 0.0
    assert mw.detuning[0] == -2.0
    assert mw.closure_defect == 0.0
    # x-only field
    mw = model_to_microwaves(p, Momentum(np.pi / 2.0, 0.0))
    assert abs(mw.rabi[0] - 1.0) < 1e-15
    assert abs(mw.phase[0]) < 1e-15
    assert abs(mw.detuning[0]) < 1e-15


def test_mapping_requires_carrier_scale():
    with pytest.raises(ValueError):
        model_to_microwaves(ModelParams(), Momentum(0.1, 0.2), synthetic_carrier_scale=5.0)


def test_roundtrip_identity(rng):
    # rotating-frame constructor reproduces exactly half the Bloch Hamiltonian
    for _ in range(40):
        p = ModelParams(B=rng.uniform(0.5, 1.5), M=rng.uniform(-3, 3), g=rng.uniform(0, 0.4))
        k = Momentum(rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi))
        h_rot = rotating_frame_hamiltonian(model_to_microwaves(p, k))
        assert np.abs(h_rot - hamiltonian(p, k) / 2.0).max() < 1e-12


def test_frame_unitary_is_identity_at_t0():
    mw = model_to_microwaves(ModelParams(M=2.0, g=0.15), Momentum(0.7, -1.1))
    assert np.abs(frame_unitary(mw, 0.0) - np.eye(4)).max() == 0.0


def test_frame_equivalence():
    res = verify_frame_equivalence(ModelParams(M=2.0, g=0.15), Momentum(0.7, -1.1))
    assert res.passed
    assert res.max_population_deviation < 1e-6
    # the documented 1/2 time rescale against BHZ evolution
    assert res.max_bhz_population_deviation < 1e-6


def test_frame_equivalence_zero_drive():
    # drive-free point: kx = ky = 0 kills the in-plane tones at g = 0's block level
    res = verify_frame_equivalence(
        ModelParams(M=2.0, g=0.0), Momentum(0.0, 0.0), steps=8192, total_time=2.0
    )
    assert res.max_population_deviation < 1e-9


def test_dual_integration_converges():
    a = verify_frame_equivalence(ModelParams(M=1.0, g=0.2), Momentum(0.5, 0.9), steps=16384)
    b = verify_frame_equivalence(ModelParams(M=1.0, g=0.2), Momentum(0.5, 0.9), steps=32768)
    assert b.max_population_deviation < a.max_population_deviation

import numpy as np
import pytest

from bhzsim.dynamics import (
    bloch_expectations,
    default_protocol,
    prepare_initial_state,
    project_pseudospin,
    propagate,
)
from bhzsim.errors import InconsistentDataError
from bhzsim.model import ModelParams
from bhzsim.tomography import (
    derotate_state,
    frame_angle,
    frame_rotation,
    measure_populations,
    pipeline_reference_from_state,
    projective_sequence,
    reconstruct_bloch,
    solve_populations,
)

from conftest import random_state


def test_measure_populations_basis_states():
    assert measure_populations(np.array([0, 1, 0, 1], dtype=complex)) == (0, 1, 0, 1)
    assert measure_populations(np.array([1, 0, 1, 0], dtype=complex)) == (1, 0, 1, 0)


def test_measure_populations_norm_contract(rng):
    for _ in range(200):
        v = random_state(rng)
        assert abs(sum(measure_populations(v)) - 2.0) < 1e-12
    with pytest.raises(ValueError):
        measure_populations(np.array([1, 0, 0, 0], dtype=complex))


def test_projective_sequence_examples():
    assert projective_sequence(np.array([0, 1, 0, 1], dtype=complex)) == (0, 1, 1)
    assert projective_sequence(np.array([1, 0, 1, 0], dtype=complex)) == (2, 1, 1)


def test_sequence_is_linear_combination(rng):
    for _ in range(200):
        v = random_state(rng)
        p = measure_populations(v)
        z1, z2, z3 = projective_sequence(v)
        assert abs(z1 - (p[0] + p[2])) < 1e-12
        assert abs(z2 - (p[1] + p[2])) < 1e-12
        assert abs(z3 - (p[2] + p[3])) < 1e-12


def test_solve_populations_examples_and_roundtrip(rng):
    assert solve_populations(0, 1, 1) == (0, 1, 0, 1)
    assert solve_populations(2, 1, 1) == (1, 0, 1, 0)
    for _ in range(1000):
        v = random_state(rng)
        direct = np.array(measure_populations(v))
        solved = np.array(solve_populations(*projective_sequence(v)))
        assert np.abs(direct - solved).max() < 1e-10


def test_solve_populations_errors():
    with pytest.raises(ValueError):
        solve_populations(-0.1, 0.5, 0.5)
    with pytest.raises(InconsistentDataError):
        solve_populations(2.0, 0.0, 2.0)


def test_reconstruct_trivial_states():
    rec = reconstruct_bloch(np.array([0, 1, 0, 1], dtype=complex))
    assert np.allclose(rec[1], (0, 0, -1), atol=1e-12)
    assert np.allclose(rec[-1], (0, 0, -1), atol=1e-12)

    v = np.array([1 / np.sqrt(2), 1 / np.sqrt(2), 0, 1], dtype=complex)
    rec = reconstruct_bloch(v)
    assert np.allclose(rec[1], (1, 0, 0), atol=1e-12)
    assert np.allclose(rec[-1], (0, 0, -1), atol=1e-12)


def test_reconstruct_matches_direct_expectations(rng):
    for _ in range(1000):
        v = random_state(rng)
        rec = reconstruct_bloch(v)
        ref = pipeline_reference_from_state(v)
        for tau in (1, -1):
            assert np.abs(np.array(rec[tau]) - np.array(ref[tau])).max() < 1e-10


def test_pipeline_convention_offset(rng):
    # x, y equal the unnormalized block expectations; z is offset by n^2 - 1
    for _ in range(100):
        v = random_state(rng)
        rec = reconstruct_bloch(v)
        for tau in (1, -1):
            eta = project_pseudospin(v, tau)
            sx, sy, sz = bloch_expectations(eta)
            n2 = float(np.vdot(eta, eta).real)
            assert abs(rec[tau][0] - sx) < 1e-10
            assert abs(rec[tau][1] - sy) < 1e-10
            assert abs(rec[tau][2] - (sz + n2 - 1.0)) < 1e-10


def test_frame_rotation_basics():
    assert frame_rotation((1.0, 0.0, 0.0), 0.0) == (1.0, 0.0, 0.0)
    rot = frame_rotation((1.0, 0.0, 0.0), np.pi / 2.0)
    assert np.allclose(rot, (0.0, 1.0, 0.0), atol=1e-12)
    fwd = frame_rotation((0.3, -0.7, 0.2), 1.234)
    back = frame_rotation(fwd, -1.234)
    assert np.allclose(back, (0.3, -0.7, 0.2), atol=1e-12)
    assert fwd[2] == 0.2  # z untouched, exactly


def test_frame_angle_step_consistency():
    p = ModelParams(M=2.0, g=0.15)
    proto_a = default_protocol(p, 0.6, 24.0)
    proto_b = default_protocol(p, 0.6, 24.0, steps=2 * proto_a.steps)
    t_end = proto_a.total_time
    assert abs(frame_angle(p, proto_a, t_end) - frame_angle(p, proto_b, t_end)) < 1e-8


@pytest.mark.parametrize("g", [0.0, 0.15])
def test_end_to_end_pipeline(g):
    # full chain: propagate, derotate into the lab frame, measure, unfold,
    # rotate back, compare against direct rotating-frame expectations
    p = ModelParams(M=2.0, g=g)
    proto = default_protocol(p, 0.6, 24.0, meas_count=60)
    psi0 = prepare_initial_state(p, 0.6)
    times, snaps = propagate(p, proto, psi0)
    worst = 0.0
    for t, psi in zip(times, snaps):
        phi0 = frame_angle(p, proto, float(t))
        lab = derotate_state(psi, phi0)
        measured = reconstruct_bloch(lab)
        ref = pipeline_reference_from_state(psi)
        for tau in (1, -1):
            got = frame_rotation(measured[tau], phi0)
            worst = max(worst, float(np.max(np.abs(np.array(got) - np.array(ref[tau])))))
    assert worst < 1e-8


def test_derotation_preserves_populations(rng):
    v = random_state(rng)
    assert np.allclose(
        measure_populations(v), measure_populations(derotate_state(v, 2.13)), atol=1e-12
    )

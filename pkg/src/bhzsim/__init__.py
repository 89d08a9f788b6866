"""Spin Chern numbers of the quantum-simulated BHZ model.

Desk-scale reproduction of the measurement: exact U-link lattice
invariants, driven four-level dynamics with linear-response Berry
curvature extraction, and the tomography / frame-rotation data pipeline.
"""

from .analytic import plaquette_flux_exact, two_band_chern, two_band_curvature
from .config import RunConfig, default_config, load_config
from .dynamics import (
    CurvatureLine,
    CurvatureMap,
    SweepProtocol,
    adiabatic_reference,
    berry_curvature_lr,
    bloch_expectations,
    default_protocol,
    generalized_force,
    initial_state_parameters,
    integrate_curvature,
    ky_line_set,
    measure_curvature_map,
    prepare_initial_state,
    project_pseudospin,
    propagate,
)
from .errors import (
    ConfigError,
    DetuningClosureError,
    GapClosedError,
    IllConditionedLinkError,
    InconsistentDataError,
    IntegrationError,
    NonHermitianError,
    NumericalPreconditionError,
)
from .grid import BZGrid
from .invariants import (
    InvariantRecord,
    SpinSplitPair,
    occupied_states,
    spin_chern,
    spin_gap,
    spin_matrix,
    spin_split,
    ulink_field_strength,
)
from .linalg import hermitian_eigh, orthonormalize, unitary_exp
from .microwave import (
    MicrowaveParams,
    frame_unitary,
    lab_frame_hamiltonian,
    model_to_microwaves,
    rotating_frame_hamiltonian,
    verify_frame_equivalence,
)
from .model import (
    CoefficientPair,
    GapMinimum,
    ModelParams,
    Momentum,
    coefficients,
    dky_hamiltonian,
    eigenvalues_closed_form,
    energy_gap,
    gamma_matrices,
    hamiltonian,
)
from .tomography import (
    frame_angle,
    frame_rotation,
    measure_populations,
    pipeline_reference_from_state,
    projective_sequence,
    reconstruct_bloch,
    solve_populations,
)

__version__ = "0.1.0"

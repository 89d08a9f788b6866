"""Exception types shared across the package.

NumericalPreconditionError and its subclasses map to CLI exit code 3;
ConfigError maps to exit code 2.
"""

from __future__ import annotations


class NumericalPreconditionError(Exception):
    """A numerical contract required by an operation does not hold."""


class NonHermitianError(NumericalPreconditionError):
    """Input matrix fails the Hermiticity tolerance."""

    def __init__(self, asymmetry: float, tol: float):
        self.asymmetry = asymmetry
        self.tol = tol
        super().__init__(
            f"matrix is not Hermitian: max |H[i,j] - conj(H[j,i])| = "
            f"{asymmetry:.3e} exceeds {tol:.3e}"
        )


class DegenerateInputError(NumericalPreconditionError):
    """Vectors handed to orthonormalize are (numerically) linearly dependent."""


class GapClosedError(NumericalPreconditionError):
    """Energy or spin gap below the admissibility floor at a momentum point."""

    def __init__(self, which: str, kx: float, ky: float, value: float, floor: float):
        self.which = which
        self.kx = kx
        self.ky = ky
        self.value = value
        self.floor = floor
        super().__init__(
            f"{which} gap {value:.3e} below floor {floor:.3e} "
            f"at k = ({kx:+.6f}, {ky:+.6f})"
        )


class IllConditionedLinkError(NumericalPreconditionError):
    """A plaquette link modulus is too small for a reliable phase.

    Indicates a state discontinuity between neighbouring grid points;
    refine the grid.
    """


class DetuningClosureError(NumericalPreconditionError):
    """Microwave detunings violate the time-independence closure condition."""


class IntegrationError(NumericalPreconditionError):
    """The propagator failed an internal consistency check."""


class InconsistentDataError(NumericalPreconditionError):
    """Measured population sums do not correspond to a physical state."""


class ConfigError(Exception):
    """Malformed or incomplete run configuration."""

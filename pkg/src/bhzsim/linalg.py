"""Dense complex Hermitian linear algebra for 2x2 and 4x4 matrices.

Eigendecomposition uses cyclic complex Jacobi rotations; convergence is
declared when the off-diagonal Frobenius norm drops below 1e-13 * ||H||_F.
All routines accept a leading batch dimension so grid-sized workloads run
vectorized.  Within a degenerate eigenvalue cluster (splitting below
1e-9 * max(1, |lambda|_max)) the returned basis is an arbitrary orthonormal
basis of the cluster subspace; callers must not rely on its gauge.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateInputError, NonHermitianError

HERMITICITY_TOL = 1e-12
OFFDIAG_TOL = 1e-13
DEGENERACY_TOL = 1e-9

_MAX_SWEEPS = 40


def hermiticity_defect(h: np.ndarray) -> float:
    """Max entry-wise deviation of h from its conjugate transpose."""
    return float(np.max(np.abs(h - np.conj(np.swapaxes(h, -1, -2)))))


def require_hermitian(h: np.ndarray, tol: float | None = None) -> None:
    """Raise NonHermitianError if h (or any matrix of a batch) fails ``tol``."""
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 0.0)
    eff = (HERMITICITY_TOL if tol is None else tol) * scale
    defect = hermiticity_defect(h)
    if defect > eff:
        raise NonHermitianError(defect, eff)


def _jacobi_sweep(a: np.ndarray, v: np.ndarray, p: int, q: int, skip: np.ndarray) -> None:
    """One cyclic pivot (p, q) applied in place to every matrix of the batch.

    ``skip`` holds per-matrix thresholds below which a pivot is left alone.
    """
    apq = a[:, p, q].copy()
    absh = np.abs(apq)
    active = absh > skip
    if not np.any(active):
        return
    # Unit phase of the pivot entry; e^{i*phi} with phi = arg(a_pq).
    phase = np.where(active, apq / np.where(active, absh, 1.0), 1.0)
    # Copies, not views: the updates below mutate these entries in place.
    alpha = a[:, p, p].real.copy()
    beta = a[:, q, q].real.copy()
    denom = np.where(active, 2.0 * absh, 1.0)
    tau = (beta - alpha) / denom
    sgn = np.where(tau >= 0.0, 1.0, -1.0)
    t = np.where(active, sgn / (np.abs(tau) + np.sqrt(1.0 + tau * tau)), 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c

    cs = c[:, None]
    s_col = (s * np.conj(phase))[:, None]
    s_row = (s * phase)[:, None]

    # A <- J^dag A J with J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q).
    col_p = a[:, :, p].copy()
    col_q = a[:, :, q].copy()
    a[:, :, p] = cs * col_p - s_col * col_q
    a[:, :, q] = s[:, None] * col_p + cs * np.conj(phase)[:, None] * col_q
    row_p = a[:, p, :].copy()
    row_q = a[:, q, :].copy()
    a[:, p, :] = cs * row_p - s_row * row_q
    a[:, q, :] = s[:, None] * row_p + cs * phase[:, None] * row_q

    # Exact post-rotation values of the pivot block.
    a[:, p, q] = np.where(active, 0.0, a[:, p, q])
    a[:, q, p] = np.where(active, 0.0, a[:, q, p])
    a[:, p, p] = np.where(active, alpha - t * absh, a[:, p, p].real)
    a[:, q, q] = np.where(active, beta + t * absh, a[:, q, q].real)

    vcol_p = v[:, :, p].copy()
    vcol_q = v[:, :, q].copy()
    v[:, :, p] = cs * vcol_p - s_col * vcol_q
    v[:, :, q] = s[:, None] * vcol_p + cs * np.conj(phase)[:, None] * vcol_q


def _offdiag_norm(a: np.ndarray) -> np.ndarray:
    d = a.shape[-1]
    mask = ~np.eye(d, dtype=bool)
    return np.sqrt(np.sum(np.abs(a[:, mask]) ** 2, axis=1))


def eigh_batch(h: np.ndarray, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a batch.

    h has shape (..., d, d); returns (values (..., d), vectors (..., d, d))
    with vectors[..., :, i] the eigenvector of values[..., i].
    """
    h = np.asarray(h, dtype=complex)
    lead = h.shape[:-2]
    d = h.shape[-1]
    if h.shape[-2] != d:
        raise ValueError(f"matrix block must be square, got {h.shape[-2:]}")
    if check:
        require_hermitian(h)
    a = h.reshape(-1, d, d).copy()
    n = a.shape[0]
    v = np.broadcast_to(np.eye(d, dtype=complex), (n, d, d)).copy()

    fro = np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2)))
    target = OFFDIAG_TOL * np.maximum(fro, np.finfo(float).tiny)
    # Pivots smaller than this cannot keep the off-norm above target.
    skip = 1e-15 * np.maximum(fro, np.finfo(float).tiny)

    pivots = [(p, q) for p in range(d) for q in range(p + 1, d)]
    for _ in range(_MAX_SWEEPS):
        if np.all(_offdiag_norm(a) <= target):
            break
        for p, q in pivots:
            _jacobi_sweep(a, v, p, q, skip)
    else:
        raise RuntimeError("Jacobi eigensolver failed to converge")

    vals = np.real(np.diagonal(a, axis1=1, axis2=2))
    order = np.argsort(vals, axis=1, kind="stable")
    vals = np.take_along_axis(vals, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return vals.reshape(*lead, d), v.reshape(*lead, d, d)


def hermitian_eigh(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of one Hermitian 2x2 or 4x4 matrix.

    Returns (eigenvalues ascending, eigenvector columns).  Raises
    NonHermitianError when the input fails the Hermiticity tolerance.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if h.shape[0] not in (2, 4):
        raise ValueError(f"only dimensions 2 and 4 are supported, got {h.shape[0]}")
    return eigh_batch(h)


def degeneracy_clusters(values: np.ndarray) -> list[list[int]]:
    """Group ascending eigenvalues into clusters of near-degenerate indices."""
    values = np.asarray(values, dtype=float)
    tol = DEGENERACY_TOL * max(1.0, float(np.max(np.abs(values))) if values.size else 0.0)
    clusters: list[list[int]] = []
    for i, lam in enumerate(values):
        if clusters and lam - values[clusters[-1][-1]] < tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


def unitary_exp_batch(h: np.ndarray, dt: float, check: bool = True) -> np.ndarray:
    """exp(-i * h * dt) for a batch of Hermitian matrices, via eigendecomposition."""
    vals, vecs = eigh_batch(h, check=check)
    phase = np.exp(-1j * dt * vals)
    return (vecs * phase[..., None, :]) @ np.conj(np.swapaxes(vecs, -1, -2))


def unitary_exp(h: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i * h * dt) for one Hermitian matrix; unitary by construction."""
    h = np.asarray(h, dtype=complex)
    return unitary_exp_batch(h, dt)


def orthonormalize(vectors: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt on the columns of ``vectors``.

    Two passes, so residual pairwise overlaps stay below 1e-12.  Raises
    DegenerateInputError when a pivot norm falls below 1e-10.
    """
    v = np.array(vectors, dtype=complex, copy=True)
    if v.ndim != 2:
        raise ValueError("expected a 2-d array of column vectors")
    m = v.shape[1]
    for _ in range(2):
        for j in range(m):
            for i in range(j):
                v[:, j] -= (v[:, i].conj() @ v[:, j]) * v[:, i]
            norm = np.linalg.norm(v[:, j])
            if norm < 1e-10:
                raise DegenerateInputError(
                    f"column {j} is linearly dependent on its predecessors "
                    f"(pivot norm {norm:.3e})"
                )
            v[:, j] /= norm
    return v

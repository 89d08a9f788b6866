"""Closed-form two-band Berry curvature for the decoupled (g = 0) blocks.

Independent of the eigensolver and U-link machinery: everything follows
from the unit coefficient field of one block.  The sign convention matches
the package-wide one (C+ = +1 at M = 2B, g = 0), i.e.

    F_tau(k) = -(1/2) b . (d_kx b x d_ky b),   b = B_tau / |B_tau|,

for the lower band, with C_tau = (1/2 pi) * integral of F_tau over the BZ.
"""

from __future__ import annotations

import numpy as np

from .model import ModelParams

# 8-point Gauss-Legendre nodes/weights on [-1, 1].
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _unit_field_and_derivatives(params: ModelParams, tau: int, kx, ky):
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    sx = float(tau)
    b = np.stack(
        np.broadcast_arrays(
            sx * params.A * np.sin(kx),
            -params.A * np.sin(ky) * np.ones_like(kx),
            params.M - 2.0 * params.B * (2.0 - np.cos(kx) - np.cos(ky)),
        ),
        axis=-1,
    )
    db_dx = np.stack(
        np.broadcast_arrays(
            sx * params.A * np.cos(kx),
            np.zeros_like(kx + ky),
            -2.0 * params.B * np.sin(kx) * np.ones_like(ky),
        ),
        axis=-1,
    )
    db_dy = np.stack(
        np.broadcast_arrays(
            np.zeros_like(kx + ky),
            -params.A * np.cos(ky) * np.ones_like(kx),
            -2.0 * params.B * np.sin(ky) * np.ones_like(kx),
        ),
        axis=-1,
    )
    return b, db_dx, db_dy


def two_band_curvature(params: ModelParams, tau: int, kx, ky) -> np.ndarray:
    """Lower-band Berry curvature of block tau (= +1 or -1) at momenta arrays."""
    if tau not in (1, -1):
        raise ValueError("tau must be +1 or -1")
    b, db_dx, db_dy = _unit_field_and_derivatives(params, tau, kx, ky)
    norm = np.linalg.norm(b, axis=-1, keepdims=True)
    bh = b / norm
    # d(b/|b|) = (db - bh (bh . db)) / |b|
    dbh_dx = (db_dx - bh * np.sum(bh * db_dx, axis=-1, keepdims=True)) / norm
    dbh_dy = (db_dy - bh * np.sum(bh * db_dy, axis=-1, keepdims=True)) / norm
    triple = np.sum(bh * np.cross(dbh_dx, dbh_dy), axis=-1)
    return -0.5 * triple


def plaquette_flux(params: ModelParams, tau: int, kx0: float, ky0: float, dkx: float, dky: float) -> float:
    """Integral of the analytic curvature over one plaquette (Gauss-Legendre)."""
    xs = kx0 + 0.5 * dkx * (1.0 + _GL_NODES)
    ys = ky0 + 0.5 * dky * (1.0 + _GL_NODES)
    f = two_band_curvature(params, tau, xs[:, None], ys[None, :])
    w = np.outer(_GL_WEIGHTS, _GL_WEIGHTS)
    return float(np.sum(w * f) * 0.25 * dkx * dky)


def _triangle_solid_angle(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Signed solid angle of the geodesic triangle (a, b, c) on the unit sphere."""
    num = np.sum(a * np.cross(b, c), axis=-1)
    den = 1.0 + np.sum(a * b, axis=-1) + np.sum(b * c, axis=-1) + np.sum(c * a, axis=-1)
    return 2.0 * np.arctan2(num, den)


def plaquette_flux_exact(
    params: ModelParams, tau: int, kx0: float, ky0: float, dkx: float, dky: float
) -> float:
    """Exact lower-band Berry flux through the geodesic image of one plaquette.

    The four corner states of a two-band plaquette span a geodesic
    quadrilateral of Bloch vectors n = -b on the unit sphere; the flux
    through that quadrilateral is half its signed solid angle.  This is the
    quantity a four-link plaquette product measures, so the agreement with
    the U-link field strength is exact (to rounding), unlike the flux
    through the coordinate cell, which differs at O(dk^2).
    """
    corners = [
        (kx0, ky0),
        (kx0 + dkx, ky0),
        (kx0 + dkx, ky0 + dky),
        (kx0, ky0 + dky),
    ]
    ns = []
    for kx, ky in corners:
        b, _, _ = _unit_field_and_derivatives(params, tau, kx, ky)
        ns.append(-b / np.linalg.norm(b))
    omega = _triangle_solid_angle(ns[0], ns[1], ns[2]) + _triangle_solid_angle(
        ns[0], ns[2], ns[3]
    )
    return float(0.5 * omega)


def two_band_chern(params: ModelParams, tau: int, resolution: int = 96) -> float:
    """BZ integral (1/2 pi) * int F_tau, by plaquette-wise Gauss quadrature."""
    dk = 2.0 * np.pi / resolution
    edges = -np.pi + dk * np.arange(resolution)
    total = 0.0
    for kx0 in edges:
        xs = kx0 + 0.5 * dk * (1.0 + _GL_NODES)
        for ky0 in edges:
            ys = ky0 + 0.5 * dk * (1.0 + _GL_NODES)
            f = two_band_curvature(params, tau, xs[:, None], ys[None, :])
            total += float(np.sum(np.outer(_GL_WEIGHTS, _GL_WEIGHTS) * f)) * 0.25 * dk * dk
    return total / (2.0 * np.pi)

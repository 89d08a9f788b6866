"""Matplotlib figure rendering for the CLI report paths (headless)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dynamics import CurvatureMap
from .io import SweepRecord


def plot_phase_diagram(records: list[SweepRecord], path: str) -> None:
    """C_s, C+, C- versus M/2B, one curve set per g value."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    gs = sorted({r.g_over_a for r in records})
    markers = ["o", "s", "D", "^"]
    for i, g in enumerate(gs):
        pts = sorted(
            (r for r in records if r.g_over_a == g and r.status == "ok"),
            key=lambda r: r.m_over_2b,
        )
        if not pts:
            continue
        x = [r.m_over_2b for r in pts]
        mk = markers[i % len(markers)]
        if any(r.cs_ulink is not None for r in pts):
            ax.plot(x, [r.cs_ulink for r in pts], mk + "-", label=f"$C_s$ U-link, g/A={g:g}")
            ax.plot(x, [r.c_plus for r in pts], mk + "--", alpha=0.6, label=f"$C_+$, g/A={g:g}")
            ax.plot(x, [r.c_minus for r in pts], mk + ":", alpha=0.6, label=f"$C_-$, g/A={g:g}")
        lr = [(r.m_over_2b, r.cs_lr) for r in pts if r.cs_lr is not None]
        if lr:
            ax.plot(*zip(*lr), "x", ms=8, label=f"$C_s$ LR, g/A={g:g}")
    ax.axvline(0.0, color="k", lw=0.5)
    ax.set_xlabel("$M/2B$")
    ax.set_ylabel("invariant")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_curvature_map(cmap: CurvatureMap, path: str) -> None:
    """Spin Berry curvature F_s over the sampled (kx, ky) lattice."""
    lines = sorted(cmap.lines, key=lambda ln: ln.ky)
    kys = np.array([ln.ky for ln in lines])
    kxs = lines[0].kx
    fs = np.array([ln.f_s for ln in lines])
    fig, ax = plt.subplots(figsize=(5.4, 4.4))
    mesh = ax.pcolormesh(kxs, kys, fs, shading="nearest", cmap="RdBu_r")
    fig.colorbar(mesh, ax=ax, label="$F_s$")
    ax.set_xlabel("$k_x$")
    ax.set_ylabel("$k_y$")
    ax.set_title(f"$\\Omega T = {cmap.omega_t_over_pi:g}\\pi$, ref: {cmap.reference_mode}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_tomography(rows: list[dict], path: str, smooth_note: str = "") -> None:
    """Reconstructed versus direct Bloch components along the sweep."""
    fig, axes = plt.subplots(2, 1, figsize=(6.4, 6.0), sharex=True)
    for ax, tau, name in ((axes[0], 1, "$S_+$"), (axes[1], -1, "$S_-$")):
        sel = [r for r in rows if r.get("tau") == tau]
        t = [r["t"] for r in sel]
        for comp, color in (("sx", "tab:blue"), ("sy", "tab:orange"), ("sz", "tab:green")):
            ax.plot(t, [r[f"{comp}_direct"] for r in sel], "-", color=color, lw=1,
                    label=f"{comp} direct")
            ax.plot(t, [r[f"{comp}_pipeline"] for r in sel], ".", color=color, ms=3,
                    label=f"{comp} pipeline")
        ax.set_ylabel(f"{name} Bloch components")
        ax.legend(fontsize=6, ncol=3)
    axes[1].set_xlabel("t [1/A]" + (f"  ({smooth_note})" if smooth_note else ""))
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_convergence(records: list[SweepRecord], path: str) -> None:
    """|C_s^LR - C_s^ulink| versus Omega T for each parameter point."""
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    keys = sorted({(r.m_over_2b, r.g_over_a) for r in records})
    for m2b, ga in keys:
        pts = sorted(
            (
                r
                for r in records
                if r.m_over_2b == m2b and r.g_over_a == ga
                and r.cs_lr is not None and r.cs_ulink is not None
            ),
            key=lambda r: r.omega_t_over_pi,
        )
        if len(pts) < 2:
            continue
        ax.semilogy(
            [r.omega_t_over_pi for r in pts],
            [abs(r.cs_lr - r.cs_ulink) for r in pts],
            "o-",
            label=f"M/2B={m2b:g}, g/A={ga:g}",
        )
    ax.set_xlabel("$\\Omega T / \\pi$")
    ax.set_ylabel("$|C_s^{LR} - C_s^{U}|$")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

"""Command line interface.

Subcommands: ulink, lr, tomography, frames-check, sweep.  Flags:
--config <path>, --output <path>, --workers <n>, --seed <n>, --plot.
Exit codes: 0 success, 2 config error, 3 numerical-precondition failure.
All outputs land in the output directory with fixed names; row order and
bytes are deterministic for a given config + seed, whatever the worker
count.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from multiprocessing import Pool

import numpy as np

from . import dynamics, tomography
from .config import ConfigError, RunConfig, default_config, load_config, validate_config
from .errors import GapClosedError, NumericalPreconditionError
from .grid import BZGrid
from .invariants import spin_chern
from .io import (
    SweepRecord,
    sweep_summary,
    write_csv,
    write_json,
    write_sweep_csv,
)
from .microwave import verify_frame_equivalence
from .model import ModelParams, Momentum

TOMOGRAPHY_COLUMNS = (
    "t",
    "tau",
    "sx_direct",
    "sy_direct",
    "sz_direct",
    "sx_pipeline",
    "sy_pipeline",
    "sz_pipeline",
    "residual",
)


def _sweep_points(cfg: RunConfig) -> list[tuple[float, float]]:
    """(m_over_2b, g_over_a) grid; the base model point when lists are empty."""
    m_vals = cfg.sweep.m_over_2b_values or (cfg.model.M / (2.0 * cfg.model.B),)
    g_vals = cfg.sweep.g_over_a_values or (cfg.model.g / cfg.model.A,)
    return sorted({(float(m), float(g)) for m in m_vals for g in g_vals})


def _omega_ts(cfg: RunConfig) -> list[float]:
    return sorted(set(cfg.sweep.omega_t_over_pi_values or (cfg.protocol.omega_t_over_pi,)))


def _point_params(cfg: RunConfig, m_over_2b: float, g_over_a: float) -> ModelParams:
    return ModelParams(
        A=cfg.model.A,
        B=cfg.model.B,
        M=2.0 * cfg.model.B * m_over_2b,
        g=cfg.model.A * g_over_a,
    )


def _run_jobs(worker, jobs: list, workers: int) -> list:
    """Map worker over jobs, parallel when workers > 1; order preserved."""
    if workers <= 1 or len(jobs) <= 1:
        return [worker(job) for job in jobs]
    with Pool(processes=workers) as pool:
        indexed = pool.map(_indexed_call, [(worker, i, job) for i, job in enumerate(jobs)])
    return [res for _, res in sorted(indexed, key=lambda item: item[0])]


def _indexed_call(packed):
    worker, idx, job = packed
    return idx, worker(job)


def _ulink_worker(job) -> SweepRecord:
    cfg, (m2b, ga), omega_t, point_index = job
    params = _point_params(cfg, m2b, ga)
    grid = BZGrid(cfg.grid.R, cfg.grid.N)
    seed = cfg.seed + point_index if cfg.gauge_scramble else None
    try:
        rec = spin_chern(params, grid, cfg.gap_floor, gauge_seed=seed)
    except GapClosedError:
        # a closed gap at a sweep point is itself a reportable result;
        # other numerical failures (ill-conditioned links) propagate
        return SweepRecord(
            m_over_2b=m2b, g_over_a=ga, omega_t_over_pi=omega_t,
            status="gap-closed", grid_R=grid.R, grid_N=grid.N,
        )
    return SweepRecord(
        m_over_2b=m2b, g_over_a=ga, omega_t_over_pi=omega_t,
        cs_ulink=rec.c_s, c_plus=rec.c_plus, c_minus=rec.c_minus,
        delta_s=rec.delta_s, delta_cv=rec.delta_cv,
        grid_R=rec.grid_R, grid_N=rec.grid_N,
    )


def _lr_line_worker(job):
    cfg, (m2b, ga), omega_t, ky = job
    params = _point_params(cfg, m2b, ga)
    protocol = dynamics.default_protocol(
        params,
        ky,
        omega_t,
        steps=cfg.protocol.steps or None,
        meas_count=cfg.protocol.meas_count or None,
    )
    line = dynamics.berry_curvature_lr(params, protocol, cfg.reference_mode, cfg.gap_floor)
    return (line.ky, line.kx, line.f_plus, line.f_minus)


def _point_tag(m2b: float, ga: float, omega_t: float) -> str:
    return f"m2b{m2b:+g}_ga{ga:g}_ot{omega_t:g}".replace(".", "p")


def _curvature_rows(cmap: dynamics.CurvatureMap) -> list[dict]:
    rows = []
    for line in sorted(cmap.lines, key=lambda ln: ln.ky):
        for i in range(len(line.kx)):
            rows.append(
                {
                    "kx": float(line.kx[i]),
                    "ky": float(line.ky),
                    "f_plus": float(line.f_plus[i]),
                    "f_minus": float(line.f_minus[i]),
                    "f_s": float(line.f_s[i]),
                }
            )
    return rows


def cmd_ulink(cfg: RunConfig, plot: bool = False) -> list[SweepRecord]:
    points = _sweep_points(cfg)
    omega_t = _omega_ts(cfg)[0]
    jobs = [(cfg, pt, omega_t, i) for i, pt in enumerate(points)]
    records = _run_jobs(_ulink_worker, jobs, cfg.workers)
    _emit_sweep(cfg, records, plot)
    return records


def cmd_lr(cfg: RunConfig, plot: bool = False, with_ulink: bool = False) -> list[SweepRecord]:
    os.makedirs(cfg.output_path, exist_ok=True)
    points = _sweep_points(cfg)
    records: list[SweepRecord] = []
    for omega_t in _omega_ts(cfg):
        jobs = [
            (cfg, pt, omega_t, float(ky))
            for pt in points
            for ky in dynamics.ky_line_set(cfg.protocol.ky_lines)
        ]
        results = _run_jobs(_lr_line_worker, jobs, cfg.workers)
        per_point = len(dynamics.ky_line_set(cfg.protocol.ky_lines))
        for p_idx, pt in enumerate(points):
            chunk = results[p_idx * per_point:(p_idx + 1) * per_point]
            lines = [
                dynamics.CurvatureLine(ky=ky, kx=kx, f_plus=fp, f_minus=fm)
                for (ky, kx, fp, fm) in chunk
            ]
            cmap = dynamics.CurvatureMap(
                lines=lines, omega_t_over_pi=omega_t, reference_mode=cfg.reference_mode
            )
            cs_lr, _, _ = dynamics.integrate_curvature(cmap)
            rec = SweepRecord(
                m_over_2b=pt[0], g_over_a=pt[1], omega_t_over_pi=omega_t, cs_lr=cs_lr
            )
            if with_ulink:
                base = _ulink_worker((cfg, pt, omega_t, p_idx))
                base.cs_lr = cs_lr
                rec = base
            records.append(rec)
            tag = _point_tag(pt[0], pt[1], omega_t)
            write_csv(
                _curvature_rows(cmap),
                ("kx", "ky", "f_plus", "f_minus", "f_s"),
                os.path.join(cfg.output_path, f"curvature_{tag}.csv"),
            )
            if plot:
                from .plots import plot_curvature_map

                plot_curvature_map(
                    cmap, os.path.join(cfg.output_path, f"curvature_{tag}.png")
                )
    _emit_sweep(cfg, records, plot)
    return records


def cmd_sweep(cfg: RunConfig, plot: bool = True) -> list[SweepRecord]:
    """U-link plus linear response at every sweep point."""
    return cmd_lr(cfg, plot=plot, with_ulink=True)


def _emit_sweep(cfg: RunConfig, records: list[SweepRecord], plot: bool) -> None:
    os.makedirs(cfg.output_path, exist_ok=True)
    write_sweep_csv(records, os.path.join(cfg.output_path, "sweep.csv"))
    write_json(
        sweep_summary(records, _config_echo(cfg)),
        os.path.join(cfg.output_path, "summary.json"),
    )
    if plot:
        from .plots import plot_convergence, plot_phase_diagram

        ok = [r for r in records if r.status == "ok"]
        if ok:
            plot_phase_diagram(ok, os.path.join(cfg.output_path, "phase_diagram.png"))
            if len({r.omega_t_over_pi for r in ok}) > 1:
                plot_convergence(ok, os.path.join(cfg.output_path, "convergence.png"))


def cmd_tomography(cfg: RunConfig, plot: bool = False, ky: float = 0.0) -> float:
    """Reconstructed versus direct Bloch components along one sweep line.

    Returns the maximum residual; writes tomography.csv with a footer row
    carrying it.
    """
    os.makedirs(cfg.output_path, exist_ok=True)
    params = cfg.model
    omega_t = _omega_ts(cfg)[0]
    protocol = dynamics.default_protocol(
        params,
        ky,
        omega_t,
        steps=cfg.protocol.steps or None,
        meas_count=cfg.protocol.meas_count or None,
    )
    psi0 = dynamics.prepare_initial_state(params, ky, cfg.gap_floor)
    times, snaps = dynamics.propagate(params, protocol, psi0)

    rows: list[dict] = []
    max_residual = 0.0
    for t, psi in zip(times, snaps):
        phi0 = tomography.frame_angle(params, protocol, float(t))
        lab = tomography.derotate_state(psi, phi0)
        measured = tomography.reconstruct_bloch(lab)
        reference = tomography.pipeline_reference_from_state(psi)
        for tau in (1, -1):
            rotated = tomography.frame_rotation(measured[tau], phi0)
            ref = reference[tau]
            residual = float(np.max(np.abs(np.array(rotated) - np.array(ref))))
            max_residual = max(max_residual, residual)
            direct = dynamics.bloch_expectations(dynamics.project_pseudospin(psi, tau))
            rows.append(
                {
                    "t": float(t), "tau": tau,
                    "sx_direct": direct[0], "sy_direct": direct[1], "sz_direct": direct[2],
                    "sx_pipeline": rotated[0], "sy_pipeline": rotated[1], "sz_pipeline": rotated[2],
                    "residual": residual,
                }
            )
    footer = {col: None for col in TOMOGRAPHY_COLUMNS}
    footer["tau"] = "max_residual"
    footer["residual"] = max_residual
    write_csv(rows + [footer], TOMOGRAPHY_COLUMNS, os.path.join(cfg.output_path, "tomography.csv"))
    write_json(
        {
            "max_residual": max_residual,
            "ky": ky,
            "omega_t_over_pi": omega_t,
            "initial_state_parameters": dynamics.initial_state_parameters(psi0),
            "config": _config_echo(cfg),
        },
        os.path.join(cfg.output_path, "tomography.json"),
    )
    if plot:
        from .plots import plot_tomography

        plot_rows = rows
        note = ""
        if cfg.smooth_window > 1:
            plot_rows = _smoothed_rows(rows, cfg.smooth_window)
            note = f"boxcar window {cfg.smooth_window}"
        plot_tomography(plot_rows, os.path.join(cfg.output_path, "tomography.png"), note)
    return max_residual


def _smoothed_rows(rows: list[dict], window: int) -> list[dict]:
    out = []
    for tau in (1, -1):
        sel = [r for r in rows if r["tau"] == tau]
        smoothed = {
            key: dynamics.boxcar_smooth(np.array([r[key] for r in sel]), window)
            for key in ("sx_direct", "sy_direct", "sz_direct",
                        "sx_pipeline", "sy_pipeline", "sz_pipeline")
        }
        for i, r in enumerate(sel):
            row = dict(r)
            for key, arr in smoothed.items():
                row[key] = float(arr[i])
            out.append(row)
    return out


def cmd_frames_check(cfg: RunConfig) -> bool:
    """Lab-frame versus rotating-frame equivalence report; True iff passed."""
    os.makedirs(cfg.output_path, exist_ok=True)
    k = Momentum(0.7, -1.1)
    result = verify_frame_equivalence(cfg.model, k)
    report = {
        "passed": result.passed,
        "max_population_deviation": result.max_population_deviation,
        "max_bhz_population_deviation": result.max_bhz_population_deviation,
        "tolerance": 1e-6,
        "total_time": result.total_time,
        "steps": result.steps,
        "carrier_scale": result.carrier_scale,
        "probe_momentum": {"kx": k.kx, "ky": k.ky},
        "config": _config_echo(cfg),
    }
    write_json(report, os.path.join(cfg.output_path, "frames_check.json"))
    status = "PASS" if result.passed else "FAIL"
    print(
        f"frames-check: {status} "
        f"(max population deviation {result.max_population_deviation:.3e}, "
        f"tolerance 1e-06)"
    )
    return result.passed


def _config_echo(cfg: RunConfig) -> dict:
    return {
        "model": {"A": cfg.model.A, "B": cfg.model.B, "M": cfg.model.M, "g": cfg.model.g},
        "grid": {"R": cfg.grid.R, "N": cfg.grid.N},
        "protocol": {
            "omega_t_over_pi": cfg.protocol.omega_t_over_pi,
            "steps": cfg.protocol.steps,
            "meas_count": cfg.protocol.meas_count,
            "ky_lines": cfg.protocol.ky_lines,
        },
        "reference_mode": cfg.reference_mode,
        "gap_floor": cfg.gap_floor,
        "workers": cfg.workers,
        "seed": cfg.seed,
        "gauge_scramble": cfg.gauge_scramble,
    }


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bhzsim",
        description="Spin Chern numbers of the simulated BHZ model: "
        "U-link invariants, linear-response curvature, tomography pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("ulink", "U-link invariants over the sweep grid"),
        ("lr", "linear-response spin Chern numbers and curvature maps"),
        ("tomography", "reconstructed vs direct Bloch components on one line"),
        ("frames-check", "lab-frame vs rotating-frame equivalence check"),
        ("sweep", "ulink + lr combined"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="dotted-key config file")
        p.add_argument("--output", help="output directory (overrides config)")
        p.add_argument("--workers", type=int, help="worker processes (overrides config)")
        p.add_argument("--seed", type=int, help="gauge-scrambling seed (overrides config)")
        if name == "sweep":
            p.add_argument("--no-plot", dest="plot", action="store_false", default=True,
                           help="skip figure rendering")
        elif name in ("ulink", "lr", "tomography"):
            p.add_argument("--plot", action="store_true", default=False,
                           help="render figures alongside the CSV output")
        if name == "tomography":
            p.add_argument("--ky", type=float, default=0.0, help="sweep line ky (default 0)")
    return parser


def _load(args) -> RunConfig:
    if args.config:
        cfg = load_config(args.config)
    elif args.output:
        cfg = default_config(args.output)
    else:
        raise ConfigError("either --config or --output is required")
    updates = {}
    if args.output:
        updates["output_path"] = args.output
    if args.workers is not None:
        updates["workers"] = args.workers
    if args.seed is not None:
        updates["seed"] = args.seed
    if updates:
        cfg = replace(cfg, **updates)
        validate_config(cfg)
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load(args)
        if args.command == "ulink":
            cmd_ulink(cfg, plot=args.plot)
        elif args.command == "lr":
            cmd_lr(cfg, plot=args.plot)
        elif args.command == "sweep":
            cmd_sweep(cfg, plot=args.plot)
        elif args.command == "tomography":
            cmd_tomography(cfg, plot=args.plot, ky=args.ky)
        elif args.command == "frames-check":
            if not cmd_frames_check(cfg):
                return 3
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalPreconditionError as exc:
        print(f"numerical precondition failed: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())

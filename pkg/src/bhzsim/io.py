"""Sweep records and deterministic CSV / JSON emission.

CSV contract: header row, '.' decimal separator, '\\n' line endings,
floats at 17 significant digits (value-preserving roundtrip), empty cell
for missing values.  Row order is lexicographic on
(m_over_2b, g_over_a, omega_t_over_pi) regardless of worker count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

PHYSICAL_UNITS_NOTE = {
    "A": "2*pi*24 kHz",
    "B": "2*pi*24 kHz",
    "T": "500 us at Omega T = 24 pi",
    "note": "reduced units: A = 1 sets the energy scale, time in 1/A",
}

SWEEP_COLUMNS = (
    "m_over_2b",
    "g_over_a",
    "omega_t_over_pi",
    "status",
    "cs_ulink",
    "c_plus",
    "c_minus",
    "cs_lr",
    "delta_s",
    "delta_cv",
    "grid_R",
    "grid_N",
)


@dataclass
class SweepRecord:
    """One parameter point of a sweep; None marks not-computed fields."""

    m_over_2b: float
    g_over_a: float
    omega_t_over_pi: float
    status: str = "ok"
    cs_ulink: float | None = None
    c_plus: float | None = None
    c_minus: float | None = None
    cs_lr: float | None = None
    delta_s: float | None = None
    delta_cv: float | None = None
    grid_R: int | None = None
    grid_N: int | None = None

    @property
    def key(self) -> tuple[float, float, float]:
        return (self.m_over_2b, self.g_over_a, self.omega_t_over_pi)

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in SWEEP_COLUMNS}


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def parse_cell(text: str):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def write_csv(rows: list[dict], columns: tuple[str, ...], path: str) -> None:
    """Write rows (dicts) under a fixed column order."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(format_cell(row.get(col)) for col in columns))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path: str) -> list[dict]:
    """Read a CSV written by write_csv; numeric cells are parsed back."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip() != ""]
    header = lines[0].split(",")
    return [dict(zip(header, map(parse_cell, line.split(",")))) for line in lines[1:]]


def write_sweep_csv(records: list[SweepRecord], path: str) -> None:
    rows = [rec.as_dict() for rec in sorted(records, key=lambda r: r.key)]
    write_csv(rows, SWEEP_COLUMNS, path)


def write_json(summary: dict, path: str) -> None:
    """Deterministic JSON (sorted keys, fixed float formatting via repr)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=_jsonify)
        fh.write("\n")


def _jsonify(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj)!r}")


def sweep_summary(records: list[SweepRecord], config_echo: dict) -> dict:
    return {
        "records": [rec.as_dict() for rec in sorted(records, key=lambda r: r.key)],
        "physical_units": PHYSICAL_UNITS_NOTE,
        "config": config_echo,
    }

import numpy as np
import pytest

from bhzsim.config import default_config, load_config, parse_config_text
from bhzsim.errors import ConfigError
from bhzsim.io import (
    SweepRecord,
    format_cell,
    parse_cell,
    read_csv,

    write_json,
    write_sweep_csv,
)

MINIMAL = """
model.B = 1.0
model.M = 2.0
output_path = {out}
"""


def test_minimal_config_defaults(tmp_path):
    cfg = parse_config_text(MINIMAL.format(out=tmp_path))
    assert cfg.model.A == 1.0
    assert cfg.model.g == 0.0
    assert cfg.grid.R == 60 and cfg.grid.N == 60
    assert cfg.protocol.omega_t_over_pi == 24.0
    assert cfg.protocol.ky_lines == 11
    assert cfg.reference_mode == "adiabatic"
    assert cfg.gap_floor == 1e-6
    assert cfg.workers == 1
    assert cfg.sweep.m_over_2b_values == ()


def test_unknown_key_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config_text("model.B = 1\nmodel.M = 2\nmodel.Q = 3\noutput_path = x\n")
    assert "model.Q" in str(err.value) and "line 3" in str(err.value)


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config_text("model.B = 1\nmodel.B = 2\nmodel.M = 2\noutput_path = x\n")
    assert "duplicate" in str(err.value) and "model.B" in str(err.value)


def test_missing_required_enumerated():
    with pytest.raises(ConfigError) as err:
        parse_config_text("model.A = 1.0\n")
    msg = str(err.value)
    assert "model.B" in msg and "model.M" in msg and "output_path" in msg


def test_bad_value_diagnostics():
    with pytest.raises(ConfigError) as err:
        parse_config_text("model.B = abc\nmodel.M = 2\noutput_path = x\n")
    assert "line 1" in str(err.value)


def test_list_values_and_comments(tmp_path):
    text = """
    # sweep axes
    model.B = 1.0
    model.M = 2.0
    sweep.m_over_2b_values = -1, -0.5, 0.5, 1   # phase diagram
    sweep.g_over_a_values = 0, 0.15
    sweep.omega_t_over_pi_values = 12, 24
    output_path = {out}
    """.format(out=tmp_path)
    cfg = parse_config_text(text)
    assert cfg.sweep.m_over_2b_values == (-1.0, -0.5, 0.5, 1.0)
    assert cfg.sweep.g_over_a_values == (0.0, 0.15)
    assert cfg.sweep.omega_t_over_pi_values == (12.0, 24.0)


def test_invalid_semantics_rejected(tmp_path):
    with pytest.raises(ConfigError):
        parse_config_text(MINIMAL.format(out=tmp_path) + "workers = 0\n")
    with pytest.raises(ConfigError):
        parse_config_text(MINIMAL.format(out=tmp_path) + "reference_mode = magic\n")
    with pytest.raises(ConfigError):
        parse_config_text(MINIMAL.format(out=tmp_path) + "grid.R = 4\n")
    with pytest.raises(ConfigError):
        parse_config_text("model.B = 1\nmodel.M = 2\noutput_path =\n")


def test_load_config_file(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text(MINIMAL.format(out=tmp_path / "out"))
    cfg = load_config(str(path))
    assert cfg.model.M == 2.0
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.conf"))


def test_default_config_requires_output():
    with pytest.raises(ConfigError):
        default_config("")


def test_cell_roundtrip(rng):
    values = list(rng.normal(size=50)) + [1e-300, 1e300, -0.0, 2.0 / 3.0, np.pi]
    for v in values:
        assert parse_cell(format_cell(float(v))) == float(v)
    assert format_cell(None) == ""
    assert parse_cell("") is None
    assert format_cell(7) == "7"


def test_csv_roundtrip_bit_exact(tmp_path, rng):
    records = [
        SweepRecord(
            m_over_2b=float(m),
            g_over_a=float(g),
            omega_t_over_pi=24.0,
            cs_ulink=float(rng.normal()),
            c_plus=float(rng.normal()),
            c_minus=float(rng.normal()),
            delta_s=float(rng.uniform()),
            delta_cv=float(rng.uniform()),
            grid_R=60,
            grid_N=60,
        )
        for m in (-1.0, 0.5)
        for g in (0.0, 0.15)
    ]
    path = tmp_path / "sweep.csv"
    write_sweep_csv(records, str(path))
    rows = read_csv(str(path))
    by_key = {(r["m_over_2b"], r["g_over_a"]): r for r in rows}
    for rec in records:
        row = by_key[(rec.m_over_2b, rec.g_over_a)]
        assert row["cs_ulink"] == rec.cs_ulink
        assert row["delta_cv"] == rec.delta_cv
        assert row["cs_lr"] is None
        assert row["status"] == "ok"
    # newline discipline
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.decode().count("\n") == len(records) + 1


def test_sweep_rows_sorted_deterministically(tmp_path):
    records = [
        SweepRecord(m_over_2b=m, g_over_a=g, omega_t_over_pi=o)
        for m, g, o in ((1.0, 0.15, 24.0), (-1.0, 0.0, 24.0), (1.0, 0.0, 12.0), (1.0, 0.0, 24.0))
    ]
    path_a = tmp_path / "a.csv"
    write_sweep_csv(records, str(path_a))
    path_b = tmp_path / "b.csv"
    write_sweep_csv(list(reversed(records)), str(path_b))
    assert path_a.read_bytes() == path_b.read_bytes()
    rows = read_csv(str(path_a))
    keys = [(r["m_over_2b"], r["g_over_a"], r["omega_t_over_pi"]) for r in rows]
    assert keys == sorted(keys)


def test_write_json_deterministic(tmp_path):
    payload = {"b": 1.5, "a": np.float64(2.25), "arr": np.arange(3)}
    p1, p2 = tmp_path / "1.json", tmp_path / "2.json"
    write_json(payload, str(p1))
    write_json({"arr": np.arange(3), "a": np.float64(2.25), "b": 1.5}, str(p2))
    assert p1.read_bytes() == p2.read_bytes()

"""Run configuration: dotted-key text files with typed validation.

Format: one ``key = value`` per line, ``#`` comments, dotted key paths
(``model.M``, ``protocol.steps``, ...).  Lists are comma separated.
Unknown and duplicate keys are rejected with line numbers; missing
required keys are enumerated in a single error.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .dynamics import REFERENCE_MODES
from .errors import ConfigError
from .model import ModelParams


@dataclass(frozen=True)
class GridConfig:
    R: int = 60
    N: int = 60


@dataclass(frozen=True)
class ProtocolConfig:
    """Sweep protocol knobs; steps/meas_count 0 means scale with Omega T."""

    omega_t_over_pi: float = 24.0
    steps: int = 0
    meas_count: int = 0
    ky_lines: int = 11


@dataclass(frozen=True)
class SweepAxes:
    m_over_2b_values: tuple[float, ...] = ()
    g_over_a_values: tuple[float, ...] = ()
    omega_t_over_pi_values: tuple[float, ...] = ()


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams = field(default_factory=ModelParams)
    grid: GridConfig = field(default_factory=GridConfig)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    reference_mode: str = "adiabatic"
    gap_floor: float = 1e-6
    sweep: SweepAxes = field(default_factory=SweepAxes)
    output_path: str = ""
    workers: int = 1
    seed: int = 0
    gauge_scramble: bool = False
    smooth_window: int = 0


# key -> (type tag, required).  Type tags: float, int, bool, str, floats.
_SCHEMA: dict[str, tuple[str, bool]] = {
    "model.A": ("float", False),
    "model.B": ("float", True),
    "model.M": ("float", True),
    "model.g": ("float", False),
    "grid.R": ("int", False),
    "grid.N": ("int", False),
    "protocol.omega_t_over_pi": ("float", False),
    "protocol.steps": ("int", False),
    "protocol.meas_count": ("int", False),
    "protocol.ky_lines": ("int", False),
    "reference_mode": ("str", False),
    "gap_floor": ("float", False),
    "sweep.m_over_2b_values": ("floats", False),
    "sweep.g_over_a_values": ("floats", False),
    "sweep.omega_t_over_pi_values": ("floats", False),
    "output_path": ("str", True),
    "workers": ("int", False),
    "seed": ("int", False),
    "gauge_scramble": ("bool", False),
    "smooth_window": ("int", False),
}


def _coerce(key: str, raw: str, lineno: int):
    kind = _SCHEMA[key][0]
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "floats":
            if not raw.strip():
                return ()
            return tuple(float(tok) for tok in raw.split(","))
        return raw
    except ValueError:
        raise ConfigError(
            f"line {lineno}: cannot parse value {raw!r} for key {key!r} as {kind}"
        ) from None


def parse_config_text(text: str, overrides: dict[str, str] | None = None) -> RunConfig:
    """Parse config text (plus optional CLI overrides) into a RunConfig."""
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _coerce(key, raw, lineno)

    missing = [k for k, (_, req) in _SCHEMA.items() if req and k not in values]
    if overrides:
        for key, raw in overrides.items():
            if key not in _SCHEMA:
                raise ConfigError(f"override: unknown key {key!r}")
            values[key] = _coerce(key, raw, 0)
        missing = [k for k in missing if k not in values]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(sorted(missing)))

    return _build(values)


def _build(values: dict[str, object]) -> RunConfig:
    def get(key, default):
        return values.get(key, default)

    try:
        model = ModelParams(
            A=get("model.A", 1.0),
            B=get("model.B", 1.0),
            M=get("model.M", 2.0),
            g=get("model.g", 0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from exc

    cfg = RunConfig(
        model=model,
        grid=GridConfig(R=get("grid.R", 60), N=get("grid.N", 60)),
        protocol=ProtocolConfig(
            omega_t_over_pi=get("protocol.omega_t_over_pi", 24.0),
            steps=get("protocol.steps", 0),
            meas_count=get("protocol.meas_count", 0),
            ky_lines=get("protocol.ky_lines", 11),
        ),
        reference_mode=get("reference_mode", "adiabatic"),
        gap_floor=get("gap_floor", 1e-6),
        sweep=SweepAxes(
            m_over_2b_values=tuple(get("sweep.m_over_2b_values", ())),
            g_over_a_values=tuple(get("sweep.g_over_a_values", ())),
            omega_t_over_pi_values=tuple(get("sweep.omega_t_over_pi_values", ())),
        ),
        output_path=get("output_path", ""),
        workers=get("workers", 1),
        seed=get("seed", 0),
        gauge_scramble=get("gauge_scramble", False),
        smooth_window=get("smooth_window", 0),
    )
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    if cfg.protocol.omega_t_over_pi <= 0:
        raise ConfigError("protocol.omega_t_over_pi must be positive")
    if cfg.protocol.ky_lines < 2:
        raise ConfigError("protocol.ky_lines must be at least 2")
    if cfg.reference_mode not in REFERENCE_MODES:
        raise ConfigError(
            f"reference_mode {cfg.reference_mode!r} not one of {REFERENCE_MODES}"
        )
    if not cfg.output_path:
        raise ConfigError("output_path must be set")
    if not (0.0 < cfg.gap_floor < 1.0):
        raise ConfigError("gap_floor must be in (0, 1)")
    if cfg.grid.R < 8 or cfg.grid.N < 8:
        raise ConfigError("grid.R and grid.N must be at least 8")
    if cfg.protocol.steps < 0 or cfg.protocol.meas_count < 0:
        raise ConfigError("protocol.steps and protocol.meas_count must be >= 0")
    if cfg.smooth_window < 0:
        raise ConfigError("smooth_window must be >= 0")


def load_config(path: str, overrides: dict[str, str] | None = None) -> RunConfig:
    """Load a RunConfig from a dotted-key text file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config_text(text, overrides)


def default_config(output_path: str, **overrides) -> RunConfig:
    """Built-in defaults (M = 2B topological point) with an output path."""
    cfg = replace(RunConfig(), output_path=output_path, **overrides)
    validate_config(cfg)
    return cfg

"""Run configuration: flat key-value text files with dotted section names.

The format is a plain ``key = value`` line per entry (``#`` starts a
comment), at most two dotted levels, no nesting. Unknown keys are
rejected so typos fail fast with exit code 2 rather than silently running
a default.
"""

import hashlib
from dataclasses import dataclass, field, replace

from .sensors import SensorConfig


class ConfigError(ValueError):
    """Malformed configuration text or invalid field values."""


@dataclass(frozen=True)
class CaseConfig:
    case: str = "sedov"
    nx: int = 32
    ny: int = 32
    x0: float = -1.0
    x1: float = 1.0
    y0: float = -1.0
    y1: float = 1.0
    order: int = 3
    dt: float = 5e-4
    steps: int = 3000
    stabilization: str = "blending"  # blending | viscosity | none
    mu0: float = 0.1
    eps_star: float = 1e-13
    sensor: SensorConfig = field(default_factory=SensorConfig)
    output_every: int = 500
    output_dir: str = "out"
    seed: int = 1234
    threads: int = 1

    def __post_init__(self):
        if self.stabilization not in ("blending", "viscosity", "none"):
            raise ConfigError(f"unknown stabilization {self.stabilization!r}")
        if self.dt <= 0.0:
            raise ConfigError("dt must be positive")
        if self.steps < 0:
            raise ConfigError("steps must be non-negative")
        if self.output_every < 1:
            raise ConfigError("output.every must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def to_mapping(self) -> dict:
        s = self.sensor
        return {
            "case": self.case,
            "mesh.nx": str(self.nx),
            "mesh.ny": str(self.ny),
            "mesh.x0": repr(self.x0),
            "mesh.x1": repr(self.x1),
            "mesh.y0": repr(self.y0),
            "mesh.y1": repr(self.y1),
            "order": str(self.order),
            "dt": repr(self.dt),
            "steps": str(self.steps),
            "stabilization": self.stabilization,
            "mu0": repr(self.mu0),
            "alpha_max": repr(s.alpha_max),
            "eps_star": repr(self.eps_star),
            "sensor.kind": s.kind,
            "sensor.features": s.features,
            "sensor.clusters": str(s.clusters),
            "sensor.s0": repr(s.s0),
            "sensor.ds": repr(s.ds),
            "sensor.interval": str(s.interval),
            "sensor.modal_variable": s.modal_variable,
            "sensor.integral_variable": s.integral_variable,
            "output.every": str(self.output_every),
            "output.dir": self.output_dir,
            "seed": str(self.seed),
            "threads": str(self.threads),
        }

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.to_mapping().items())

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:12]


def parse_config_text(text: str) -> dict:
    """Key-value pairs from config text; duplicate keys are an error."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or key.count(".") > 1:
            raise ConfigError(f"line {lineno}: bad key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _convert(key, value, kind):
    try:
        return kind(value)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: cannot parse {value!r}") from exc


def config_from_mapping(mapping: dict, defaults: CaseConfig = None) -> CaseConfig:
    """Build a CaseConfig from parsed keys, on top of per-case defaults."""
    mapping = dict(mapping)
    case = mapping.pop("case", defaults.case if defaults else "sedov")
    if defaults is None:
        from .cases import preset_config  # late import, cases depends on config
        defaults = preset_config(case)
    cfg_kwargs = {"case": case}
    sensor_kwargs = {}

    plain = {
        "mesh.nx": ("nx", int), "mesh.ny": ("ny", int),
        "mesh.x0": ("x0", float), "mesh.x1": ("x1", float),
        "mesh.y0": ("y0", float), "mesh.y1": ("y1", float),
        "order": ("order", int), "dt": ("dt", float), "steps": ("steps", int),
        "stabilization": ("stabilization", str), "mu0": ("mu0", float),
        "eps_star": ("eps_star", float),
        "output.every": ("output_every", int), "output.dir": ("output_dir", str),
        "seed": ("seed", int), "threads": ("threads", int),
    }
    sensor_keys = {
        "sensor.kind": ("kind", str), "sensor.features": ("features", str),
        "sensor.clusters": ("clusters", int), "sensor.s0": ("s0", float),
        "sensor.ds": ("ds", float), "sensor.interval": ("interval", int),
        "alpha_max": ("alpha_max", float),
        "sensor.modal_variable": ("modal_variable", str),
        "sensor.integral_variable": ("integral_variable", str),
    }
    for key, value in mapping.items():
        if key in plain:
            name, kind = plain[key]
            cfg_kwargs[name] = _convert(key, value, kind)
        elif key in sensor_keys:
            name, kind = sensor_keys[key]
            sensor_kwargs[name] = _convert(key, value, kind)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    try:
        sensor = replace(defaults.sensor, **sensor_kwargs)
        return replace(defaults, sensor=sensor, **cfg_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path, overrides: dict = None) -> CaseConfig:
    with open(path, encoding="utf-8") as handle:
        mapping = parse_config_text(handle.read())
    mapping.update(overrides or {})
    return config_from_mapping(mapping)

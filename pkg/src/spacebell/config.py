"""Sweep configuration: a line-oriented ``key = value`` format with ``#`` comments."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .spdc import SPDCParams


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class Model(enum.Enum):
    SPIN_SPACE = "spin_space"
    SPDC = "spdc"
    MONTECARLO = "montecarlo"


class Spacing(enum.Enum):
    LINEAR = "linear"
    LOG = "log"


class Geometry(enum.Enum):
    SYMMETRIC = "symmetric"  # both detectors recede from the source
    ONE_SIDED = "one_sided"  # detector A stays put, B recedes


class GPolicy(enum.Enum):
    OVERLAP = "overlap"  # g from the Gaussian packets and receding regions
    INVERSE_Z = "inverse_z"  # g = min(1, z_min / z)
    CONSTANT = "constant"


# (a, a', b, b') x-z plane angles for spin models, (theta_s, theta_s', theta_i, theta_i') for spdc
DEFAULT_ANGLES = {
    Model.SPIN_SPACE: (0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4),
    Model.MONTECARLO: (0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4),
    Model.SPDC: (0.0, math.pi / 4, math.pi / 8, 3 * math.pi / 8),
}


@dataclass(frozen=True)
class SweepConfig:
    model: Model = Model.SPDC
    z_min: float = 1e4
    z_max: float = 1e8
    points: int = 50
    spacing: Spacing = Spacing.LOG
    angles: tuple[float, float, float, float] | None = None
    spdc: SPDCParams = field(default_factory=SPDCParams)
    packet_width: float = 1000.0
    region_half_width: float = 5000.0
    geometry: Geometry = Geometry.SYMMETRIC
    pairs: int = 100_000
    g_policy: GPolicy = GPolicy.OVERLAP
    g: float = 1.0
    seed: int = 0
    workers: int = 1
    out_csv: Path = Path("sweep.csv")
    out_svg: Path = Path("sweep.svg")

    @property
    def setting_angles(self) -> tuple[float, float, float, float]:
        return self.angles if self.angles is not None else DEFAULT_ANGLES[self.model]


_SPDC_KEYS = {f.name for f in fields(SPDCParams)}


def _choice(enum_cls):
    def parse(text: str):
        try:
            return enum_cls(text)
        except ValueError:
            options = ", ".join(m.value for m in enum_cls)
            raise ValueError(f"unknown variant {text!r} (expected one of: {options})") from None

    return parse


def _float(text: str) -> float:
    v = float(text)
    if math.isnan(v):
        raise ValueError("NaN is not allowed")
    return v


def _int(text: str) -> int:
    # exact path first so 64-bit seeds survive; float only for forms like 1e5
    try:
        return int(text, 10)
    except ValueError:
        pass
    v = float(text)
    if not v.is_integer():
        raise ValueError(f"expected an integer, got {text!r}")
    return int(v)


def _angles(text: str) -> tuple[float, float, float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise ValueError(f"expected 4 comma-separated angles, got {len(parts)}")
    return tuple(_float(p) for p in parts)  # type: ignore[return-value]


_PARSERS = {
    "model": _choice(Model),
    "z_min": _float,
    "z_max": _float,
    "points": _int,
    "spacing": _choice(Spacing),
    "angles": _angles,
    "packet_width": _float,
    "region_half_width": _float,
    "geometry": _choice(Geometry),
    "pairs": _int,
    "g_policy": _choice(GPolicy),
    "g": _float,
    "seed": _int,
    "workers": _int,
    "out_csv": Path,
    "out_svg": Path,
    **{k: _float for k in _SPDC_KEYS},
}


def parse_config(text: str) -> SweepConfig:
    """Parse and validate a sweep config; unset keys keep their defaults."""
    values: dict[str, object] = {}
    spdc_values: dict[str, float] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, value = (s.strip() for s in line.partition("="))
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in lines:
            raise ConfigError(f"duplicate key {key!r} (first set on line {lines[key]})", lineno)
        if not value:
            raise ConfigError(f"missing value for {key!r}", lineno)
        try:
            parsed = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lineno) from None
        lines[key] = lineno
        (spdc_values if key in _SPDC_KEYS else values)[key] = parsed

    try:
        spdc = SPDCParams(**spdc_values)
    except ValueError as exc:
        bad = next((k for k in spdc_values if k in str(exc)), None)
        raise ConfigError(str(exc), lines.get(bad)) from None
    cfg = replace(SweepConfig(), spdc=spdc, **values)
    _validate(cfg, lines)
    return cfg


def _validate(cfg: SweepConfig, lines: dict[str, int]) -> None:
    def fail(key: str, msg: str):
        raise ConfigError(msg, lines.get(key))

    if cfg.points < 2:
        fail("points", f"points must be >= 2, got {cfg.points}")
    if not math.isfinite(cfg.z_max):
        fail("z_max", "z_max must be finite")
    if cfg.z_min < 0:
        fail("z_min", f"z_min must be >= 0, got {cfg.z_min}")
    if not cfg.z_min < cfg.z_max:
        fail("z_max" if "z_max" in lines else "z_min", f"need z_min < z_max, got {cfg.z_min} >= {cfg.z_max}")
    if cfg.z_min == 0 and (cfg.spacing is Spacing.LOG or cfg.model is not Model.SPIN_SPACE):
        fail("z_min", "z_min must be > 0 for log spacing and for the spdc and montecarlo models")
    if not cfg.packet_width > 0:
        fail("packet_width", f"packet_width must be > 0, got {cfg.packet_width}")
    if not cfg.region_half_width > 0:
        fail("region_half_width", f"region_half_width must be > 0, got {cfg.region_half_width}")
    if cfg.pairs <= 0:
        fail("pairs", f"pairs must be > 0, got {cfg.pairs}")
    if not 0.0 <= cfg.g <= 1.0:
        fail("g", f"g must lie in [0, 1], got {cfg.g}")
    if not 0 <= cfg.seed < 2**64:
        fail("seed", f"seed must be an unsigned 64-bit integer, got {cfg.seed}")
    if cfg.workers < 1:
        fail("workers", f"workers must be >= 1, got {cfg.workers}")


def load_config(path: str | Path) -> SweepConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))

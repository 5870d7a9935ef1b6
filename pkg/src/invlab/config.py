"""Line-oriented run configuration: `key = value`, `#` comments, dotted keys."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .dynamics import ModelKind

__all__ = ["RunConfig", "ConfigError", "parse_config", "parse_entries", "build_config", "config_echo"]


class ConfigError(ValueError):
    pass


_MODEL_NAMES = {kind.value: kind for kind in ModelKind}

# key -> (type tag, default); None default means required
_SCHEMA = {
    "model": ("model", None),
    "ic": ("str", None),
    "ic_omega": ("str", ""),
    "nx": ("int", 256),
    "ny": ("int", 256),
    "lx": ("float", None),  # optional, defaults to 2*pi downstream
    "ly": ("float", None),
    "dt": ("float", 0.0),  # 0 means CFL-chosen
    "cfl": ("float", 0.4),
    "t_end": ("float", None),
    "dealias": ("bool", True),
    "project_symmetry": ("bool", False),
    "hyperviscosity": ("float", 0.0),
    "max_grad": ("float", 1e6),
    "output.dir": ("str", "out"),
    "output.snapshot_interval": ("float", 0.0),
    "output.series_interval": ("float", 0.01),
    "diagnostics": ("list", ()),
}

_REQUIRED = ("model", "ic", "t_end")
_OPTIONAL_FLOATS = ("lx", "ly")
_KNOWN_DIAGNOSTICS = ("conservation", "symmetry")


@dataclass
class RunConfig:
    model: ModelKind
    ic: str
    t_end: float
    ic_omega: str = ""
    nx: int = 256
    ny: int = 256
    lx: Optional[float] = None
    ly: Optional[float] = None
    dt: Optional[float] = None
    cfl: float = 0.4
    dealias: bool = True
    project_symmetry: bool = False
    hyperviscosity: float = 0.0
    max_grad: float = 1e6
    output_dir: str = "out"
    snapshot_interval: float = 0.0
    series_interval: float = 0.01
    diagnostics: tuple = ()

    def __post_init__(self) -> None:
        if self.t_end < 0:
            raise ConfigError(f"t_end must be nonnegative, got {self.t_end}")
        for name, n in (("nx", self.nx), ("ny", self.ny)):
            if n < 8 or n % 2 != 0:
                raise ConfigError(f"{name} must be even and >= 8, got {n}")
        if self.dt is not None and self.dt <= 0:
            raise ConfigError(f"dt must be positive when given, got {self.dt}")
        if not 0 < self.cfl <= 1:
            raise ConfigError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.hyperviscosity < 0 or self.max_grad <= 0:
            raise ConfigError("hyperviscosity must be >= 0 and max_grad > 0")
        if self.snapshot_interval < 0 or self.series_interval < 0:
            raise ConfigError("output intervals must be nonnegative")
        for name in self.diagnostics:
            if name not in _KNOWN_DIAGNOSTICS:
                raise ConfigError(
                    f"unknown diagnostic {name!r}; known: {', '.join(_KNOWN_DIAGNOSTICS)}"
                )


def parse_entries(text: str) -> list[tuple[str, str, int]]:
    """Raw (key, value, lineno) triples; rejects malformed and duplicate keys."""
    entries: list[tuple[str, str, int]] = []
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first set on line {seen[key]})")
        seen[key] = lineno
        entries.append((key, value, lineno))
    return entries


def _convert(key: str, value: str, lineno) -> object:
    tag = _SCHEMA[key][0]
    where = f"line {lineno}" if lineno is not None else "override"
    try:
        if tag == "int":
            return int(value)
        if tag == "float":
            return float(value)
        if tag == "bool":
            low = value.lower()
            if low in ("true", "yes", "1"):
                return True
            if low in ("false", "no", "0"):
                return False
            raise ValueError(value)
        if tag == "model":
            if value not in _MODEL_NAMES:
                raise ConfigError(
                    f"{where}: unknown model {value!r}; choose from {', '.join(sorted(_MODEL_NAMES))}"
                )
            return _MODEL_NAMES[value]
        if tag == "list":
            return tuple(item.strip() for item in value.split(",") if item.strip())
        return value
    except ConfigError:
        raise
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {value!r} as {tag} for key {key!r}") from None


def build_config(entries: list[tuple[str, str, Optional[int]]]) -> RunConfig:
    values: dict[str, object] = {}
    for key, value, lineno in entries:
        if key not in _SCHEMA:
            where = f"line {lineno}" if lineno is not None else "override"
            raise ConfigError(f"{where}: unknown key {key!r}")
        values[key] = _convert(key, value, lineno)
    for key in _REQUIRED:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")
    dt = values.get("dt", 0.0)
    return RunConfig(
        model=values["model"],
        ic=values["ic"],
        t_end=values["t_end"],
        ic_omega=values.get("ic_omega", ""),
        nx=values.get("nx", 256),
        ny=values.get("ny", 256),
        lx=values.get("lx"),
        ly=values.get("ly"),
        dt=None if dt in (0.0, None) else dt,
        cfl=values.get("cfl", 0.4),
        dealias=values.get("dealias", True),
        project_symmetry=values.get("project_symmetry", False),
        hyperviscosity=values.get("hyperviscosity", 0.0),
        max_grad=values.get("max_grad", 1e6),
        output_dir=values.get("output.dir", "out"),
        snapshot_interval=values.get("output.snapshot_interval", 0.0),
        series_interval=values.get("output.series_interval", 0.01),
        diagnostics=values.get("diagnostics", ()),
    )


def parse_config(text: str) -> RunConfig:
    """Parse and validate a config document; defaults fill unset keys."""
    return build_config(parse_entries(text))


def config_echo(cfg: RunConfig) -> str:
    """Canonical `key = value` rendering of a resolved config."""
    lines = [
        f"model = {cfg.model.value}",
        f"ic = {cfg.ic}",
    ]
    if cfg.ic_omega:
        lines.append(f"ic_omega = {cfg.ic_omega}")
    lines += [
        f"nx = {cfg.nx}",
        f"ny = {cfg.ny}",
    ]
    if cfg.lx is not None:
        lines.append(f"lx = {cfg.lx:.17g}")
    if cfg.ly is not None:
        lines.append(f"ly = {cfg.ly:.17g}")
    lines += [
        f"dt = {0.0 if cfg.dt is None else cfg.dt:.17g}",
        f"cfl = {cfg.cfl:.17g}",
        f"t_end = {cfg.t_end:.17g}",
        f"dealias = {str(cfg.dealias).lower()}",
        f"project_symmetry = {str(cfg.project_symmetry).lower()}",
        f"hyperviscosity = {cfg.hyperviscosity:.17g}",
        f"max_grad = {cfg.max_grad:.17g}",
        f"output.dir = {cfg.output_dir}",
        f"output.snapshot_interval = {cfg.snapshot_interval:.17g}",
        f"output.series_interval = {cfg.series_interval:.17g}",
    ]
    if cfg.diagnostics:
        lines.append(f"diagnostics = {', '.join(cfg.diagnostics)}")
    return "\n".join(lines) + "\n"

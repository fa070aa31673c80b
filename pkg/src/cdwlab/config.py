"""Configuration for cdwlab runs.

配置文件为 TOML（``key = value`` 每行一对、``#`` 注释的纯文本同样合法）。
顶层键是全局默认值，``[vacua]``、``[pairprod]`` 等表覆盖对应子命令。

优先级：命令行 > 子命令表 > 顶层键 > 内置默认值。
"""

from __future__ import annotations

import math
import os
import textwrap
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal, Mapping

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - Python <3.11 fallback
    import tomli as tomllib  # type: ignore

from .errors import ConfigError

__all__ = [
    "GridSpec",
    "RunConfig",
    "SUBCOMMANDS",
    "SUBCOMMAND_DEFAULTS",
    "GLOBAL_KEYS",
    "DEFAULT_CONFIG_TOML",
    "DEFAULT_OUTPUT",
    "ENV_VAR",
    "resolve_config_path",
    "load_config_data",
    "build_run_config",
    "write_default_config",
]

ENV_VAR = "CDWLAB_CONFIG"
DEFAULT_OUTPUT = "cdwlab_out"
GLOBAL_KEYS = ("output", "log_dir")
TWO_PI = 2.0 * math.pi

Scale = Literal["lin", "log"]


@dataclass(frozen=True, slots=True)
class GridSpec:
    """``min:max:count[:lin|log]`` sample grid."""

    lo: float
    hi: float
    count: int
    scale: Scale = "lin"

    def __post_init__(self) -> None:
        if self.count < 2:
            raise ConfigError(f"grid needs at least 2 points, got {self.count}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise ConfigError(f"grid needs min < max, got {self.lo}:{self.hi}")
        if self.scale not in ("lin", "log"):
            raise ConfigError(f"grid scale must be lin or log, got {self.scale!r}")
        if self.scale == "log" and self.lo <= 0:
            raise ConfigError(f"log grid needs min > 0, got {self.lo}")

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = [part.strip() for part in str(text).split(":")]
        if len(parts) not in (3, 4):
            raise ConfigError(f"malformed grid {text!r}, expected min:max:count[:lin|log]")
        try:
            lo, hi = float(parts[0]), float(parts[1])
            count = int(parts[2])
        except ValueError:
            raise ConfigError(f"malformed grid {text!r}, expected min:max:count[:lin|log]") from None
        scale = parts[3] if len(parts) == 4 else "lin"
        return cls(lo, hi, count, scale)  # type: ignore[arg-type]

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)

    def __str__(self) -> str:
        return f"{self.lo:g}:{self.hi:g}:{self.count}:{self.scale}"


# None marks an optional float that has no built-in value
SUBCOMMAND_DEFAULTS: dict[str, dict[str, Any]] = {
    "vacua": {
        "d_omega2": 1.0,
        "mu_e": 0.009782,
        "theta": TWO_PI,
        "epsilon_plus": 1e-5,
        "step_tol": 1e-12,
        "residual_tol": 1e-9,
        "thin_wall_threshold": 50.0,
        "scan": "",
        "calibrate": False,
    },
    "profile": {
        "b": 10.0,
        "length": 1.0,
        "alpha": 1.0,
        "phi_c": 0.0,
        "quad_tol": 1e-10,
        "grid": "-1.5:1.5:301",
    },
    "spectrum": {
        "length": 1.0,
        "n_max": 4096,
        "n1": 1.0,
        "quad_tol": 1e-10,
    },
    "tif": {
        "m_star": 1.0,
        "n1": 1.0,
        "alpha": 1.0,
        "length": 1.0,
        "x_bar": 1.0,
        "c1": 1.0,
        "c2": 1.0,
        "from_vacuum": False,
        "d_omega2": 1.0,
        "mu_e": 0.009782,
        "theta": TWO_PI,
        "grid": "0.05:5:100:log",
    },
    "poles": {
        "length": 1.0,
        "x": 0.0,
        "u_min": 0.0,
        "u_max": 20.0,
        "max_count": 0,
    },
    "iv-curve": {
        "c_tilde": 1.0,
        "e_t": 1.0,
        "c_v": 1.0,
        "e_field": None,
        "grid": "0.05:20:200",
        "matrix_element": False,
        "x_bar": 1.0,
        "alpha_l": 1.0,
    },
    "zener": {
        "g_p": 1.0,
        "e_t": 1.0,
        "grid": "0.05:10:200",
    },
    "fit": {
        "model": "zener",
        "data": "",
        "amplitude": 2.0,
        "threshold": 1.3,
        "noise": 0.0,
        "seed": 42,
        "grid": "0.5:6:56",
        "max_iter": 500,
    },
    "pairprod": {
        "dim": 0,
        "n_max": 200,
        "grid": "0.02:1:100",
    },
    "compare": {
        "a": "",
        "b": "",
        "c_tilde": 1.0,
        "g_p": 1.0,
        "e_t": 1.0,
        "c_v": 1.0,
        "grid": "1.05:10:100",
    },
}
SUBCOMMANDS = tuple(SUBCOMMAND_DEFAULTS)

DEFAULT_CONFIG_TOML = textwrap.dedent(
    """
    # cdwlab configuration
    # top-level keys apply to every subcommand that accepts them
    d_omega2 = 1.0
    # log_dir = "logs"

    [vacua]
    mu_e = 0.009782
    theta = 6.283185307179586
    step_tol = 1e-12
    residual_tol = 1e-9
    # scan = "0.001:0.02:40"

    [profile]
    b = 10.0
    length = 1.0
    grid = "-1.5:1.5:301"

    [spectrum]
    length = 1.0
    n_max = 4096
    n1 = 1.0

    [tif]
    x_bar = 1.0
    grid = "0.05:5:100:log"

    [poles]
    length = 1.0
    x = 0.0

    [iv-curve]
    c_tilde = 1.0
    e_t = 1.0
    c_v = 1.0
    grid = "0.05:20:200"

    [zener]
    g_p = 1.0
    e_t = 1.0

    [fit]
    model = "zener"
    noise = 0.0
    seed = 42
    max_iter = 500

    [pairprod]
    n_max = 200
    grid = "0.02:1:100"

    [compare]
    grid = "1.05:10:100"
    """
).lstrip()


@dataclass(slots=True)
class RunConfig:
    """One fully resolved subcommand invocation."""

    subcommand: str
    params: dict[str, Any] = field(default_factory=dict)
    output: Path = Path(DEFAULT_OUTPUT)
    log_dir: Path | None = None
    config_path: Path | None = None

    def __getitem__(self, key: str) -> Any:
        return self.params[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self.params.get(key, default)

    def grid(self, key: str = "grid") -> GridSpec:
        return GridSpec.parse(self.params[key])


def resolve_config_path(config_path: str | Path | None = None) -> Path | None:
    """Pick the config file.

    Resolution order:
        1. explicit ``config_path`` argument (must exist)
        2. ``CDWLAB_CONFIG`` environment variable
        3. ``~/.config/cdwlab/config.toml``
        4. none (built-in defaults)
    """
    if config_path:
        explicit = Path(config_path).expanduser()
        if not explicit.is_file():
            raise ConfigError(f"config file not found: {explicit}")
        return explicit

    candidates: list[Path] = []
    env_path = os.environ.get(ENV_VAR)
    if env_path:
        candidates.append(Path(env_path).expanduser())
    candidates.append(Path.home() / ".config" / "cdwlab" / "config.toml")

    for candidate in candidates:
        if candidate.is_file():
            return candidate
    return None


def load_config_data(path: Path | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        with path.open("rb") as f:
            return tomllib.load(f)
    except tomllib.TOMLDecodeError as error:
        raise ConfigError(f"{path}: malformed config ({error})") from error


def _known_keys() -> set[str]:
    keys = set(GLOBAL_KEYS)
    for defaults in SUBCOMMAND_DEFAULTS.values():
        keys.update(defaults)
    return keys


def _coerce(subcommand: str, key: str, value: Any) -> Any:
    default = SUBCOMMAND_DEFAULTS[subcommand][key]
    where = f"[{subcommand}] {key}"
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be true or false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where} must be an integer, got {value!r}")
        return value
    if isinstance(default, float) or default is None:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where} must be a number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{where} must be a string, got {value!r}")
    return value


def build_run_config(
    subcommand: str,
    overrides: Mapping[str, Any] | None = None,
    config_path: str | Path | None = None,
    output: str | Path | None = None,
    log_dir: str | Path | None = None,
) -> RunConfig:
    """Merge built-in defaults, the config file and command-line overrides."""
    if subcommand not in SUBCOMMAND_DEFAULTS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    defaults = SUBCOMMAND_DEFAULTS[subcommand]
    path = resolve_config_path(config_path)
    data = load_config_data(path)

    known = _known_keys()
    top_level: dict[str, Any] = {}
    tables: dict[str, dict[str, Any]] = {}
    for key, value in data.items():
        if isinstance(value, dict):
            if key not in SUBCOMMAND_DEFAULTS:
                raise ConfigError(f"unknown config section [{key}]")
            tables[key] = value
        elif key in known:
            top_level[key] = value
        else:
            raise ConfigError(f"unknown config key {key!r}")

    params = dict(defaults)
    for key, value in top_level.items():
        if key in defaults:
            params[key] = _coerce(subcommand, key, value)
    for key, value in tables.get(subcommand, {}).items():
        if key not in defaults:
            raise ConfigError(f"unknown key {key!r} in [{subcommand}]")
        params[key] = _coerce(subcommand, key, value)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in defaults:
            raise ConfigError(f"{subcommand} does not accept {key!r}")
        params[key] = _coerce(subcommand, key, value)

    for key, value in params.items():
        if key == "grid" or (key == "scan" and value):
            GridSpec.parse(value)

    resolved_output = output if output is not None else top_level.get("output", DEFAULT_OUTPUT)
    resolved_log_dir = log_dir if log_dir is not None else top_level.get("log_dir")
    return RunConfig(
        subcommand=subcommand,
        params=params,
        output=Path(str(resolved_output)).expanduser(),
        log_dir=Path(str(resolved_log_dir)).expanduser() if resolved_log_dir else None,
        config_path=path,
    )


def write_default_config(target_path: str | Path) -> Path:
    """Write the default configuration to ``target_path``.

    Creates parent directories if needed and returns the absolute path
    to the created file.
    """
    target = Path(target_path).expanduser()
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(DEFAULT_CONFIG_TOML, encoding="utf-8")
    return target.resolve()

"""CurveSeries: the sampled (abscissa, ordinate) unit every operation emits.

CSV 格式：
    # provenance: <equation> label=<label> key=value ...
    x_name,y_name[,extra...]
    <17 位有效数字的数据行>

复数序列拆成 ``re``/``im`` 两列；同一序列重复写出得到逐字节相同的文件。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
import pandas as pd

from .errors import DomainError

__all__ = [
    "CurveSeries",
    "format_number",
    "format_provenance",
    "write_series",
    "write_table",
    "read_series",
]

ParamValue = float | int | str | bool
# 17 significant digits round-trip binary64 exactly
FLOAT_FORMAT = "%.17g"


def format_number(value: float | int | str | bool) -> str:
    """17 significant digits, enough to round-trip binary64 exactly."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def format_provenance(equation: str, label: str, params: Mapping[str, ParamValue]) -> str:
    parts = [f"# provenance: {equation or 'none'}", f"label={label}"]
    for key in sorted(params):
        parts.append(f"{key}={format_number(params[key])}")
    return " ".join(parts)


@dataclass(slots=True)
class CurveSeries:
    """A sampled curve plus the provenance needed to regenerate it."""

    label: str
    x: np.ndarray
    y: np.ndarray
    x_name: str = "x"
    y_name: str = "y"
    equation: str = ""
    params: dict[str, ParamValue] = field(default_factory=dict)
    extra: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y)
        self.y = y if np.iscomplexobj(y) else y.astype(float)
        self.extra = {name: np.asarray(col, dtype=float) for name, col in self.extra.items()}

        if self.x.ndim != 1 or self.y.shape != self.x.shape:
            raise DomainError(
                f"{self.label}: abscissa and ordinate lengths differ "
                f"({self.x.shape} vs {self.y.shape})"
            )
        for name, col in self.extra.items():
            if col.shape != self.x.shape:
                raise DomainError(f"{self.label}: column {name} has length {col.shape}")
        if self.x.size > 1 and not np.all(np.diff(self.x) > 0):
            raise DomainError(f"{self.label}: abscissa must be strictly increasing")

    def __len__(self) -> int:
        return int(self.x.size)

    @property
    def is_complex(self) -> bool:
        return bool(np.iscomplexobj(self.y))

    def header(self) -> list[str]:
        if self.is_complex:
            names = [self.x_name, "re", "im"]
        else:
            names = [self.x_name, self.y_name]
        return names + list(self.extra)

    def frame(self) -> pd.DataFrame:
        """Columns in :meth:`header` order."""
        if self.is_complex:
            columns = [self.x, self.y.real, self.y.imag]
        else:
            columns = [self.x, self.y]
        columns.extend(self.extra.values())
        return pd.DataFrame(dict(zip(self.header(), columns)))

    def normalized(self) -> "CurveSeries":
        """Copy scaled so that max |y| == 1 (for overlay export)."""
        peak = float(np.max(np.abs(self.y))) if len(self) else 0.0
        if peak == 0.0:
            raise DomainError(f"{self.label}: cannot normalize an all-zero series")
        return CurveSeries(
            label=f"{self.label}/normalized",
            x=self.x.copy(),
            y=self.y / peak,
            x_name=self.x_name,
            y_name=self.y_name,
            equation=self.equation,
            params=dict(self.params),
        )


def write_table(path: str | Path, frame: pd.DataFrame, provenance: str) -> Path:
    """Write a comment line, then ``frame`` as CSV; ``\\n`` line ends."""
    target = Path(path).expanduser()
    target.parent.mkdir(parents=True, exist_ok=True)
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    target.write_text(provenance + "\n" + body, encoding="utf-8", newline="\n")
    return target


def write_series(series: CurveSeries, path: str | Path) -> Path:
    provenance = format_provenance(series.equation, series.label, series.params)
    return write_table(path, series.frame(), provenance)


def _parse_param(raw: str) -> ParamValue:
    if raw in ("true", "false"):
        return raw == "true"
    try:
        as_float = float(raw)
    except ValueError:
        return raw
    if raw.lstrip("-").isdigit():
        return int(raw)
    return as_float


def _read_provenance(source: Path) -> tuple[str, str, dict[str, ParamValue]]:
    equation = ""
    label = source.stem
    params: dict[str, ParamValue] = {}
    with source.open(encoding="utf-8") as f:
        for line in f:
            text = line.strip()
            if not text:
                continue
            if not text.startswith("#"):
                break
            text = text.lstrip("#").strip()
            if not text.startswith("provenance:"):
                continue
            tokens = text[len("provenance:"):].split()
            if tokens:
                equation = tokens[0]
            for token in tokens[1:]:
                key, sep, value = token.partition("=")
                if not sep:
                    continue
                if key == "label":
                    label = value
                else:
                    params[key] = _parse_param(value)
    return equation, label, params


def read_series(path: str | Path) -> CurveSeries:
    """Read a CSV produced by :func:`write_series` (or a bare ``E,I`` file)."""
    source = Path(path).expanduser()
    equation, label, params = _read_provenance(source)
    try:
        frame = pd.read_csv(source, comment="#", skip_blank_lines=True, float_precision="round_trip")
    except pd.errors.EmptyDataError:
        raise DomainError(f"{source}: no header row") from None

    header = [str(name).strip() for name in frame.columns]
    if len(header) < 2:
        raise DomainError(f"{source}: need at least two columns, got {header}")
    try:
        data = frame.to_numpy(dtype=float)
    except ValueError as error:
        raise DomainError(f"{source}: non-numeric data ({error})") from error

    if header[1:3] == ["re", "im"]:
        y = data[:, 1] + 1j * data[:, 2]
        rest = 3
        y_name = "re"
    else:
        y = data[:, 1]
        rest = 2
        y_name = header[1]
    extra = {name: data[:, i] for i, name in enumerate(header[rest:], start=rest)}
    return CurveSeries(
        label=label,
        x=data[:, 0],
        y=y,
        x_name=header[0],
        y_name=y_name,
        equation=equation,
        params=params,
        extra=extra,
    )

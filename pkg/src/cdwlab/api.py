"""
cdwlab 核心 API 模块

提供无 CLI 依赖的子命令执行：每个子命令写出 CSV 与
``<子命令>_summary.txt``，并返回摘要字典
可作为库独立使用
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np
from loguru import logger

from .config import RunConfig
from .errors import ConfigError
from .fit_compare import (
    MODEL_PARAMS,
    ZenerParams,
    compare_curves,
    fit_curve,
    format_fit_report,
    sspair_current,
    synthetic_data,
    zener_current,
)
from .physics.pair_production import linearity_metric, rate_curve
from .physics.soliton_profile import (
    ProfileSpec,
    action_momentum_space,
    action_position_space,
    box_profile,
    build_mode_grid,
    profile_series,
    reconstruct_profile,
    spectrum_series,
)
from .physics.transfer_current import (
    TransferParams,
    current_curve,
    current_from_matrix_element,
    find_poles,
    sspair_shape,
    t_if_limit,
    t_if_magnitude,
    transfer_params_from_vacuum,
    write_pole_report,
)
from .physics.vacuum_landscape import (
    PotentialParams,
    SolverSettings,
    calibrate_mu_e,
    derive_scales,
    potential_value,
    solve_vacua,
    thin_wall_check,
    vacuum_scan,
)
from .series import CurveSeries, format_number, read_series, write_series

__all__ = ["RunResult", "execute", "write_summary"]

Summary = dict[str, Any]


@dataclass(slots=True)
class RunResult:
    """执行结果：摘要与写出的文件"""

    subcommand: str
    summary: Summary = field(default_factory=dict)
    files: list[Path] = field(default_factory=list)


class _Writer:
    def __init__(self, output: Path):
        self.output = output
        self.files: list[Path] = []

    def series(self, series: CurveSeries, name: str) -> None:
        path = write_series(series, self.output / name)
        logger.info("写出 {} ({} 行)", path, len(series))
        self.files.append(path)

    def path(self, path: Path) -> None:
        logger.info("写出 {}", path)
        self.files.append(path)


def write_summary(summary: Summary, path: str | Path) -> Path:
    """按键排序写出 ``key=value`` 摘要"""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{key}={format_number(summary[key])}" for key in sorted(summary)]
    target.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return target


def _run_vacua(cfg: RunConfig, out: _Writer) -> Summary:
    p = PotentialParams(
        d_omega2=cfg["d_omega2"],
        mu_e=cfg["mu_e"],
        theta=cfg["theta"],
        epsilon_plus=cfg["epsilon_plus"],
    )
    settings = SolverSettings(step_tol=cfg["step_tol"], residual_tol=cfg["residual_tol"])
    solution = solve_vacua(p, settings)
    verdict = thin_wall_check(p, cfg["thin_wall_threshold"])

    summary: Summary = {
        "d_omega2": p.d_omega2,
        "mu_e": p.mu_e,
        "theta": p.theta,
        "thin_wall_ratio": verdict.ratio,
        "thin_wall_passed": verdict.passed,
        **solution.as_dict(),
    }
    if not solution.degenerate:
        length, alpha = derive_scales(solution.gap_direct)
        summary["L"] = length
        summary["alpha"] = alpha
    if cfg["calibrate"]:
        summary["mu_e_calibrated"] = calibrate_mu_e(p.d_omega2, p.theta, settings=settings)

    lo, hi = min(0.0, p.theta) - 1.0, max(0.0, p.theta) + 1.0
    phi = np.linspace(lo, hi, 401)
    out.series(
        CurveSeries(
            label="potential",
            x=phi,
            y=np.array([potential_value(p, float(v)) for v in phi]),
            x_name="phi",
            y_name="V",
            equation="eq3",
            params={"d_omega2": p.d_omega2, "mu_e": p.mu_e, "theta": p.theta},
        ),
        "potential.csv",
    )

    if cfg["scan"]:
        direct, bracket = vacuum_scan(cfg.grid("scan").values(), p.d_omega2, p.theta, settings)
        out.series(
            CurveSeries(
                label="gap_routes",
                x=direct.x,
                y=direct.y,
                x_name="mu_e",
                y_name="gap_direct",
                equation="eq11a",
                params=dict(direct.params),
                extra={"gap_bracket": bracket.y},
            ),
            "vacua_scan.csv",
        )
    return summary


def _run_profile(cfg: RunConfig, out: _Writer) -> Summary:
    spec = ProfileSpec.centered(cfg["b"], cfg["length"])
    out.series(profile_series(spec, cfg.grid().values()), "profile.csv")

    action = action_position_space(cfg["alpha"], spec, cfg["phi_c"], tol=cfg["quad_tol"])
    box_action = action_position_space(cfg["alpha"], box_profile(spec.L), cfg["phi_c"], tol=cfg["quad_tol"])
    return {
        "b": spec.b,
        "L": spec.L,
        "bL": spec.b * spec.L,
        "phi_center": spec.value(spec.center),
        "action_tanh": action,
        "action_box": box_action,
        "relative_deficit": (box_action - action) / box_action if box_action else 0.0,
    }


def _run_spectrum(cfg: RunConfig, out: _Writer) -> Summary:
    grid = build_mode_grid(cfg["length"], cfg["n_max"], cfg["n1"])
    out.series(spectrum_series(grid), "spectrum.csv")

    full = action_momentum_space(grid, "full")
    residual = action_momentum_space(grid, "residual")
    box = action_position_space(1.0 / grid.L, box_profile(grid.L), tol=cfg["quad_tol"])
    return {
        "L": grid.L,
        "n_max": grid.n_max,
        "n1": grid.n1,
        "action_full": full,
        "action_residual": residual,
        "action_box_position": box,
        "momentum_position_ratio": full / box,
        "reconstructed_center": reconstruct_profile(grid, 0.0),
        "reconstructed_wall": reconstruct_profile(grid, 0.5 * grid.L),
    }


def _run_tif(cfg: RunConfig, out: _Writer) -> Summary:
    if cfg["from_vacuum"]:
        solution = solve_vacua(PotentialParams(cfg["d_omega2"], cfg["mu_e"], cfg["theta"]))
        tp = transfer_params_from_vacuum(solution, m_star=cfg["m_star"], n1=cfg["n1"], x_bar=cfg["x_bar"])
    else:
        tp = TransferParams(
            m_star=cfg["m_star"],
            n1=cfg["n1"],
            alpha=cfg["alpha"],
            L=cfg["length"],
            x_bar=cfg["x_bar"],
            c1=cfg["c1"],
            c2=cfg["c2"],
        )

    x_bars = cfg.grid().values()
    magnitude = np.array([t_if_magnitude(replace(tp, x_bar=float(xb))) for xb in x_bars])
    limit = np.array([t_if_limit(replace(tp, x_bar=float(xb))) for xb in x_bars])
    params = {k: v for k, v in tp.as_dict().items() if k != "x_bar"}
    out.series(
        CurveSeries("t_if", x_bars, magnitude, "x_bar", "t_if", "eq42", params, {"t_if_limit": limit}),
        "tif.csv",
    )

    value = t_if_magnitude(tp)
    summary: Summary = dict(tp.as_dict())
    summary["t_if_magnitude"] = value
    summary["t_if_limit"] = t_if_limit(tp)
    if tp.n1 == 1.0 and value > 0:
        summary["limit_ratio"] = summary["t_if_limit"] / value
    return summary


def _run_poles(cfg: RunConfig, out: _Writer) -> Summary:
    length = cfg["length"]
    poles = find_poles(
        length,
        cfg["x"],
        region=(cfg["u_min"], cfg["u_max"]),
        max_count=cfg["max_count"] or None,
    )
    out.path(write_pole_report(poles, out.output / "poles.csv"))

    mismatch = 0.0
    for analytic, contour in zip(poles.residues, poles.contour_residues):
        mismatch = max(mismatch, abs(analytic - contour) / abs(analytic))
    summary: Summary = {
        "L": length,
        "x": cfg["x"],
        "n_poles": len(poles),
        "n_dropped": len(poles.dropped),
        "max_residue_mismatch": mismatch,
    }
    positive = [k for k in poles.poles if k.real > 0]
    if positive:
        first = positive[0]
        summary["first_pole_re"] = first.real
        summary["first_pole_im"] = first.imag
        summary["first_u"] = first.real * length / 2.0
    return summary


def _run_iv_curve(cfg: RunConfig, out: _Writer) -> Summary:
    if cfg["e_field"] is not None:
        fields = np.array([cfg["e_field"]])
    else:
        fields = cfg.grid().values()
    series = current_curve(cfg["c_tilde"], cfg["e_t"], cfg["c_v"], fields)
    out.series(series, "iv_curve.csv")

    tau = cfg["e_t"] * cfg["c_v"]
    summary: Summary = {
        "c_tilde": cfg["c_tilde"],
        "e_t": cfg["e_t"],
        "c_v": cfg["c_v"],
        "points": len(series),
        "I_first": float(series.y[0]),
        "I_last": float(series.y[-1]),
        "I_at_threshold": cfg["c_tilde"] * sspair_shape(tau, tau),
    }
    if cfg["matrix_element"]:
        tp = TransferParams(
            alpha=cfg["alpha_l"],
            L=1.0,
            x_bar=cfg["x_bar"],
            c1=cfg["c_tilde"],
            e_t=cfg["e_t"],
            c_v=cfg["c_v"],
        )
        companion = current_from_matrix_element(tp, fields)
        out.series(companion, "iv_curve_matrix_element.csv")
        summary["matrix_element_I_last"] = float(companion.y[-1])
    return summary


def _run_zener(cfg: RunConfig, out: _Writer) -> Summary:
    zp = ZenerParams(cfg["g_p"], cfg["e_t"])
    fields = cfg.grid().values()
    current = np.asarray(zener_current(zp, fields), dtype=float)
    out.series(
        CurveSeries("zener_current", fields, current, "E", "I", "eq49", {"g_p": zp.g_p, "e_t": zp.e_t}),
        "zener.csv",
    )
    return {"g_p": zp.g_p, "e_t": zp.e_t, "points": fields.size, "I_last": float(current[-1])}


def _run_fit(cfg: RunConfig, out: _Writer) -> Summary:
    model = cfg["model"]
    if model not in MODEL_PARAMS:
        raise ConfigError(f"unknown model {model!r}, expected one of {sorted(MODEL_PARAMS)}")
    if cfg["data"]:
        data = read_series(cfg["data"])
    else:
        data = synthetic_data(
            model,
            (cfg["amplitude"], cfg["threshold"]),
            cfg.grid().values(),
            noise=cfg["noise"],
            seed=cfg["seed"],
        )
        out.series(data, "fit_data.csv")

    result = fit_curve(model, data, max_iter=cfg["max_iter"])
    amplitude, threshold = result.params
    if model == "zener":
        fitted = zener_current(ZenerParams(max(amplitude, 0.0), threshold), data.x)
    else:
        fitted = sspair_current(amplitude, threshold, data.x)
    out.series(
        CurveSeries(
            label=f"fit_{model}",
            x=data.x,
            y=np.asarray(fitted, dtype=float),
            x_name="E",
            y_name="I_fit",
            equation="eq49" if model == "zener" else "eq47",
            params={"amplitude": amplitude, "threshold": threshold},
            extra={"I_data": np.real(data.y)},
        ),
        "fit_curve.csv",
    )
    report = out.output / "fit_report.txt"
    report.parent.mkdir(parents=True, exist_ok=True)
    report.write_text(format_fit_report(result), encoding="utf-8", newline="\n")
    out.path(report)
    return result.as_dict()


def _run_pairprod(cfg: RunConfig, out: _Writer) -> Summary:
    dims = (1, 3) if cfg["dim"] == 0 else (cfg["dim"],)
    fields = cfg.grid().values()
    summary: Summary = {"n_max": cfg["n_max"], "points": fields.size}
    for dim in dims:
        series = rate_curve(dim, fields, cfg["n_max"])
        out.series(series, f"pairprod_d{dim}.csv")
        summary[f"w_last_d{dim}"] = float(series.y[-1])
        if len(series) >= 10:
            summary[f"r2_d{dim}"] = linearity_metric(series)
    return summary


def _run_compare(cfg: RunConfig, out: _Writer) -> Summary:
    if bool(cfg["a"]) != bool(cfg["b"]):
        raise ConfigError("compare needs both --a and --b, or neither")
    if cfg["a"]:
        a = read_series(cfg["a"])
        b = read_series(cfg["b"])
    else:
        fields = cfg.grid().values()
        a = current_curve(cfg["c_tilde"], cfg["e_t"], cfg["c_v"], fields)
        zp = ZenerParams(cfg["g_p"], cfg["e_t"])
        b = CurveSeries(
            "zener_current",
            fields,
            np.asarray(zener_current(zp, fields), dtype=float),
            "E",
            "I",
            "eq49",
            {"g_p": zp.g_p, "e_t": zp.e_t},
        )
    comparison = compare_curves(a, b)
    out.series(comparison.overlay, "compare_overlay.csv")
    summary: Summary = {"a": a.label, "b": b.label, **comparison.as_dict()}
    return summary


_HANDLERS: dict[str, Callable[[RunConfig, _Writer], Summary]] = {
    "vacua": _run_vacua,
    "profile": _run_profile,
    "spectrum": _run_spectrum,
    "tif": _run_tif,
    "poles": _run_poles,
    "iv-curve": _run_iv_curve,
    "zener": _run_zener,
    "fit": _run_fit,
    "pairprod": _run_pairprod,
    "compare": _run_compare,
}


def execute(cfg: RunConfig) -> RunResult:
    """
    执行一个已解析的子命令

    Args:
        cfg: 由 ``build_run_config`` 得到的完整配置

    Returns:
        RunResult: 摘要字典与写出的文件列表

    Raises:
        CdwlabError: 下游计算失败（CLI 映射为退出码 1）
    """
    try:
        handler = _HANDLERS[cfg.subcommand]
    except KeyError:
        raise ConfigError(f"unknown subcommand {cfg.subcommand!r}") from None

    logger.info("开始 {}，输出目录 {}", cfg.subcommand, cfg.output)
    writer = _Writer(cfg.output)
    summary = handler(cfg, writer)
    summary = {k: v for k, v in summary.items() if not (isinstance(v, float) and math.isnan(v))}
    summary_path = write_summary(summary, cfg.output / f"{cfg.subcommand}_summary.txt")
    writer.path(summary_path)
    logger.info("完成 {}", cfg.subcommand)
    return RunResult(subcommand=cfg.subcommand, summary=summary, files=writer.files)

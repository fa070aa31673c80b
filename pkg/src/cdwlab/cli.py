"""Command-line interface for cdwlab."""

from __future__ import annotations

import importlib
import sys
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from types import ModuleType
from typing import Any, Optional, Sequence

import typer
from loguru import logger
from rich.console import Console
from rich.table import Table

# 从 api.py 导入核心功能（cli.py 不直接调用物理模块）
from .api import RunResult, execute
from .config import RunConfig, build_run_config, write_default_config
from .errors import CdwlabError, ConfigError
from .series import format_number

__all__ = ["app", "main", "run", "parse_config", "setup_logger"]

app = typer.Typer(
    name="cdwlab",
    help="CDW false-vacuum tunneling: vacua, spectra, poles, I-E curves and fits",
    add_completion=False,
    no_args_is_help=True,
)
console = Console()
err_console = Console(stderr=True)

DEFAULT_CONFIG_PATH = Path.home() / ".config" / "cdwlab" / "config.toml"


def setup_logger(app_name: str = "cdwlab", console_output: bool = True, log_dir: str | Path | None = None):
    """配置 Loguru 日志系统

    Args:
        app_name: 应用名称，用于日志目录
        console_output: 是否输出到控制台（stderr），默认为True
        log_dir: 日志根目录；为 None 时不写日志文件

    Returns:
        tuple: (logger, config_info)
    """
    logger.remove()

    if console_output:
        sink = sys.stderr
        fmt = (
            "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <blue>{elapsed}</blue> | "
            "<level>{level: <8}</level> | <cyan>{name}:{function}:{line}</cyan> - <level>{message}</level>"
        )
        try:
            if hasattr(sys.stderr, "reconfigure"):
                sys.stderr.reconfigure(encoding="utf-8")
                fmt = (
                    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <blue>{elapsed}</blue> | "
                    "<level>{level.icon} {level: <8}</level> | <cyan>{name}:{function}:{line}</cyan> - "
                    "<level>{message}</level>"
                )
        except Exception:
            pass
        logger.add(sink, level="INFO", format=fmt)

    config_info: dict[str, Any] = {"log_file": None}
    if log_dir is not None:
        now = datetime.now()
        target_dir = Path(log_dir) / app_name / now.strftime("%Y-%m-%d") / now.strftime("%H")
        target_dir.mkdir(parents=True, exist_ok=True)
        log_file = target_dir / f"{now.strftime('%M%S')}.log"
        logger.add(
            str(log_file),
            level="DEBUG",
            rotation="10 MB",
            retention="30 days",
            compression="zip",
            encoding="utf-8",
            format="{time:YYYY-MM-DD HH:mm:ss} | {elapsed} | {level.icon} {level: <8} | {name}:{function}:{line} - {message}",
            enqueue=True,
        )
        config_info["log_file"] = log_file

    logger.debug("日志系统已初始化，应用名称: {}", app_name)
    return logger, config_info


@dataclass(slots=True)
class _State:
    config: Optional[Path] = None
    output: Optional[Path] = None
    log_dir: Optional[Path] = None
    quiet: bool = False
    parse_only: bool = False
    captured: Optional[RunConfig] = None


def _print_summary(result: RunResult) -> None:
    table = Table(title=f"{result.subcommand} 摘要")
    table.add_column("参数", style="cyan")
    table.add_column("值", style="green")
    for key in sorted(result.summary):
        table.add_row(key, format_number(result.summary[key]))
    console.print(table)
    for path in result.files:
        console.print(f"[dim]已写出[/dim] {path}")


def _fail(error: Exception, code: int) -> typer.Exit:
    category = getattr(error, "category", "io")
    err_console.print(f"错误[{category}]: {error}", markup=False, highlight=False)
    return typer.Exit(code)


def _dispatch(ctx: typer.Context, subcommand: str, overrides: dict[str, Any]) -> None:
    state = ctx.ensure_object(_State)
    if state.parse_only:
        state.captured = build_run_config(subcommand, overrides, state.config, state.output, state.log_dir)
        return

    try:
        cfg = build_run_config(subcommand, overrides, state.config, state.output, state.log_dir)
    except ConfigError as error:
        raise _fail(error, 2) from error

    setup_logger("cdwlab", console_output=not state.quiet, log_dir=cfg.log_dir)
    try:
        result = execute(cfg)
    except ConfigError as error:
        raise _fail(error, 2) from error
    except (CdwlabError, OSError) as error:
        logger.debug("{} 失败: {!r}", subcommand, error)
        raise _fail(error, 1) from error
    _print_summary(result)


@app.callback()
def _global_options(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="Config file (TOML). Defaults to $CDWLAB_CONFIG or ~/.config/cdwlab/config.toml."
    ),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Output directory (default: cdwlab_out)."),
    log_dir: Optional[Path] = typer.Option(None, "--log-dir", help="Write DEBUG logs under this directory."),
    quiet: bool = typer.Option(False, "--quiet", "-q", help="No log output on the console."),
) -> None:
    state = ctx.ensure_object(_State)
    state.config = config
    state.output = output
    state.log_dir = log_dir
    state.quiet = quiet


@app.command("vacua")
def vacua_command(
    ctx: typer.Context,
    d_omega2: Optional[float] = typer.Option(None, "--d-omega2", help="Pinning coefficient Dω_p²."),
    mu_e: Optional[float] = typer.Option(None, "--mu-e", help="Field coupling μ_E."),
    theta: Optional[float] = typer.Option(None, "--theta", help="Offset θ of the quadratic term."),
    epsilon_plus: Optional[float] = typer.Option(None, "--epsilon-plus", help="Lower edge ε⁺ of the false-vacuum scan [ε⁺, π]."),
    step_tol: Optional[float] = typer.Option(None, "--step-tol", help="Root step tolerance."),
    residual_tol: Optional[float] = typer.Option(None, "--residual-tol", help="|dV/dφ| tolerance."),
    thin_wall_threshold: Optional[float] = typer.Option(None, "--thin-wall-threshold", help="Required Dω_p²/μ_E."),
    scan: Optional[str] = typer.Option(None, "--scan", help="μ_E grid min:max:count[:lin|log] for a gap scan."),
    calibrate: Optional[bool] = typer.Option(None, "--calibrate/--no-calibrate", help="Also solve for the μ_E where both gap routes agree."),
) -> None:
    """Solve the false/true vacua and the energy gap by both routes."""
    _dispatch(
        ctx,
        "vacua",
        {
            "d_omega2": d_omega2,
            "mu_e": mu_e,
            "theta": theta,
            "epsilon_plus": epsilon_plus,
            "step_tol": step_tol,
            "residual_tol": residual_tol,
            "thin_wall_threshold": thin_wall_threshold,
            "scan": scan,
            "calibrate": calibrate,
        },
    )


@app.command("profile")
def profile_command(
    ctx: typer.Context,
    b: Optional[float] = typer.Option(None, "--b", help="Wall steepness b."),
    length: Optional[float] = typer.Option(None, "--length", "-L", help="Wall separation L."),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Action prefactor α."),
    phi_c: Optional[float] = typer.Option(None, "--phi-c", help="Reference phase φ_C."),
    quad_tol: Optional[float] = typer.Option(None, "--quad-tol", help="Quadrature tolerance."),
    grid: Optional[str] = typer.Option(None, "--grid", help="x grid min:max:count[:lin|log]."),
) -> None:
    """Sample the thin-wall phase profile and its position-space action."""
    _dispatch(
        ctx,
        "profile",
        {"b": b, "length": length, "alpha": alpha, "phi_c": phi_c, "quad_tol": quad_tol, "grid": grid},
    )


@app.command("spectrum")
def spectrum_command(
    ctx: typer.Context,
    length: Optional[float] = typer.Option(None, "--length", "-L", help="Box length L."),
    n_max: Optional[int] = typer.Option(None, "--n-max", help="Number of modes."),
    n1: Optional[float] = typer.Option(None, "--n1", help="Height fraction n₁."),
    quad_tol: Optional[float] = typer.Option(None, "--quad-tol", help="Quadrature tolerance."),
) -> None:
    """Mode coefficients, momentum-space action sums and the scale ratio."""
    _dispatch(ctx, "spectrum", {"length": length, "n_max": n_max, "n1": n1, "quad_tol": quad_tol})


@app.command("tif")
def tif_command(
    ctx: typer.Context,
    m_star: Optional[float] = typer.Option(None, "--m-star", help="Effective mass m*."),
    n1: Optional[float] = typer.Option(None, "--n1", help="Height fraction n₁."),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Inverse length α."),
    length: Optional[float] = typer.Option(None, "--length", "-L", help="Pair separation L."),
    x_bar: Optional[float] = typer.Option(None, "--x-bar", help="Reference length x̄."),
    c1: Optional[float] = typer.Option(None, "--c1", help="Normalization C₁."),
    c2: Optional[float] = typer.Option(None, "--c2", help="Normalization C₂."),
    from_vacuum: Optional[bool] = typer.Option(None, "--from-vacuum/--no-from-vacuum", help="Derive L, α, C₁, C₂ from the vacuum gap."),
    d_omega2: Optional[float] = typer.Option(None, "--d-omega2", help="Pinning coefficient (with --from-vacuum)."),
    mu_e: Optional[float] = typer.Option(None, "--mu-e", help="Field coupling (with --from-vacuum)."),
    theta: Optional[float] = typer.Option(None, "--theta", help="Offset θ (with --from-vacuum)."),
    grid: Optional[str] = typer.Option(None, "--grid", help="x̄ sweep grid min:max:count[:lin|log]."),
) -> None:
    """|T_IF| and its n₁ = 1 limit, swept over x̄."""
    _dispatch(
        ctx,
        "tif",
        {
            "m_star": m_star,
            "n1": n1,
            "alpha": alpha,
            "length": length,
            "x_bar": x_bar,
            "c1": c1,
            "c2": c2,
            "from_vacuum": from_vacuum,
            "d_omega2": d_omega2,
            "mu_e": mu_e,
            "theta": theta,
            "grid": grid,
        },
    )


@app.command("poles")
def poles_command(
    ctx: typer.Context,
    length: Optional[float] = typer.Option(None, "--length", "-L", help="Pair separation L."),
    x: Optional[float] = typer.Option(None, "--x", help="Observation point x."),
    u_min: Optional[float] = typer.Option(None, "--u-min", help="Lower edge of the Re u search region."),
    u_max: Optional[float] = typer.Option(None, "--u-max", help="Upper edge of the Re u search region (<= 20)."),
    max_count: Optional[int] = typer.Option(None, "--max-count", help="Keep at most this many positive roots (0 = all)."),
) -> None:
    """Locate the kernel poles and write the residue report."""
    _dispatch(
        ctx,
        "poles",
        {"length": length, "x": x, "u_min": u_min, "u_max": u_max, "max_count": max_count},
    )


@app.command("iv-curve")
def iv_curve_command(
    ctx: typer.Context,
    c_tilde: Optional[float] = typer.Option(None, "--c-tilde", help="Amplitude C̃₁."),
    e_t: Optional[float] = typer.Option(None, "--e-t", help="Threshold field E_T."),
    c_v: Optional[float] = typer.Option(None, "--c-v", help="Proportionality factor c_v."),
    e_field: Optional[float] = typer.Option(None, "--e-field", help="Evaluate a single field value instead of the grid."),
    grid: Optional[str] = typer.Option(None, "--grid", help="Field grid min:max:count[:lin|log]."),
    matrix_element: Optional[bool] = typer.Option(None, "--matrix-element/--no-matrix-element", help="Also write the matrix-element form of the curve."),
    x_bar: Optional[float] = typer.Option(None, "--x-bar", help="Reference length x̄ (matrix-element form)."),
    alpha_l: Optional[float] = typer.Option(None, "--alpha-l", help="Product α·L (matrix-element form)."),
) -> None:
    """S-S' pair current I(E)."""
    _dispatch(
        ctx,
        "iv-curve",
        {
            "c_tilde": c_tilde,
            "e_t": e_t,
            "c_v": c_v,
            "e_field": e_field,
            "grid": grid,
            "matrix_element": matrix_element,
            "x_bar": x_bar,
            "alpha_l": alpha_l,
        },
    )


@app.command("zener")
def zener_command(
    ctx: typer.Context,
    g_p: Optional[float] = typer.Option(None, "--g-p", help="Prefactor G_P."),
    e_t: Optional[float] = typer.Option(None, "--e-t", help="Threshold field E_T."),
    grid: Optional[str] = typer.Option(None, "--grid", help="Field grid min:max:count[:lin|log]."),
) -> None:
    """Phenomenological Zener current."""
    _dispatch(ctx, "zener", {"g_p": g_p, "e_t": e_t, "grid": grid})


@app.command("fit")
def fit_command(
    ctx: typer.Context,
    model: Optional[str] = typer.Option(None, "--model", help="zener or sspair."),
    data: Optional[str] = typer.Option(None, "--data", help="E,I CSV to fit; synthetic data when omitted."),
    amplitude: Optional[float] = typer.Option(None, "--amplitude", help="Synthetic amplitude."),
    threshold: Optional[float] = typer.Option(None, "--threshold", help="Synthetic threshold (E_T, or E_T·c_v for sspair)."),
    noise: Optional[float] = typer.Option(None, "--noise", help="Relative Gaussian noise of synthetic data."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Noise seed."),
    grid: Optional[str] = typer.Option(None, "--grid", help="Synthetic field grid."),
    max_iter: Optional[int] = typer.Option(None, "--max-iter", help="Simplex iteration limit."),
) -> None:
    """Least-squares fit of a current model."""
    _dispatch(
        ctx,
        "fit",
        {
            "model": model,
            "data": data,
            "amplitude": amplitude,
            "threshold": threshold,
            "noise": noise,
            "seed": seed,
            "grid": grid,
            "max_iter": max_iter,
        },
    )


@app.command("pairprod")
def pairprod_command(
    ctx: typer.Context,
    dim: Optional[int] = typer.Option(None, "--dim", help="Spatial dimension 1, 2 or 3 (0 = both 1 and 3)."),
    n_max: Optional[int] = typer.Option(None, "--n-max", help="Series terms."),
    grid: Optional[str] = typer.Option(None, "--grid", help="Field grid min:max:count[:lin|log]."),
) -> None:
    """Pair-creation rate curves."""
    _dispatch(ctx, "pairprod", {"dim": dim, "n_max": n_max, "grid": grid})


@app.command("compare")
def compare_command(
    ctx: typer.Context,
    a: Optional[str] = typer.Option(None, "--a", help="First curve CSV."),
    b: Optional[str] = typer.Option(None, "--b", help="Second curve CSV."),
    c_tilde: Optional[float] = typer.Option(None, "--c-tilde", help="S-S' amplitude (built-in comparison)."),
    g_p: Optional[float] = typer.Option(None, "--g-p", help="Zener prefactor (built-in comparison)."),
    e_t: Optional[float] = typer.Option(None, "--e-t", help="Threshold field."),
    c_v: Optional[float] = typer.Option(None, "--c-v", help="Proportionality factor c_v."),
    grid: Optional[str] = typer.Option(None, "--grid", help="Field grid (built-in comparison)."),
) -> None:
    """Compare two curves, by default the S-S' current against the Zener law."""
    _dispatch(
        ctx,
        "compare",
        {"a": a, "b": b, "c_tilde": c_tilde, "g_p": g_p, "e_t": e_t, "c_v": c_v, "grid": grid},
    )


@app.command("init-config")
def init_config_command(
    ctx: typer.Context,
    path: Optional[Path] = typer.Argument(None, help="Target file (default ~/.config/cdwlab/config.toml)."),
    force: bool = typer.Option(False, "--force", "-f", help="Overwrite an existing file."),
) -> None:
    """Write the default configuration file."""
    target = path or DEFAULT_CONFIG_PATH
    state = ctx.ensure_object(_State)
    if state.parse_only:
        state.captured = RunConfig(subcommand="init-config", params={"path": str(target)})
        return
    if target.exists() and not force:
        raise _fail(ConfigError(f"{target} already exists (use --force)"), 2)
    written = write_default_config(target)
    console.print(f"[green]默认配置已写入[/green] {written}")


def _click_exceptions(command: Any) -> ModuleType:
    """Exception module of the click package ``command`` is built on.

    typer may ship its own copy of click, so the module is looked up from
    the command's class hierarchy instead of importing ``click`` directly.
    """
    for klass in type(command).__mro__:
        parts = klass.__module__.split(".")
        for i, part in enumerate(parts):
            if part.lstrip("_") == "click":
                return importlib.import_module(".".join(parts[: i + 1]) + ".exceptions")
    return importlib.import_module("click.exceptions")


def parse_config(argv: Sequence[str], config_file: str | Path | None = None) -> RunConfig:
    """Resolve ``argv`` into a RunConfig without running anything.

    Raises:
        ConfigError: malformed options, unknown keys or an unknown subcommand.
    """
    args = list(argv)
    if config_file is not None:
        args = ["--config", str(config_file), *args]
    state = _State(parse_only=True)
    command = typer.main.get_command(app)
    exceptions = _click_exceptions(command)
    try:
        command.main(args=args, prog_name="cdwlab", standalone_mode=False, obj=state)
    except (exceptions.ClickException, exceptions.Abort) as error:
        raise ConfigError(str(error) or type(error).__name__) from error
    if state.captured is None:
        raise ConfigError("no subcommand given")
    return state.captured


def main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return the exit code (0 ok, 1 computation error, 2 usage error)."""
    command = typer.main.get_command(app)
    exceptions = _click_exceptions(command)
    try:
        rv = command.main(
            args=list(argv) if argv is not None else None,
            prog_name="cdwlab",
            standalone_mode=False,
        )
    except exceptions.ClickException as error:
        error.show()
        return error.exit_code
    except exceptions.Abort:
        err_console.print("已取消", markup=False)
        return 1
    return rv if isinstance(rv, int) else 0


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()

"""测试命令行：子命令、退出码、配置解析与日志目录"""

import pytest
import typer
from typer.testing import CliRunner

from cdwlab.cli import _click_exceptions, app, main, parse_config
from cdwlab.config import write_default_config
from cdwlab.errors import ConfigError
from cdwlab.series import read_series

pytestmark = pytest.mark.usefixtures("isolated_home")

runner = CliRunner()


def _summary(path):
    pairs = (line.split("=", 1) for line in path.read_text(encoding="utf-8").splitlines())
    return {key: value for key, value in pairs}


class TestSubcommands:
    """测试子命令运行与输出"""

    def test_vacua(self, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(app, ["-o", str(out), "-q", "vacua", "--mu-e", "0.009782"])
        assert result.exit_code == 0, result.output
        summary = _summary(out / "vacua_summary.txt")
        assert float(summary["gap_direct"]) == pytest.approx(0.373, rel=0.05)
        assert (out / "potential.csv").is_file()

    def test_pairprod(self, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(app, ["-o", str(out), "-q", "pairprod", "--dim", "1", "--grid", "0.05:1:50"])
        assert result.exit_code == 0, result.output
        series = read_series(out / "pairprod_d1.csv")
        assert len(series) == 50
        assert series.y[-1] == pytest.approx(7.03e-3, abs=1e-5)
        assert not (out / "pairprod_d3.csv").exists()

    def test_summary_table_printed(self, tmp_path):
        result = runner.invoke(app, ["-o", str(tmp_path), "-q", "zener", "--grid", "0.5:2:4"])
        assert result.exit_code == 0, result.output
        assert "zener" in result.output
        assert "I_last" in result.output

    def test_domain_error_exit_code(self, tmp_path):
        result = runner.invoke(app, ["-o", str(tmp_path), "-q", "iv-curve", "--e-field", "0"])
        assert result.exit_code == 1
        assert "domain" in result.output

    def test_degenerate_calibration_fails(self, tmp_path):
        result = runner.invoke(app, ["-o", str(tmp_path), "-q", "vacua", "--theta", "0", "--calibrate"])
        assert result.exit_code == 1
        assert "no-convergence" in result.output
        assert not (tmp_path / "vacua_summary.txt").exists()

    def test_bad_grid_is_usage_error(self, tmp_path):
        result = runner.invoke(app, ["-o", str(tmp_path), "-q", "zener", "--grid", "5:1:10"])
        assert result.exit_code == 2
        assert "usage" in result.output

    def test_unknown_subcommand(self):
        result = runner.invoke(app, ["bogus-cmd"])
        assert result.exit_code == 2

    def test_deterministic_output(self, tmp_path):
        args = ["-q", "fit", "--model", "sspair", "--threshold", "1.0", "--amplitude", "1.0", "--noise", "0.02"]
        first = runner.invoke(app, ["-o", str(tmp_path / "a"), *args])
        second = runner.invoke(app, ["-o", str(tmp_path / "b"), *args])
        assert first.exit_code == second.exit_code == 0
        for name in ("fit_data.csv", "fit_curve.csv", "fit_report.txt", "fit_summary.txt"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_log_dir(self, tmp_path):
        logs = tmp_path / "logs"
        result = runner.invoke(
            app, ["-o", str(tmp_path / "out"), "--log-dir", str(logs), "-q", "zener", "--grid", "0.5:2:4"]
        )
        assert result.exit_code == 0, result.output
        assert list((logs / "cdwlab").rglob("*.log"))


class TestInitConfig:
    """测试默认配置写出"""

    def test_writes_file(self, tmp_path):
        target = tmp_path / "cfg" / "config.toml"
        result = runner.invoke(app, ["init-config", str(target)])
        assert result.exit_code == 0, result.output
        assert target.is_file()

    def test_refuses_overwrite(self, tmp_path):
        target = tmp_path / "config.toml"
        target.write_text("# mine\n", encoding="utf-8")
        assert runner.invoke(app, ["init-config", str(target)]).exit_code == 2
        assert target.read_text(encoding="utf-8") == "# mine\n"
        assert runner.invoke(app, ["init-config", str(target), "--force"]).exit_code == 0
        assert "[vacua]" in target.read_text(encoding="utf-8")


class TestParseConfig:
    """测试只解析不执行"""

    def test_overrides(self, tmp_path):
        cfg = parse_config(["-o", str(tmp_path / "out"), "poles", "--length", "2", "--max-count", "3"])
        assert cfg.subcommand == "poles"
        assert cfg["length"] == 2.0
        assert cfg["max_count"] == 3
        assert cfg.output == tmp_path / "out"
        assert not (tmp_path / "out").exists()

    def test_config_file(self, tmp_path):
        path = write_default_config(tmp_path / "config.toml")
        cfg = parse_config(["fit", "--noise", "0.1"], config_file=path)
        assert cfg.config_path == path
        assert cfg["noise"] == 0.1
        assert cfg["seed"] == 42

    def test_boolean_flag(self):
        assert parse_config(["vacua", "--calibrate"])["calibrate"] is True
        assert parse_config(["iv-curve", "--no-matrix-element"])["matrix_element"] is False

    def test_init_config(self, tmp_path):
        cfg = parse_config(["init-config", str(tmp_path / "c.toml")])
        assert cfg.subcommand == "init-config"
        assert not (tmp_path / "c.toml").exists()

    @pytest.mark.parametrize(
        "argv",
        [[], ["bogus-cmd"], ["vacua", "--mu-e", "abc"], ["vacua", "--nope"], ["zener", "--grid", "1:2"]],
    )
    def test_invalid(self, argv):
        with pytest.raises(ConfigError):
            parse_config(argv)


class TestMain:
    """测试入口函数的返回码"""

    def test_success(self, tmp_path):
        assert main(["-o", str(tmp_path), "-q", "zener", "--grid", "0.5:2:4"]) == 0

    def test_computation_error(self, tmp_path):
        assert main(["-o", str(tmp_path), "-q", "iv-curve", "--e-field", "-1"]) == 1

    def test_usage_error(self):
        assert main(["bogus-cmd"]) == 2

    @pytest.mark.parametrize(
        "argv",
        [["bogus-cmd"], ["vacua", "--mu-e", "abc"], ["vacua", "--nope"]],
    )
    def test_usage_errors_exit_2(self, argv, capsys):
        assert main(argv) == 2
        assert "Traceback" not in capsys.readouterr().err

    def test_usage_error_class_is_caught(self):
        command = typer.main.get_command(app)
        exceptions = _click_exceptions(command)
        with pytest.raises(exceptions.UsageError):
            command.main(args=["bogus-cmd"], prog_name="cdwlab", standalone_mode=False)

import json

import pytest

from painleve_gap import __version__
from painleve_gap.app_data import AppData
from painleve_gap.cli import (
    EXIT_CONFIG_ERROR,
    EXIT_NUMERIC_ERROR,
    RunConfig,
    build_parser,
    main,
    parse_config_text,
    save_flags,
)
from painleve_gap.exceptions import ConfigError


@pytest.fixture(autouse=True)
def user_dirs(tmp_path, monkeypatch):
    for name in ("user_log_dir", "user_config_dir"):
        target = tmp_path / name
        monkeypatch.setattr(
            f"painleve_gap.app_data.{name}", lambda appname, target=target: str(target)
        )


def run_cli(capsys, *argv):
    status = main(["--no-log-file", *argv])
    captured = capsys.readouterr()
    return status, captured.out, captured.err


class TestConfigText:
    """key = value configuration files."""

    def test_values_and_comments(self):
        values = parse_config_text(
            "# budgets\nm = 60\n\nalpha = 0.3  # kernel\nhamiltonian = yes\n"
            "s_grid = -1:1:3\nthreads =\n",
            "test.conf",
        )
        assert values == {
            "m": 60,
            "alpha": 0.3,
            "hamiltonian": True,
            "s_grid": (-1.0, 0.0, 1.0),
            "threads": None,
        }

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            parse_config_text("colour = red\n", "test.conf")

    def test_missing_equals(self):
        with pytest.raises(ConfigError):
            parse_config_text("m 60\n", "test.conf")

    def test_bad_value(self):
        with pytest.raises(ConfigError):
            parse_config_text("m = many\n", "test.conf")

    def test_requires(self):
        assert parse_config_text(f"requires = >={__version__}\n", "test.conf") == {}
        with pytest.raises(ConfigError):
            parse_config_text("requires = >=99\n", "test.conf")
        with pytest.raises(ConfigError):
            parse_config_text("requires = not a version\n", "test.conf")


class TestRunConfig:
    """Validation of merged configurations."""

    def test_defaults_are_valid(self):
        RunConfig().validate()

    @pytest.mark.parametrize(
        "changes",
        [{"m": 0}, {"h": -0.1}, {"threads": 0}, {"method": "exact"}, {"format": "xml"}],
    )
    def test_invalid(self, changes):
        config = RunConfig(**changes)
        with pytest.raises(ConfigError):
            config.validate()


class TestMain:
    """Exit codes and output formats."""

    def test_csv_output(self, capsys):
        status, out, _ = run_cli(
            capsys, "identity", "check", "--which", "reduction", "--s-grid", "2,3",
            "--t", "0.4",
        )
        assert status == 0
        lines = out.splitlines()
        assert lines[0] == f"# painleve-gap v{__version__}"
        assert lines[1] == "s,t,residual"
        assert len(lines) == 4
        assert "\r" not in out

    def test_json_output(self, capsys):
        status, out, _ = run_cli(
            capsys, "--format", "json", "identity", "check", "--which", "reduction",
            "--s-grid", "3", "--t", "-1",
        )
        assert status == 0
        document = json.loads(out)
        assert set(document) == {"kernel", "params", "rows", "budgets", "version"}
        assert document["version"] == __version__
        assert document["params"]["identity"] == "reduction"
        assert document["rows"][0]["s"] == 3.0
        assert document["rows"][0]["residual"] < 1e-9

    def test_output_file(self, capsys, tmp_path):
        output = tmp_path / "reduction.csv"
        status, out, _ = run_cli(
            capsys, "-o", str(output), "identity", "check", "--which", "reduction",
            "--s-grid", "3", "--t", "0.4",
        )
        assert status == 0
        assert out == ""
        assert output.read_text().startswith("# painleve-gap v")

    def test_empty_grid(self, capsys):
        status, _, err = run_cli(capsys, "tw", "table", "--s-grid", "")
        assert status == EXIT_CONFIG_ERROR
        assert json.loads(err.splitlines()[-1])["error"] == "ConfigError"

    def test_nonpositive_budget(self, capsys):
        status, _, _ = run_cli(capsys, "tw", "table", "--m", "-4")
        assert status == EXIT_CONFIG_ERROR

    def test_config_file_unknown_key(self, capsys, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("colour = red\n")
        status, _, _ = run_cli(capsys, "--config", str(path), "tw", "table")
        assert status == EXIT_CONFIG_ERROR

    def test_config_file_requires(self, capsys, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("requires = >=99\n")
        status, _, _ = run_cli(capsys, "--config", str(path), "tw", "table")
        assert status == EXIT_CONFIG_ERROR

    def test_missing_config_file(self, capsys, tmp_path):
        status, _, _ = run_cli(
            capsys, "--config", str(tmp_path / "missing.conf"), "tw", "table"
        )
        assert status == EXIT_CONFIG_ERROR

    def test_flags_override_config_file(self, capsys, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("which = total-integral\nt = 0.4\ns_grid = 3\n")
        status, out, _ = run_cli(
            capsys, "--config", str(path), "identity", "check", "--which", "reduction"
        )
        assert status == 0
        assert out.splitlines()[1] == "s,t,residual"

    def test_numeric_error(self, capsys):
        status, _, err = run_cli(
            capsys, "p2", "gap", "--method", "nystrom", "--s-grid", "-1"
        )
        assert status == EXIT_NUMERIC_ERROR
        payload = json.loads(err.splitlines()[-1])
        assert payload["error"] == "BadParameter"
        assert payload["details"]["s"] == -1.0

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_untranslated_numeric_failure(self, capsys, monkeypatch):
        def overflow(config):
            raise FloatingPointError("overflow encountered in exp")

        monkeypatch.setattr("painleve_gap.cli.run", overflow)
        status, _, err = run_cli(capsys, "tw", "table")
        assert status == EXIT_NUMERIC_ERROR
        payload = json.loads(err.splitlines()[-1])
        assert payload["error"] == "NumericError"
        assert payload["message"] == "overflow encountered in exp"
        assert payload["details"]["cause"] == "FloatingPointError"

    def test_hamiltonian_rejected_for_p2(self, capsys):
        status, _, err = run_cli(capsys, "p2", "gap", "--hamiltonian", "--s-grid", "1")
        assert status == EXIT_CONFIG_ERROR
        payload = json.loads(err.splitlines()[-1])
        assert payload["error"] == "ConfigError"
        assert payload["details"]["key"] == "hamiltonian"

    def test_hamiltonian_shift_identity(self, capsys):
        status, out, _ = run_cli(
            capsys, "identity", "check", "--which", "hamiltonian-shift",
            "--s-grid", "-2", "--alpha", "0", "--omega", "0", "--x-grid", "-3:6:10",
        )
        assert status == 0
        lines = out.splitlines()
        assert lines[1] == "s,alpha,residual"
        assert float(lines[2].split(",")[-1]) < 1e-6


class TestSaveConfig:
    """Per-user defaults written by --save-config."""

    def test_flags_become_defaults(self, capsys, tmp_path):
        config_file = tmp_path / "user_config_dir" / "painleve_gap.conf"
        config_file.parent.mkdir()
        config_file.write_text("m = 60\n")
        status, _, _ = run_cli(
            capsys, "--save-config", "identity", "check", "--which", "reduction",
            "--s-grid", "3", "--t", "0.4",
        )
        assert status == 0
        text = config_file.read_text()
        assert "m = 60\n" in text
        assert "which = reduction\n" in text
        assert "t = 0.4\n" in text
        status, out, _ = run_cli(capsys, "identity", "check")
        assert status == 0
        assert out.splitlines()[1] == "s,t,residual"
        assert len(out.splitlines()) == 3

    def test_only_given_flags_are_saved(self, capsys, tmp_path):
        status, _, _ = run_cli(
            capsys, "--save-config", "identity", "check", "--which", "reduction",
            "--s-grid", "3",
        )
        assert status == 0
        text = (tmp_path / "user_config_dir" / "painleve_gap.conf").read_text()
        assert text == "s_grid = 3\nwhich = reduction\n"

    def test_invalid_run_is_not_saved(self, capsys, tmp_path):
        status, _, _ = run_cli(capsys, "--save-config", "tw", "table", "--m", "-4")
        assert status == EXIT_CONFIG_ERROR
        assert not (tmp_path / "user_config_dir" / "painleve_gap.conf").exists()

    def test_boolean_flag(self):
        args = build_parser().parse_args(["p34", "gap", "--hamiltonian", "--m", "80"])
        saved = save_flags(args, AppData("painleve-gap"))
        assert saved == {"hamiltonian": "yes", "m": "80"}

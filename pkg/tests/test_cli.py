"""Tests for the marginlab command line, its configuration and its CSV output."""

import csv
import io

import pytest

from application.ports.configuration_port import ConfigurationParseError
from application.ports.report_writer_port import Provenance, ReportWriteError
from infrastructure.adapters.csv_report_writer import CsvReportWriter, format_cell
from marginlab.checks import CHECKS, check_names, get_check
from marginlab.cli import EXIT_USAGE, main
from marginlab.config import (
    ExperimentConfig,
    config_hash,
    dump_config,
    load_experiment_config,
)
from marginlab.runner import (
    BOUNDS_COLUMNS,
    GAP_SUMMARY_COLUMNS,
    GAP_TRIAL_COLUMNS,
    LOWERBOUND_COLUMNS,
    VERIFY_COLUMNS,
)
from domain.errors import UnknownCheckError


def parse_csv(text):
    """Split provenance comments from the table."""
    lines = text.splitlines()
    comments = [line[2:] for line in lines if line.startswith("# ")]
    body = "\n".join(line for line in lines if not line.startswith("#"))
    reader = csv.reader(io.StringIO(body))
    rows = list(reader)
    return comments, rows[0], [dict(zip(rows[0], row)) for row in rows[1:]]


def write_yaml(tmp_path, text, name="experiment.yaml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestExperimentConfig:
    """Test cases for the experiment YAML schema."""

    def test_round_trip(self, tmp_path):
        """Test that a dumped configuration loads back unchanged."""
        config = ExperimentConfig.model_validate({
            "command": "bounds",
            "seed": 7,
            "bounds": {"gammas": [0.1, 0.2], "constants": {"tight": 2.0}},
            "verify": {"checks": ["p-in-unit"], "params": {"p-in-unit": {"trials": 10}}},
        })
        path = tmp_path / "out.yaml"
        dump_config(config, path)

        assert load_experiment_config(path) == config

    def test_hash_ignores_threads(self):
        """Test that the provenance digest does not depend on the worker count."""
        base = ExperimentConfig(seed=3)

        assert config_hash(base) == config_hash(base.model_copy(update={"threads": 8}))
        assert config_hash(base) != config_hash(base.model_copy(update={"seed": 4}))
        assert len(config_hash(base)) == 64

    def test_empty_file_gives_defaults(self, tmp_path):
        """Test that an empty document is the default configuration."""
        assert load_experiment_config(write_yaml(tmp_path, "")) == ExperimentConfig()

    def test_malformed_yaml_has_position(self, tmp_path):
        """Test that scanner errors carry a line number."""
        path = write_yaml(tmp_path, "seed: 0\nbounds:\n  gammas: [0.1\n")
        with pytest.raises(ConfigurationParseError) as info:
            load_experiment_config(path)

        assert info.value.line is not None
        assert str(path) in str(info.value)

    def test_schema_error_points_at_node(self, tmp_path):
        """Test line:column of an out-of-range value."""
        path = write_yaml(tmp_path, "seed: 0\nbounds:\n  c: -1\n")
        with pytest.raises(ConfigurationParseError) as info:
            load_experiment_config(path)

        assert (info.value.line, info.value.column) == (3, 6)
        assert "bounds.c" in str(info.value)
        assert f"{path}:3:6:" in str(info.value)

    def test_unknown_keys_rejected(self, tmp_path):
        """Test that typos in section names are errors."""
        with pytest.raises(ConfigurationParseError) as info:
            load_experiment_config(write_yaml(tmp_path, "seed: 0\nbuonds: {}\n"))

        assert info.value.line == 2

    def test_unknown_bound_constant(self):
        """Test that per-bound constants are keyed by known bound names."""
        with pytest.raises(ValueError):
            ExperimentConfig.model_validate({"bounds": {"constants": {"vapnik": 1.0}}})

    def test_seed_range(self):
        """Test unsigned 64-bit seeds."""
        ExperimentConfig(seed=2**64 - 1)
        with pytest.raises(ValueError):
            ExperimentConfig(seed=2**64)


class TestCsvReportWriter:
    """Test cases for the CSV report writer."""

    def test_cells(self):
        """Test blank, boolean, integer and float formatting."""
        assert format_cell(None) == ""
        assert format_cell(True) == "true"
        assert format_cell(3) == "3"
        assert format_cell(0.1) == "0.1"
        assert float(format_cell(1 / 3)) == 1 / 3

    def test_stream_layout(self):
        """Test provenance lines, header order and missing cells."""
        stream = io.StringIO()
        CsvReportWriter(stream).write(
            ["a", "b"], [{"a": 1, "b": None}, {"b": 2.5}],
            Provenance(version="0.1.0", command="bounds", seed=5),
        )

        assert stream.getvalue() == (
            "# version=0.1.0\n# command=bounds\n# seed=5\na,b\n1,\n,2.5\n"
        )

    def test_file_destination(self, tmp_path):
        """Test that parent directories are created."""
        path = tmp_path / "nested" / "out.csv"
        CsvReportWriter(path).write(["x"], [{"x": 1}])

        assert path.read_text(encoding="utf-8") == "x\n1\n"

    def test_unwritable_destination(self, tmp_path):
        """Test that OS errors surface as ReportWriteError."""
        blocker = tmp_path / "file"
        blocker.write_text("", encoding="utf-8")
        with pytest.raises(ReportWriteError):
            CsvReportWriter(blocker / "out.csv").write(["x"], [])


class TestCheckRegistry:
    """Test cases for the named check registry."""

    def test_every_check_registered(self):
        """Test the full list of check names."""
        assert set(check_names()) == {
            "p-in-unit", "dist-determinism", "monotonicity", "lipschitz", "chi-square-tail",
            "bernstein-margin", "phirho-sandwich", "rounding-geometry", "unbiased-rounding",
            "margin-preservation", "loss-decomposition",
        }

    def test_unknown_check(self):
        """Test that lookups of unknown names list the known ones."""
        with pytest.raises(UnknownCheckError):
            get_check("nope")

    def test_unknown_parameter(self, serial):
        """Test that parameters are checked against the runner signature."""
        with pytest.raises(TypeError):
            CHECKS["p-in-unit"].run(0, serial, params={"bogus": 1})

    def test_trials_override(self, serial):
        """Test that the trial count goes to the check's own keyword."""
        report = CHECKS["rounding-geometry"].run(1, serial, trials=500)

        assert report.trials == 500
        assert report.seed == 1

    def test_distribution_checks_run_lifted(self, serial):
        """Test the loss decomposition through the registry wrapper."""
        report = CHECKS["loss-decomposition"].run(0, serial, params={"draws": 5, "k": 8})

        assert report.passed


class TestMain:
    """End-to-end tests of ``marginlab`` subcommands."""

    def test_bounds_single_point(self, capsys):
        """Test the worked tight value 1.01 and blank cells for failed preconditions."""
        code = main([
            "bounds", "--gammas", "0.1", "--ns", "100", "--deltas", "1", "--losses", "0",
        ])
        comments, header, rows = parse_csv(capsys.readouterr().out)

        assert code == 0
        assert header == BOUNDS_COLUMNS
        assert len(rows) == 1
        assert float(rows[0]["tight"]) == pytest.approx(1.01)
        assert rows[0]["lower"] == ""
        assert "command=bounds" in comments
        assert any(c.startswith("config_sha256=") for c in comments)

    @pytest.mark.parametrize("argv,document,expected", [
        ([], None, "seed=42"),
        (["--seed", "7"], None, "seed=7"),
        ([], "seed: 3\n", "seed=3"),
    ])
    def test_environment_seed_fallback(
        self, argv, document, expected, tmp_path, capsys, monkeypatch
    ):
        """Test that MBL_SEED applies only when neither --seed nor the config file sets one."""
        monkeypatch.setenv("MBL_SEED", "42")
        if document is not None:
            argv = argv + ["--config", str(write_yaml(tmp_path, document))]
        code = main(["bounds", "--gammas", "0.5", "--ns", "100"] + argv)
        comments, _, _ = parse_csv(capsys.readouterr().out)

        assert code == 0
        assert expected in comments

    def test_malformed_environment_seed_is_usage_error(self, monkeypatch):
        """Test that an unparsable MBL_SEED is rejected."""
        monkeypatch.setenv("MBL_SEED", "many")

        assert main(["bounds", "--gammas", "0.5"]) == 64

    def test_empty_sweep_is_header_only(self, capsys):
        """Test that an empty grid writes only the header."""
        code = main(["bounds", "--gammas", ""])
        _, header, rows = parse_csv(capsys.readouterr().out)

        assert code == 0
        assert header == BOUNDS_COLUMNS
        assert rows == []

    def test_bounds_from_config(self, tmp_path):
        """Test a sweep read from YAML and written to --out."""
        config = write_yaml(
            tmp_path, "command: bounds\nbounds:\n  gammas: [0.1, 0.2]\n  ns: [100, 1000]\n"
        )
        out = tmp_path / "bounds.csv"

        assert main(["bounds", "--config", str(config), "--out", str(out)]) == 0
        _, _, rows = parse_csv(out.read_text(encoding="utf-8"))
        assert len(rows) == 4

    def test_verify_pass(self, capsys):
        """Test a passing check exits 0."""
        code = main(["verify", "--check", "p-in-unit", "--trials", "2000"])
        _, header, rows = parse_csv(capsys.readouterr().out)

        assert code == 0
        assert header == VERIFY_COLUMNS
        assert {row["check"] for row in rows} == {"p-in-unit"}
        assert {row["status"] for row in rows} == {"pass"}

    def test_verify_fail(self, capsys):
        """Test that a deliberately wrong constant exits 1."""
        code = main([
            "verify", "--check", "chi-square-tail", "--trials", "20000",
            "--param", "k=10", "--param", "x=0.9", "--param", "constant=0.5",
        ])

        assert code == 1
        assert "fail" in capsys.readouterr().out

    def test_verify_inconclusive(self, capsys):
        """Test that an inconclusive check exits 2."""
        code = main([
            "verify", "--check", "lipschitz", "--trials", "100000",
            "--param", "gamma_i=0.6", "--param", "k=139", "--param", "h=1e-8",
            "--param", "grid_points=1",
        ])

        assert code == 2
        assert "inconclusive" in capsys.readouterr().out

    def test_unknown_check_is_usage_error(self):
        """Test exit code 64 for an unregistered check name."""
        assert main(["verify", "--check", "nope"]) == EXIT_USAGE

    def test_unknown_parameter_is_usage_error(self):
        """Test exit code 64 for a parameter the check does not take."""
        assert main(["verify", "--check", "p-in-unit", "--param", "bogus=1"]) == EXIT_USAGE

    def test_negative_seed_is_usage_error(self):
        """Test exit code 64 for a seed outside the unsigned range."""
        assert main(["bounds", "--seed", "-1"]) == EXIT_USAGE

    def test_missing_command_is_usage_error(self):
        """Test that argparse errors exit 64."""
        with pytest.raises(SystemExit) as info:
            main([])

        assert info.value.code == EXIT_USAGE

    def test_bad_config_exits_one(self, tmp_path):
        """Test that a config parse error exits 1."""
        config = write_yaml(tmp_path, "seed: [\n")

        assert main(["bounds", "--config", str(config)]) == 1

    def test_lowerbound(self, capsys):
        """Test k = 1, tau = 1/2, n = 2: true loss 1/2 in every trial."""
        code = main(["lowerbound", "--trials", "5"])
        _, header, rows = parse_csv(capsys.readouterr().out)

        assert code == 0
        assert header == LOWERBOUND_COLUMNS
        assert len(rows) == 5
        assert {float(row["true_loss"]) for row in rows} == {0.5}
        assert {row["disjoint"] for row in rows} == {"true"}

    def test_lowerbound_invalid_taus(self):
        """Test that a tau with non-integral level size is a usage error."""
        assert main(["lowerbound", "--taus", "0.3"]) == EXIT_USAGE

    def test_gap_zero_trials(self, capsys):
        """Test that zero trials write only the summary header."""
        code = main(["gap", "--trials", "0"])
        _, header, rows = parse_csv(capsys.readouterr().out)

        assert code == 0
        assert header == GAP_SUMMARY_COLUMNS
        assert rows == []

    def test_gap_per_trial(self, capsys):
        """Test one row per trial with --per-trial."""
        code = main(["gap", "--trials", "2", "--n", "50", "--per-trial"])
        _, header, rows = parse_csv(capsys.readouterr().out)

        assert code == 0
        assert header == GAP_TRIAL_COLUMNS
        assert [row["trial"] for row in rows] == ["0", "1"]

    def test_output_independent_of_threads(self, capsys):
        """Test byte-identical output for one and three threads."""
        argv = [
            "verify", "--check", "margin-preservation", "--trials", "5000", "--seed", "9",
            "--param", "ks=[32, 64]",
        ]
        assert main(argv + ["--threads", "1"]) == 0
        single = capsys.readouterr().out
        assert main(argv + ["--threads", "3"]) == 0
        multi = capsys.readouterr().out

        assert single == multi

    def test_checks_listing(self, capsys):
        """Test that the registry listing names every check."""
        assert main(["checks"]) == 0
        out = capsys.readouterr().out
        assert "p-in-unit" in out and "loss-decomposition" in out

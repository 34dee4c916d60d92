"""
Tests for the lattice-approx CLI.

Exit codes: 0 on success, 1 on numerical failure, 2 on usage errors.
"""

import json

import pytest
from click.testing import CliRunner

from lattice_approx import __version__
from lattice_approx.cli import main
from lattice_approx.cli.error_handling import CLIError, suggestion_for
from lattice_approx.cli.utils import parse_n_range, parse_window
from lattice_approx.core.systems import set_threads
from lattice_approx.core.exceptions import (
    BoundarySingularityError,
    PreconditionError,
    SearchExhaustedError,
    SpecParseError,
)
from lattice_approx.core.experiments import ExperimentRecord, RecordWriter, read_records


@pytest.fixture
def runner():
    """Create a Click test runner."""
    return CliRunner()


def json_record(output: str) -> dict:
    """The JSON object line among the command's output lines."""
    lines = [line for line in output.splitlines() if line.startswith("{")]
    assert lines, output
    return json.loads(lines[-1])


@pytest.fixture
def records_file(tmp_path):
    """Synthetic sweep output with exact power laws."""
    path = tmp_path / "records.csv"
    with RecordWriter(path) as writer:
        for N in (5, 10, 20, 40, 80):
            writer.write(ExperimentRecord(method="cos", d=1, N=N, eps2=2.0 * N**-1.5))
            writer.write(ExperimentRecord(method="cheb", d=1, N=N, eps2=N**-2.5))
            for eta, rate in ((2.0, -1.9), (2.5, -2.5)):
                writer.write(
                    ExperimentRecord(method=f"erf:eta={eta:g}", d=1, N=N, eta=eta, eps2=N**rate)
                )
    return path


class TestMainCLI:
    """Test the command group."""

    def test_help(self, runner):
        result = runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        for command in ("lattice", "approx", "sweep", "decay", "best-eta", "config", "cache"):
            assert command in result.output

    def test_version(self, runner):
        result = runner.invoke(main, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_unknown_command(self, runner):
        assert runner.invoke(main, ["frobnicate"]).exit_code == 2


class TestLatticeCommands:
    """Test lattice search, index sets and the cache."""

    def test_lattice(self, runner):
        result = runner.invoke(main, ["lattice", "--d", "2", "--N", "8", "--strategy", "cbc"])
        assert result.exit_code == 0, result.output
        data = json_record(result.output)
        assert data["card_I"] == 113
        assert data["verified"] is True
        assert data["seed"] is None
        assert len(data["z"]) == 2
        assert data["M"] >= 113

    def test_lattice_is_cached(self, runner, isolated_environment):
        args = ["lattice", "--d", "2", "--N", "6", "--seed", "4"]
        first = json_record(runner.invoke(main, args).output)
        cache_file = isolated_environment / "lattices.jsonl"
        assert cache_file.exists()
        assert len(cache_file.read_text().splitlines()) == 1

        second = json_record(runner.invoke(main, args).output)
        assert (first["M"], first["z"]) == (second["M"], second["z"])
        assert len(cache_file.read_text().splitlines()) == 1

        listing = runner.invoke(main, ["cache", "list"])
        assert listing.exit_code == 0
        assert "Lattice Cache" in listing.output

    def test_no_cache(self, runner, isolated_environment):
        result = runner.invoke(main, ["lattice", "--d", "1", "--N", "5", "--no-cache"])
        assert result.exit_code == 0
        assert not (isolated_environment / "lattices.jsonl").exists()

    def test_cache_export_import_clear(self, runner, tmp_path):
        runner.invoke(main, ["lattice", "--d", "1", "--N", "5"])
        exported = tmp_path / "export.jsonl"
        assert runner.invoke(main, ["cache", "export", str(exported)]).exit_code == 0
        assert exported.exists()

        result = runner.invoke(main, ["cache", "clear", "--yes"])
        assert result.exit_code == 0
        assert "Removed 1" in result.output

        result = runner.invoke(main, ["cache", "import", str(exported)])
        assert "Imported 1" in result.output

    def test_cache_clear_can_be_cancelled(self, runner, isolated_environment):
        runner.invoke(main, ["lattice", "--d", "1", "--N", "5"])
        result = runner.invoke(main, ["cache", "clear"], input="n\n")
        assert "Cancelled" in result.output
        assert (isolated_environment / "lattices.jsonl").exists()

    def test_index_set_count(self, runner):
        result = runner.invoke(main, ["index-set", "--d", "2", "--N", "8", "--count"])
        assert result.exit_code == 0
        assert result.output.strip() == "113"
        result = runner.invoke(main, ["index-set", "--d", "2", "--N", "8", "--nonneg", "--count"])
        assert result.output.strip() == "37"

    def test_index_set_file(self, runner, tmp_path):
        out = tmp_path / "cross.txt"
        result = runner.invoke(main, ["index-set", "--d", "1", "--N", "3", "--out", str(out)])
        assert result.exit_code == 0
        assert out.read_text().splitlines() == ["1 3 full-cross", "-3", "-2", "-1", "0", "1", "2", "3"]

    def test_index_set_over_cap(self, runner):
        runner.invoke(main, ["config", "set", "index_sets.max_cardinality", "100"])
        result = runner.invoke(main, ["index-set", "--d", "2", "--N", "8"])
        assert result.exit_code == 1
        assert "cap" in result.output

    def test_lattice_difference_check(self, runner):
        args = ["lattice", "--d", "2", "--N", "8", "--strategy", "cbc", "--check-difference"]
        result = runner.invoke(main, args)
        assert result.exit_code == 0, result.output
        assert json_record(result.output)["difference_condition"] is True
        assert "difference_condition" not in json_record(runner.invoke(main, args[:-1]).output)

    def test_lattice_difference_check_respects_pair_cap(self, runner):
        runner.invoke(main, ["config", "set", "index_sets.max_pairs", "1000"])
        args = ["lattice", "--d", "2", "--N", "8", "--strategy", "cbc", "--check-difference"]
        result = runner.invoke(main, args)
        assert result.exit_code == 1
        assert "max_pairs" in result.output

        runner.invoke(main, ["config", "set", "index_sets.onthefly_threshold", "10"])
        result = runner.invoke(main, args)
        assert result.exit_code == 0, result.output
        assert json_record(result.output)["difference_condition"] is True

    def test_missing_option(self, runner):
        assert runner.invoke(main, ["lattice", "--d", "2"]).exit_code == 2


class TestApproxCommand:
    """Test single approximations."""

    def test_cheb(self, runner):
        result = runner.invoke(
            main, ["approx", "--method", "cheb", "--d", "1", "--N", "17", "--R", "2000"]
        )
        assert result.exit_code == 0, result.output
        data = json_record(result.output)
        assert data["method"] == "cheb"
        assert data["card_I"] == 18
        assert 0.0 < data["eps2"] < 1e-2
        assert data["epsinf"] >= data["eps2"] / 10
        assert data["wall_ms"] is None

    def test_transformed_max_error_is_undefined(self, runner):
        args = ["approx", "-m", "erf:eta=2.5", "--d", "2", "--N", "8", "--R", "500"]
        data = json_record(runner.invoke(main, args).output)
        assert data["epsinf"] == "undefined"
        assert data["eta"] == 2.5

        data = json_record(runner.invoke(main, args + ["--weighted-inf"]).output)
        assert data["epsinf_weighted"] > 0

    def test_save(self, runner, tmp_path):
        path = tmp_path / "cos.approx"
        args = ["approx", "-m", "cos", "--d", "2", "--N", "4", "--R", "100", "--save", str(path)]
        result = runner.invoke(main, args)
        assert result.exit_code == 0
        assert path.read_bytes().startswith(b"{")

    def test_invalid_method_is_usage_error(self, runner):
        result = runner.invoke(main, ["approx", "-m", "erf", "--d", "1", "--N", "4"])
        assert result.exit_code == 2
        assert "eta" in result.output

    def test_unknown_function(self, runner):
        result = runner.invoke(main, ["approx", "-m", "cos", "--d", "1", "--N", "4", "--function", "runge"])
        assert result.exit_code == 2

    def test_singular_periodization_is_numerical_failure(self, runner):
        result = runner.invoke(main, ["approx", "-m", "log:eta=0.5", "--d", "1", "--N", "4", "--R", "10"])
        assert result.exit_code == 1
        assert "BoundarySingularityError" in result.output

    def test_cheb_equiv(self, runner):
        result = runner.invoke(main, ["cheb-equiv", "--N", "16", "--grid", "101"])
        assert result.exit_code == 0
        assert "101 point(s)" in result.output


class TestSweepCommands:
    """Test sweeps and record analysis."""

    def test_sweep_csv(self, runner, tmp_path):
        out = tmp_path / "d1.csv"
        args = ["sweep", "--d", "1", "--methods", "cos,erf", "--etas", "2.5", "--N", "2..4"]
        result = runner.invoke(main, args + ["--R", "200", "--out", str(out), "--csv"])
        assert result.exit_code == 0, result.output
        assert "6/6 record(s)" in result.output
        records = read_records(out)
        assert [r.method for r in records[:2]] == ["cos", "erf:eta=2.5"]
        assert [r.N for r in records[::2]] == [2, 3, 4]

    def test_sweep_is_reproducible(self, runner, tmp_path):
        outputs = []
        for name in ("a.jsonl", "b.jsonl"):
            out = tmp_path / name
            args = ["sweep", "--d", "2", "--methods", "cheb,log:eta=4", "--N", "1..5:2", "--R", "100"]
            assert runner.invoke(main, args + ["--json", "--out", str(out)]).exit_code == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_sweep_default_output_name(self, runner, isolated_environment):
        args = ["sweep", "--d", "1", "--methods", "cos", "--N", "3", "--R", "50"]
        assert runner.invoke(main, args).exit_code == 0
        assert (isolated_environment / "sweep-d1.csv").exists()

    def test_sweep_format_conflict(self, runner):
        args = ["sweep", "--d", "1", "--N", "3", "--csv", "--json"]
        assert runner.invoke(main, args).exit_code == 2

    def test_sweep_bad_range(self, runner):
        assert runner.invoke(main, ["sweep", "--d", "1", "--N", "9..3"]).exit_code == 2

    def test_sweep_all_failed(self, runner):
        runner.invoke(main, ["config", "set", "index_sets.max_cardinality", "2"])
        args = ["sweep", "--d", "1", "--methods", "cos", "--N", "8", "--R", "50"]
        result = runner.invoke(main, args)
        assert result.exit_code == 1
        assert "0/1 record(s)" in result.output

    def test_decay(self, runner, records_file):
        result = runner.invoke(main, ["decay", str(records_file), "--window", "5..80", "--compare"])
        assert result.exit_code == 0, result.output
        assert "-1.50" in result.output
        assert "-2.50" in result.output
        assert "Reference" in result.output

    def test_decay_insufficient_data(self, runner, records_file):
        result = runner.invoke(main, ["decay", str(records_file), "--window", "5..10"])
        assert result.exit_code == 0
        assert "-" in result.output

        empty = records_file.parent / "empty.csv"
        with RecordWriter(empty) as writer:
            writer.write(ExperimentRecord(method="cos", d=1, N=4, error="failed"))
        assert runner.invoke(main, ["decay", str(empty)]).exit_code == 1

    def test_decay_bad_file(self, runner, tmp_path):
        path = tmp_path / "notes.csv"
        path.write_text("a,b\n1,2\n")
        assert runner.invoke(main, ["decay", str(path)]).exit_code == 2

    def test_best_eta(self, runner, records_file):
        result = runner.invoke(main, ["best-eta", str(records_file)])
        assert result.exit_code == 0
        assert "erf" in result.output
        assert "2.5" in result.output

    def test_reference(self, runner, records_file):
        result = runner.invoke(main, ["reference", "--d", "7"])
        assert result.exit_code == 0
        assert "3.3234e-04" in result.output
        assert "Reference eps2, d=1" not in result.output

        result = runner.invoke(main, ["reference", "--compare", str(records_file)])
        assert result.exit_code == 0
        assert "Records vs reference" in result.output
        assert "cheb" in result.output


class TestConfigCommands:
    """Test the config commands."""

    def test_config_show(self, runner):
        result = runner.invoke(main, ["config", "show"])
        assert result.exit_code == 0
        assert "Lattice Search" in result.output

    def test_config_set_and_get(self, runner, isolated_environment):
        result = runner.invoke(main, ["config", "set", "lattice.strategy", "cbc"])
        assert result.exit_code == 0
        assert (isolated_environment / "config.yaml").exists()

        result = runner.invoke(main, ["config", "get", "lattice.strategy"])
        assert "lattice.strategy = cbc" in result.output

    def test_config_set_parses_scalars(self, runner):
        runner.invoke(main, ["config", "set", "lattice.use_cache", "false"])
        result = runner.invoke(main, ["config", "get", "lattice.use_cache"])
        assert "False" in result.output

    def test_config_set_invalid(self, runner):
        assert runner.invoke(main, ["config", "set", "lattice.colour", "blue"]).exit_code == 2
        assert runner.invoke(main, ["config", "set", "sweep.R", "-1"]).exit_code == 2

    def test_explicit_config_file(self, runner, tmp_path):
        path = tmp_path / "other.yaml"
        path.write_text("lattice:\n  strategy: cbc\n")
        result = runner.invoke(main, ["--config", str(path), "config", "get", "lattice.strategy"])
        assert "cbc" in result.output


class TestCLIUtils:
    """Test parsing helpers and error translation."""

    @pytest.mark.parametrize(
        "text,expected",
        [
            ("17", [17]),
            ("1..5", [1, 2, 3, 4, 5]),
            ("1..9:4", [1, 5, 9]),
            ("1..3,10,2", [1, 2, 3, 10]),
        ],
    )
    def test_parse_n_range(self, text, expected):
        assert parse_n_range(text) == expected

    @pytest.mark.parametrize("text", ["", "0", "5..1", "a..b", "1..5:0", "1-5"])
    def test_parse_n_range_errors(self, text):
        with pytest.raises(SpecParseError):
            parse_n_range(text)

    def test_parse_window(self):
        assert parse_window("70..140") == (70, 140)
        with pytest.raises(SpecParseError):
            parse_window("70")

    def test_set_threads(self):
        assert set_threads(1) == 1
        assert set_threads(None) >= 1

    def test_suggestions(self):
        assert "cbc" in suggestion_for(SearchExhaustedError("grow-M-random-z", 64, 1009))
        assert "density weight" in suggestion_for(BoundarySingularityError("erf:eta=2"))
        assert suggestion_for(PreconditionError("something")) is None

    def test_cli_error_display(self, capsys):
        CLIError("Boom", suggestion="Try again", context={"type": "X"}).display()
        captured = capsys.readouterr()
        assert "Boom" in captured.err
        assert "Try again" in captured.err

"""Tests for the acdgcl command-line interface."""

import csv

import pytest
from click.testing import CliRunner

from acdgcl import __version__
from acdgcl.cli import cli
from acdgcl.config import DATA_DIR_ENV, save_config
from acdgcl.evaluation import ABLATION_FILE, EvalReport
from acdgcl.graphdata import write_tu_dataset


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def data_dir(tmp_path, dataset_factory):
    return write_tu_dataset(dataset_factory(), tmp_path / "RANDOM")


@pytest.fixture
def config_file(tmp_path, tiny_config):
    return save_config(tiny_config.with_overrides(epochs=1), tmp_path / "tiny.json")


@pytest.fixture
def trained(runner, tmp_path, data_dir, config_file):
    """Directory of a one-epoch training run."""
    out = tmp_path / "run"
    result = runner.invoke(
        cli, ["train", "--data", str(data_dir), "--config", str(config_file), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    return out


class TestGroup:
    """Tests for top-level options."""

    def test_version(self, runner):
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_help_lists_commands(self, runner):
        result = runner.invoke(cli, ["--help"])
        for command in ("train", "eval", "ablate", "sweep", "gradcheck", "info"):
            assert command in result.output


class TestInfo:
    """Tests for the info command."""

    def test_shows_statistics(self, runner, toy_tu_dir):
        result = runner.invoke(cli, ["info", "--data", str(toy_tu_dir)])
        assert result.exit_code == 0, result.output
        assert "TOY" in result.output
        assert "Graph classes" in result.output

    def test_data_from_environment(self, runner, toy_tu_dir, monkeypatch):
        monkeypatch.setenv(DATA_DIR_ENV, str(toy_tu_dir))
        result = runner.invoke(cli, ["info"])
        assert result.exit_code == 0, result.output
        assert "TOY" in result.output

    def test_no_dataset(self, runner, monkeypatch):
        monkeypatch.delenv(DATA_DIR_ENV, raising=False)
        result = runner.invoke(cli, ["info"])
        assert result.exit_code == 1
        assert DATA_DIR_ENV in result.output

    def test_bad_dataset_directory(self, runner, tmp_path):
        result = runner.invoke(cli, ["info", "--data", str(tmp_path)])
        assert result.exit_code == 1
        assert "no TU dataset" in result.output


class TestTrain:
    """Tests for the train command."""

    def test_writes_run_files(self, trained):
        for name in ("checkpoint.json", "metrics.csv", "config.json"):
            assert (trained / name).is_file()

    def test_prints_epochs(self, runner, tmp_path, data_dir, config_file):
        result = runner.invoke(
            cli,
            ["train", "-d", str(data_dir), "-c", str(config_file), "-o", str(tmp_path / "x"), "--seed", "3"],
        )
        assert result.exit_code == 0, result.output
        assert "epoch" in result.output
        assert "seed 3" in result.output

    def test_missing_config(self, runner, tmp_path, data_dir):
        result = runner.invoke(
            cli,
            ["train", "-d", str(data_dir), "-c", str(tmp_path / "nope.json"), "-o", str(tmp_path / "x")],
        )
        assert result.exit_code == 1
        assert "config file not found" in result.output


class TestEval:
    """Tests for the eval command."""

    def test_writes_fold_table(self, runner, tmp_path, trained, data_dir):
        out = tmp_path / "eval.csv"
        result = runner.invoke(
            cli,
            [
                "eval",
                "--data", str(data_dir),
                "--checkpoint", str(trained / "checkpoint.json"),
                "--folds", "2",
                "--seeds", "2",
                "--out", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        with out.open(newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["seed", "fold", "accuracy"]
        assert [(r[0], r[1]) for r in rows[1:]] == [("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")]
        report = EvalReport.model_validate_json(out.with_suffix(".json").read_text())
        assert report.seeds == [0, 1]
        assert report.fold_accuracies == [float(r[2]) for r in rows[1:]]

    def test_invalid_fold_count(self, runner, tmp_path, trained, data_dir):
        result = runner.invoke(
            cli,
            [
                "eval",
                "-d", str(data_dir),
                "--checkpoint", str(trained / "checkpoint.json"),
                "--folds", "1",
                "-o", str(tmp_path / "eval.csv"),
            ],
        )
        assert result.exit_code == 1
        assert "invalid probe settings" in result.output

    def test_missing_checkpoint(self, runner, tmp_path, data_dir):
        result = runner.invoke(
            cli,
            ["eval", "-d", str(data_dir), "--checkpoint", str(tmp_path / "none.json"), "-o", str(tmp_path / "e.csv")],
        )
        assert result.exit_code == 1
        assert "cannot read checkpoint" in result.output


class TestAblateAndSweep:
    """Tests for the ablate and sweep commands."""

    def test_ablate(self, runner, tmp_path, data_dir, config_file):
        out = tmp_path / "ablation"
        result = runner.invoke(
            cli, ["ablate", "-d", str(data_dir), "-c", str(config_file), "-o", str(out)]
        )
        assert result.exit_code == 0, result.output
        lines = (out / ABLATION_FILE).read_text().splitlines()
        assert [line.split(",")[0] for line in lines[1:]] == ["full", "no_intra", "no_inter", "no_adv"]

    def test_ablate_bad_seeds(self, runner, tmp_path, data_dir, config_file):
        result = runner.invoke(
            cli,
            ["ablate", "-d", str(data_dir), "-c", str(config_file), "-o", str(tmp_path), "--train-seeds", "a,b"],
        )
        assert result.exit_code == 1
        assert "invalid ablation settings" in result.output

    def test_sweep_reevaluate(self, runner, tmp_path, data_dir, config_file):
        out = tmp_path / "sweep.csv"
        result = runner.invoke(
            cli,
            [
                "sweep",
                "--axis", "epsilon",
                "--values", "0.1,0",
                "-d", str(data_dir),
                "-c", str(config_file),
                "--reevaluate",
                "-o", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        lines = out.read_text().splitlines()
        assert lines[0] == "axis,value,mean,std,seed_std"
        assert [line.split(",")[1] for line in lines[1:]] == ["0.0", "0.1"]

    def test_sweep_unknown_axis(self, runner, tmp_path, data_dir):
        result = runner.invoke(
            cli, ["sweep", "--axis", "lr", "--values", "0.1", "-d", str(data_dir), "-o", str(tmp_path / "s.csv")]
        )
        assert result.exit_code == 1
        assert "unknown sweep axis" in result.output


class TestGradcheck:
    """Tests for the gradcheck command."""

    def test_passes(self, runner):
        result = runner.invoke(cli, ["gradcheck", "--samples", "15"])
        assert result.exit_code == 0, result.output
        assert "pass" in result.output
        assert "FAIL" not in result.output

    def test_impossible_tolerance_fails(self, runner):
        result = runner.invoke(cli, ["gradcheck", "--samples", "15", "--tol", "0"])
        assert result.exit_code == 1
        assert "gradient check failed" in result.output

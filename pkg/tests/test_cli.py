import json

from click.testing import CliRunner
import pytest

from leo_spectra.cli import (
    EXIT_CONFIG,
    EXIT_CONVERGENCE,
    EXIT_FAILURE,
    collect_overrides,
    exit_code_for,
    main,
)
from leo_spectra.utils.errors import ConfigError, ConvergenceError, GeometryError

TINY_SWEEP = ["--set", "sweep.delta_min_km=50", "--set", "sweep.delta_max_km=200", "--set", "sweep.points=3"]


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def test_exit_codes():
    assert exit_code_for(ConfigError("bad")) == EXIT_CONFIG
    assert exit_code_for(ConvergenceError("slow")) == EXIT_CONVERGENCE
    assert exit_code_for(GeometryError("odd")) == EXIT_FAILURE


def test_collect_overrides(tmp_path):
    overrides = collect_overrides(("scenario.snr_db=8",), tmp_path / "x", seed=4, trials=10, workers=2)
    assert overrides[0] == "scenario.snr_db=8"
    assert f"output={json.dumps(str(tmp_path / 'x'))}" in overrides
    assert "montecarlo.seed=4" in overrides
    assert "montecarlo.trials=10" in overrides
    assert "montecarlo.workers=2" in overrides


def test_list(runner):
    result = runner.invoke(main, ["list"])
    assert result.exit_code == 0
    for command in ("regular-sweep", "random-sweep", "bound-report"):
        assert command in result.output


def test_show_config(runner):
    result = runner.invoke(main, ["show-config", "reuse-table", "--set", "scenario.snr_db=8"])
    assert result.exit_code == 0
    assert "reuse-table" in result.output
    assert "snr_db" in result.output
    assert "8.0" in result.output


def test_regular_sweep_writes_outputs(runner, tmp_path):
    out = tmp_path / "sweep"
    result = runner.invoke(main, ["regular-sweep", *TINY_SWEEP, "-o", str(out)])
    assert result.exit_code == 0, result.output

    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0].startswith("delta [km],efficiency [bits/s/Hz/1000km2]")
    assert len(lines) == 4

    sidecar = json.loads((tmp_path / "sweep.json").read_text())
    assert sidecar["command"] == "regular-sweep"
    assert sidecar["sweep"]["points"] == 3


def test_rerun_reproduces_outputs(runner, tmp_path):
    out = tmp_path / "first"
    assert runner.invoke(main, ["regular-sweep", *TINY_SWEEP, "-o", str(out)]).exit_code == 0
    first = (tmp_path / "first.csv").read_text()

    (tmp_path / "first.csv").unlink()
    result = runner.invoke(main, ["rerun", str(tmp_path / "first.json")])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "first.csv").read_text() == first


def test_sidecar_as_config(runner, tmp_path):
    assert runner.invoke(main, ["regular-sweep", *TINY_SWEEP, "-o", str(tmp_path / "a")]).exit_code == 0
    result = runner.invoke(
        main, ["regular-sweep", "--config", str(tmp_path / "a.json"), "-o", str(tmp_path / "b")]
    )
    assert result.exit_code == 0, result.output
    assert (tmp_path / "a.csv").read_text() == (tmp_path / "b.csv").read_text()


def test_random_sweep_is_seeded(runner, tmp_path):
    args = [
        "random-sweep",
        "--set", "sweep.delta_km=[100]",
        "--set", "random.window_km=[500, 500]",
        "--set", "random.num_subbands=[1, 3]",
        "--set", "random.reuse_factors=[1, 2]",
        "--trials", "3",
        "--seed", "17",
    ]
    assert runner.invoke(main, [*args, "-o", str(tmp_path / "one")]).exit_code == 0
    assert runner.invoke(main, [*args, "-o", str(tmp_path / "two")]).exit_code == 0
    assert (tmp_path / "one.csv").read_text() == (tmp_path / "two.csv").read_text()


def test_invalid_value_exits_with_config_code(runner, tmp_path):
    result = runner.invoke(main, ["regular-sweep", "--set", "scenario.alpha=1.5", "-o", str(tmp_path / "x")])
    assert result.exit_code == EXIT_CONFIG
    assert not (tmp_path / "x.csv").exists()


def test_bad_config_file(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"scenario": {"snr_db": }}')
    result = runner.invoke(main, ["regular-sweep", "--config", str(bad)])
    assert result.exit_code == EXIT_CONFIG
    assert "line 1" in " ".join(result.output.split())


def test_bad_override_syntax(runner):
    result = runner.invoke(main, ["bound-report", "--set", "nonsense"])
    assert result.exit_code == EXIT_CONFIG

import json
import logging
from pathlib import Path

import pytest

from leo_spectra.config.config import (
    Command,
    ExperimentSpec,
    RandomConfig,
    ScenarioConfig,
    SweepConfig,
)
from leo_spectra.config.loader import (
    PROJECT_DIR_NAME,
    get_system_config_path,
    load_config,
    parse_overrides,
)
from leo_spectra.utils.errors import ConfigError


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults(tmp_path):
    spec = load_config(cwd=tmp_path)
    assert spec.command == Command.REGULAR_SWEEP
    assert spec.scenario.altitude_km == 550.0
    assert spec.scenario.alpha == 2.5
    assert spec.scenario.gamma_g_deg == 90.0
    assert spec.montecarlo.workers == 1


def test_layers_merge_in_order(tmp_path):
    _write(get_system_config_path(), "[scenario]\nsnr_db = 5.0\nalpha = 3.0\n")
    _write(tmp_path / PROJECT_DIR_NAME / "config.toml", "[scenario]\nalpha = 2.8\n")
    experiment = _write(
        tmp_path / "exp.json",
        json.dumps({"scenario": {"sat_beamwidth_deg": 5.0}, "sweep": {"points": 3}}),
    )

    spec = load_config(
        cwd=tmp_path,
        config_path=experiment,
        overrides=["scenario.snr_db=8", "montecarlo.seed=7"],
        command="bound-report",
    )
    assert spec.scenario.snr_db == 8.0
    assert spec.scenario.alpha == 2.8
    assert spec.scenario.sat_beamwidth_deg == 5.0
    assert spec.sweep.points == 3
    assert spec.montecarlo.seed == 7
    assert spec.command == Command.BOUND_REPORT


def test_invalid_project_config_is_skipped(tmp_path, caplog):
    _write(tmp_path / PROJECT_DIR_NAME / "config.toml", "[scenario\nalpha = ")
    with caplog.at_level(logging.WARNING):
        spec = load_config(cwd=tmp_path)
    assert spec.scenario.alpha == 2.5
    assert "Skipping invalid project config" in caplog.text


def test_json_error_location(tmp_path):
    bad = _write(tmp_path / "bad.json", '{\n  "scenario": {\n    "snr_db": ,\n  }\n}')
    with pytest.raises(ConfigError, match="line 3, column"):
        load_config(cwd=tmp_path, config_path=bad)


def test_toml_experiment_file(tmp_path):
    path = _write(tmp_path / "exp.toml", 'command = "reuse-table"\n[reuse_table]\ndelta_km = [25.0]\n')
    spec = load_config(cwd=tmp_path, config_path=path)
    assert spec.command == Command.REUSE_TABLE
    assert spec.reuse_table.delta_km == [25.0]


def test_unknown_key_rejected(tmp_path):
    with pytest.raises(ConfigError, match="scenario.snr"):
        load_config(cwd=tmp_path, overrides=["scenario.snr=3"])


def test_invalid_reuse_numbers(tmp_path):
    with pytest.raises(ConfigError, match="valid values"):
        load_config(cwd=tmp_path, overrides=["random.num_subbands=[1, 5]"])


def test_parse_overrides():
    assert parse_overrides(["a.b=1", "a.c=[1, 2]", "d=hello", "e=true"]) == {
        "a": {"b": 1, "c": [1, 2]},
        "d": "hello",
        "e": True,
    }


@pytest.mark.parametrize("pairs", [["novalue"], ["=3"], ["a=1", "a.b=2"]])
def test_malformed_overrides(pairs):
    with pytest.raises(ConfigError):
        parse_overrides(pairs)


def test_sweep_values():
    assert SweepConfig(delta_km=[10.0, 20.0]).values() == [10.0, 20.0]
    assert SweepConfig(points=1, delta_min_km=7.0).values() == [7.0]

    grid = SweepConfig(delta_min_km=5.0, delta_max_km=500.0, points=3).values()
    assert grid == pytest.approx([5.0, 50.0, 500.0])

    linear = SweepConfig(delta_min_km=1.0, delta_max_km=3.0, points=3, log_spacing=False)
    assert linear.values() == pytest.approx([1.0, 2.0, 3.0])


def test_sweep_validation():
    with pytest.raises(ValueError):
        SweepConfig(delta_min_km=100.0, delta_max_km=10.0)
    with pytest.raises(ValueError):
        SweepConfig(delta_km=[])


def test_scenario_build():
    psd_limited = ScenarioConfig().build()
    assert psd_limited.snr_db == pytest.approx(10.0)

    power_limited = ScenarioConfig(power_snr_db=8.0, psd_headroom=10.0).build()
    assert power_limited.psd_max == pytest.approx(10 * power_limited.p_max)


def test_random_window():
    config = RandomConfig()
    assert config.window_for(50.0) == (1500.0, 1500.0)
    assert config.window_for(200.0) == (3000.0, 3000.0)
    assert RandomConfig(window_km=(400.0, 300.0)).window_for(200.0) == (400.0, 300.0)


def test_shuffle_patch_must_be_power_of_two():
    with pytest.raises(ValueError):
        ExperimentSpec(shuffle={"patch_sites": 48})


def test_spec_dump_round_trips():
    spec = ExperimentSpec(command=Command.RANDOM_SWEEP, random={"num_subbands": [1, 4]})
    assert ExperimentSpec(**json.loads(json.dumps(spec.to_dict()))) == spec

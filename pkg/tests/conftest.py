import numpy as np
import pytest

from leo_spectra.physics.geometry import EarthModel
from leo_spectra.physics.link import Scenario


@pytest.fixture
def earth() -> EarthModel:
    return EarthModel(altitude_km=550.0)


@pytest.fixture
def scen() -> Scenario:
    """Wide-beam scenario at 10 dB SNR"""
    return Scenario.from_snr_db(10.0, 10.0, 20.0)


@pytest.fixture
def narrow_scen() -> Scenario:
    """Narrow beams inside 40° beam regions"""
    return Scenario.from_snr_db(10.0, 5.0, 10.0, gamma_s_deg=40.0, gamma_g_deg=40.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def isolated_user_config(tmp_path, monkeypatch):
    """Keep the developer's own user config out of the tests"""
    monkeypatch.setattr(
        "leo_spectra.config.loader.get_config_dir", lambda: tmp_path / "user-config"
    )

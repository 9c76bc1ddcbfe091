import json

import numpy as np
import pytest

from leo_spectra.utils.errors import (
    ConfigError,
    GeometryError,
    InvalidIndexError,
    SpectraError,
    SpectrumError,
    format_parameter,
)


def test_message_carries_units_for_lengths_and_angles():
    err = GeometryError(
        "Satellite below the horizon",
        details={"altitude_km": 550.0, "theta": 1.6123456789, "n": 3},
    )

    text = str(err)
    assert text.startswith("Satellite below the horizon (")
    assert "altitude_km=550 km" in text
    assert "theta=1.61235 rad" in text
    assert "n=3" in text


def test_unitless_parameters_are_left_bare():
    assert format_parameter("alpha", 2.5) == "alpha=2.5"
    assert format_parameter("delta", np.float64(100.0)) == "delta=100 km"


def test_long_arrays_are_summarized():
    err = SpectraError("Bad spacings", details={"delta": np.linspace(10.0, 200.0, 40)})
    assert "delta=[40 values] km" in str(err)


def test_to_dict_is_json_safe_with_numpy_values():
    err = SpectrumError(
        "No valid plan",
        nearest_valid=[4, 7],
        details={"L": np.float64(120.0), "m": np.int64(5), "window": np.array([1000.0, 800.0])},
    )

    payload = err.to_dict()
    assert payload["type"] == "SpectrumError"
    assert payload["details"]["L"] == 120.0
    assert isinstance(payload["details"]["m"], int)
    assert payload["details"]["window"] == [1000.0, 800.0]
    assert payload["units"] == {"L": "km", "window": "km"}
    json.dumps(payload)


def test_cause_is_appended():
    err = ConfigError("Cannot read config", config_file="a.toml", cause=OSError("denied"))
    assert str(err) == "Cannot read config (config_file=a.toml): denied"
    assert err.to_dict()["cause"] == "denied"


def test_invalid_index_names_both_indices():
    with pytest.raises(InvalidIndexError) as info:
        raise InvalidIndexError(1, 2)
    assert info.value.to_dict()["details"] == {"i": 1, "j": 2}
    assert info.value.to_dict()["units"] == {}

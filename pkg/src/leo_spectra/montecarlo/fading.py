from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from importlib import resources
import json
import logging
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from leo_spectra.utils.errors import ConfigError, SpectraError

logger = logging.getLogger(__name__)

PROFILES_RESOURCE = "fading_profiles.json"


class FadingRegime(str, Enum):
    NONE = "none"
    LIGHT = "light"
    AVERAGE = "average"
    HEAVY = "heavy"


@dataclass(frozen=True)
class FadingParams:
    """Shadowed-Rician link power: scattered power 2b, LOS power ω with Nakagami order m"""

    b: float = 0.0
    m: float = 1.0
    omega: float = 0.0
    regime: FadingRegime = FadingRegime.NONE

    def __post_init__(self) -> None:
        if self.regime == FadingRegime.NONE:
            return
        if not (self.b > 0 and self.m > 0 and self.omega >= 0):
            raise SpectraError(
                "Fading needs b > 0, m > 0 and omega >= 0",
                details={"b": self.b, "m": self.m, "omega": self.omega},
            )

    @classmethod
    def none(cls) -> FadingParams:
        return cls()

    @property
    def mean_power(self) -> float:
        if self.regime == FadingRegime.NONE:
            return 1.0
        return 2 * self.b + self.omega


def load_fading_profiles(path: str | Path | None = None) -> dict[FadingRegime, FadingParams]:
    """Read the (b, m, omega) triples, from `path` or from the shipped profile file"""
    try:
        if path is None:
            text = resources.files("leo_spectra.config").joinpath(PROFILES_RESOURCE).read_text("utf-8")
            source = PROFILES_RESOURCE
        else:
            text = Path(path).read_text(encoding="utf-8")
            source = str(path)
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"Invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}",
            config_file=str(path or PROFILES_RESOURCE),
        ) from e
    except OSError as e:
        raise ConfigError(f"Failed to read fading profiles: {e}", config_file=str(path)) from e

    profiles = {FadingRegime.NONE: FadingParams.none()}
    for name, values in raw.items():
        try:
            regime = FadingRegime(name)
            profiles[regime] = FadingParams(
                b=float(values["b"]), m=float(values["m"]), omega=float(values["omega"]), regime=regime
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(
                f"Bad fading profile '{name}': {e}", config_key=f"fading.{name}", config_file=source
            ) from e
    logger.debug(f"Loaded fading profiles {sorted(r.value for r in profiles)} from {source}")
    return profiles


def sample_shadowed_rician(
    params: FadingParams, rng: np.random.Generator, size: int | tuple[int, ...] | None = None
) -> NDArray[np.float64] | float:
    """Draw ξ = |A + Z|², A² ~ Gamma(m, ω/m), Z circular Gaussian of total power 2b"""
    if params.regime == FadingRegime.NONE:
        return 1.0 if size is None else np.ones(size)

    los_power = rng.gamma(shape=params.m, scale=params.omega / params.m, size=size)
    los = np.sqrt(los_power)
    scale = np.sqrt(params.b)
    real = los + scale * rng.standard_normal(size)
    imag = scale * rng.standard_normal(size)
    xi = real**2 + imag**2
    return float(xi) if size is None else xi


def apply_fading(
    gains: NDArray[np.float64], params: FadingParams, rng: np.random.Generator
) -> NDArray[np.float64]:
    """Independent power gain per beam-terminal pair"""
    if params.regime == FadingRegime.NONE:
        return gains
    return gains * sample_shadowed_rician(params, rng, gains.shape)

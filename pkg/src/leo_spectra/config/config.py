from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from leo_spectra.analysis.regular import Truncation
from leo_spectra.montecarlo.fading import FadingParams, FadingRegime, load_fading_profiles
from leo_spectra.montecarlo.sampling import SpacingConvention
from leo_spectra.physics.antenna import PatternKind
from leo_spectra.physics.geometry import EarthMode
from leo_spectra.physics.link import Scenario
from leo_spectra.spectrum.reuse import valid_reuse_numbers


class Command(str, Enum):
    REGULAR_SWEEP = "regular-sweep"
    RANDOM_SWEEP = "random-sweep"
    SHUFFLE_COMPARE = "shuffle-compare"
    PLANAR_VS_SPHERICAL = "planar-vs-spherical"
    REUSE_TABLE = "reuse-table"
    BOUND_REPORT = "bound-report"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _check_reuse_numbers(values: list[int]) -> None:
    if not values:
        raise ValueError("num_subbands must not be empty")
    valid = set(valid_reuse_numbers(max(max(values), 1)))
    bad = [m for m in values if m not in valid]
    if bad:
        raise ValueError(
            f"num_subbands {bad} are not of the form m² + mn + n²; valid values: {sorted(valid)}"
        )


class ScenarioConfig(_Section):
    altitude_km: float = Field(default=550.0, gt=0)
    earth_radius_km: float = Field(default=6378.0, gt=0)
    alpha: float = Field(default=2.5, ge=2.0)
    sat_beamwidth_deg: float = Field(default=10.0, gt=0, le=90)
    gs_beamwidth_deg: float = Field(default=20.0, gt=0, le=90)
    pattern: PatternKind = PatternKind.BESSEL
    # Serving-link SNR psd_max·h^(-α)/σ²
    snr_db: float = 10.0
    # When set, P_max·h^(-α)/(B·σ²) instead, with psd_max = psd_headroom·P_max/B
    power_snr_db: float | None = None
    psd_headroom: float = Field(default=10.0, gt=0)
    gamma_s_deg: float = Field(default=90.0, gt=0, le=180)
    gamma_g_deg: float = Field(default=90.0, gt=0, le=180)
    bandwidth: float = Field(default=1.0, gt=0)
    mode: EarthMode = EarthMode.PLANAR

    def build(self) -> Scenario:
        common: dict[str, Any] = dict(
            altitude_km=self.altitude_km,
            alpha=self.alpha,
            gamma_s_deg=self.gamma_s_deg,
            gamma_g_deg=self.gamma_g_deg,
            pattern=self.pattern,
            earth_radius_km=self.earth_radius_km,
            mode=self.mode,
            bandwidth=self.bandwidth,
        )
        if self.power_snr_db is not None:
            return Scenario.from_power_snr_db(
                self.power_snr_db,
                self.sat_beamwidth_deg,
                self.gs_beamwidth_deg,
                psd_headroom=self.psd_headroom,
                **common,
            )
        return Scenario.from_snr_db(
            self.snr_db, self.sat_beamwidth_deg, self.gs_beamwidth_deg, **common
        )


class SweepConfig(_Section):
    """Spacing grid; an explicit `delta_km` list wins over the generated one"""

    delta_km: list[float] | None = None
    delta_min_km: float = Field(default=5.0, gt=0)
    delta_max_km: float = Field(default=500.0, gt=0)
    points: int = Field(default=100, ge=1)
    log_spacing: bool = True

    @model_validator(mode="after")
    def validate_grid(self) -> SweepConfig:
        if self.delta_km is not None:
            if not self.delta_km:
                raise ValueError("delta_km must not be empty")
            if any(d <= 0 for d in self.delta_km):
                raise ValueError("delta_km values must be positive")
        elif self.delta_min_km >= self.delta_max_km and self.points > 1:
            raise ValueError("delta_min_km must be below delta_max_km")
        return self

    def values(self) -> list[float]:
        if self.delta_km is not None:
            return list(self.delta_km)
        if self.points == 1:
            return [self.delta_min_km]
        make = np.geomspace if self.log_spacing else np.linspace
        return [float(d) for d in make(self.delta_min_km, self.delta_max_km, self.points)]


class TruncationConfig(_Section):
    cutoff_radius_multiplier: float = Field(default=20.0, gt=0)
    tail_tolerance: float = Field(default=1e-8, gt=0)
    max_rings: int = Field(default=300, ge=1)

    def build(self) -> Truncation:
        return Truncation(self.cutoff_radius_multiplier, self.tail_tolerance, self.max_rings)


class OptimizerConfig(_Section):
    grid_points: int = Field(default=128, ge=3)
    rtol: float = Field(default=1e-4, gt=0)


class FadingConfig(_Section):
    regime: FadingRegime = FadingRegime.NONE
    profiles_path: Path | None = None

    def params(self) -> FadingParams:
        if self.regime == FadingRegime.NONE:
            return FadingParams.none()
        return load_fading_profiles(self.profiles_path)[self.regime]


class RandomConfig(_Section):
    # Fixed window, otherwise a square of side max(window_min_km, window_spacings·Δ)
    window_km: tuple[float, float] | None = None
    window_spacings: float = Field(default=15.0, gt=0)
    window_min_km: float = Field(default=1500.0, gt=0)
    beams_per_satellite: int = Field(default=1, ge=1)
    spacing_convention: SpacingConvention = SpacingConvention.DENSITY_MATCHED
    num_subbands: list[int] = Field(default_factory=lambda: [1])
    # Reuse distances tried per point, as multiples of Δ
    reuse_factors: list[float] = Field(
        default_factory=lambda: [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0]
    )
    hex_offset_km: tuple[float, float] = (0.0, 0.0)
    include_regular: bool = True
    # Sites per axis of the regular patch simulated under fading
    regular_patch_sites: int = Field(default=32, ge=4)

    @model_validator(mode="after")
    def validate_lists(self) -> RandomConfig:
        if self.regular_patch_sites % 2:
            raise ValueError("regular_patch_sites must be even")
        _check_reuse_numbers(self.num_subbands)
        if not self.reuse_factors or any(f <= 0 for f in self.reuse_factors):
            raise ValueError("reuse_factors must be a non-empty list of positive numbers")
        if self.window_km is not None and min(self.window_km) <= 0:
            raise ValueError("window_km must be positive")
        return self

    def window_for(self, delta: float) -> tuple[float, float]:
        if self.window_km is not None:
            return self.window_km
        side = max(self.window_min_km, self.window_spacings * delta)
        return (side, side)


class SphericalConfig(_Section):
    num_satellites: list[int] = Field(default_factory=lambda: [100, 250, 500, 1000, 2000])

    @model_validator(mode="after")
    def validate_counts(self) -> SphericalConfig:
        if not self.num_satellites or any(n < 1 for n in self.num_satellites):
            raise ValueError("num_satellites must be a non-empty list of positive counts")
        return self


class ShuffleConfig(_Section):
    # Lattice sites per axis of the toroidal patch
    patch_sites: int = Field(default=128, ge=4)

    @model_validator(mode="after")
    def validate_patch(self) -> ShuffleConfig:
        if self.patch_sites & (self.patch_sites - 1):
            raise ValueError("patch_sites must be a power of two")
        return self


class ReuseTableConfig(_Section):
    delta_km: list[float] = Field(default_factory=lambda: [50.0, 200.0])
    num_subbands: list[int] = Field(default_factory=lambda: [1, 4, 7, 12, 19])

    @model_validator(mode="after")
    def validate_table(self) -> ReuseTableConfig:
        _check_reuse_numbers(self.num_subbands)
        if not self.delta_km or any(d <= 0 for d in self.delta_km):
            raise ValueError("delta_km must be a non-empty list of positive spacings")
        return self


class MonteCarloConfig(_Section):
    trials: int = Field(default=200, ge=1)
    seed: int = Field(default=20240501, ge=0, lt=2**64)
    workers: int = Field(default=1, ge=1)
    confidence: float = Field(default=0.95, gt=0, lt=1)


class ExperimentSpec(_Section):
    command: Command = Command.REGULAR_SWEEP
    scenario: ScenarioConfig = Field(default_factory=ScenarioConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    truncation: TruncationConfig = Field(default_factory=TruncationConfig)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    fading: FadingConfig = Field(default_factory=FadingConfig)
    random: RandomConfig = Field(default_factory=RandomConfig)
    spherical: SphericalConfig = Field(default_factory=SphericalConfig)
    shuffle: ShuffleConfig = Field(default_factory=ShuffleConfig)
    reuse_table: ReuseTableConfig = Field(default_factory=ReuseTableConfig)
    montecarlo: MonteCarloConfig = Field(default_factory=MonteCarloConfig)
    output: Path = Path("results/experiment")

    def to_dict(self) -> dict[str, Any]:
        return self.model_dump(mode="json")

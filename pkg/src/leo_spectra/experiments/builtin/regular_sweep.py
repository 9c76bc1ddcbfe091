from __future__ import annotations
import math
from typing import Any

from leo_spectra.analysis.regular import eta, gamma, high_density_limit, optimize_delta, r_reg
from leo_spectra.config.config import Command, ExperimentSpec
from leo_spectra.experiments.base import Experiment, per_1000_km2
from leo_spectra.experiments.results import (
    DISTANCE_UNIT,
    EFFICIENCY_UNIT,
    Cell,
    Column,
    SweepResult,
)
from leo_spectra.physics.link import Scenario


class RegularSweepExperiment(Experiment):
    name = "regular_sweep"
    description = "Spectral efficiency of the regular configuration versus inter-satellite spacing"
    command = Command.REGULAR_SWEEP
    section = "sweep"

    def columns(self, spec: ExperimentSpec) -> list[Column]:
        return [
            Column("delta", DISTANCE_UNIT),
            Column("efficiency", EFFICIENCY_UNIT),
            Column("sinr", "dB"),
            Column("interference_to_noise", "dB"),
        ]

    def points(self, spec: ExperimentSpec) -> list[float]:
        return spec.sweep.values()

    def evaluate(
        self, spec: ExperimentSpec, scen: Scenario, point: float, index: int
    ) -> dict[str, Cell]:
        psd = scen.full_band_psd
        truncation = spec.truncation.build()
        inr = eta(psd, point, scen, truncation)
        sinr = gamma(psd, scen) / (inr + 1)
        return {
            "delta": point,
            "efficiency": per_1000_km2(r_reg(psd, point, scen, truncation)),
            "sinr": 10 * math.log10(sinr),
            "interference_to_noise": 10 * math.log10(inr) if inr > 0 else None,
        }

    def summarize(self, spec: ExperimentSpec, scen: Scenario, result: SweepResult) -> dict[str, Any]:
        deltas = spec.sweep.values()
        psd = scen.full_band_psd
        summary: dict[str, Any] = {
            "high_density_limit": per_1000_km2(high_density_limit(psd, scen)),
        }
        if len(deltas) > 1:
            best = optimize_delta(
                psd,
                scen,
                (min(deltas), max(deltas)),
                grid_points=spec.optimizer.grid_points,
                rtol=spec.optimizer.rtol,
                truncation=spec.truncation.build(),
            )
            summary.update(
                optimal_delta_km=best.delta,
                optimal_efficiency=per_1000_km2(best.efficiency),
                optimum_on_boundary=best.on_boundary,
            )
        return summary

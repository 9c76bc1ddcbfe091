from __future__ import annotations
from typing import Any

from leo_spectra.analysis.regular import (
    beam_region_upper_bound,
    count_in_beam_region,
    r_reg,
)
from leo_spectra.association.search import optimize_shuffle
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


class BoundReportExperiment(Experiment):
    name = "bound_report"
    description = "Regular and shuffled efficiency next to the beam-region upper bound"
    command = Command.BOUND_REPORT
    section = "sweep"

    def columns(self, spec: ExperimentSpec) -> list[Column]:
        return [
            Column("delta", DISTANCE_UNIT),
            Column("regular_efficiency", EFFICIENCY_UNIT),
            Column("shuffled_efficiency", EFFICIENCY_UNIT),
            Column("upper_bound", EFFICIENCY_UNIT),
            Column("bound_gap", "%"),
            Column("sites_in_beam_region"),
        ]

    def points(self, spec: ExperimentSpec) -> list[float]:
        return spec.sweep.values()

    def evaluate(
        self, spec: ExperimentSpec, scen: Scenario, point: float, index: int
    ) -> dict[str, Cell]:
        psd = scen.full_band_psd
        regular = r_reg(psd, point, scen, spec.truncation.build())
        sites = spec.shuffle.patch_sites
        shuffled = optimize_shuffle(scen, point, sites, sites, workers=spec.montecarlo.workers)
        bound = beam_region_upper_bound(scen, point, psd)
        best = max(regular, shuffled.efficiency)
        return {
            "delta": point,
            "regular_efficiency": per_1000_km2(regular),
            "shuffled_efficiency": per_1000_km2(shuffled.efficiency),
            "upper_bound": per_1000_km2(bound),
            "bound_gap": 100 * (bound - best) / bound if bound > 0 else 0.0,
            "sites_in_beam_region": count_in_beam_region(point, scen.altitude, scen.gamma_g),
        }

    def summarize(self, spec: ExperimentSpec, scen: Scenario, result: SweepResult) -> dict[str, Any]:
        regular = result.column("regular_efficiency")
        bound = result.column("upper_bound")
        return {"bound_dominates": all(b >= r for r, b in zip(regular, bound))}

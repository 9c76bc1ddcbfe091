from __future__ import annotations

from leo_spectra.association.search import optimize_shuffle
from leo_spectra.config.config import Command, ExperimentSpec
from leo_spectra.experiments.base import Experiment, per_1000_km2
from leo_spectra.experiments.results import DISTANCE_UNIT, EFFICIENCY_UNIT, Cell, Column
from leo_spectra.physics.link import Scenario


class ShuffleCompareExperiment(Experiment):
    name = "shuffle_compare"
    description = "Aligned association against the best shuffling association on a regular patch"
    command = Command.SHUFFLE_COMPARE
    section = "shuffle"

    def columns(self, spec: ExperimentSpec) -> list[Column]:
        return [
            Column("delta", DISTANCE_UNIT),
            Column("aligned_efficiency", EFFICIENCY_UNIT),
            Column("shuffled_efficiency", EFFICIENCY_UNIT),
            Column("improvement", "%"),
            Column("plan"),
            Column("plans_tried"),
        ]

    def points(self, spec: ExperimentSpec) -> list[float]:
        return spec.sweep.values()

    def evaluate(
        self, spec: ExperimentSpec, scen: Scenario, point: float, index: int
    ) -> dict[str, Cell]:
        sites = spec.shuffle.patch_sites
        best = optimize_shuffle(scen, point, sites, sites, workers=spec.montecarlo.workers)
        return {
            "delta": point,
            "aligned_efficiency": per_1000_km2(best.identity_efficiency),
            "shuffled_efficiency": per_1000_km2(best.efficiency),
            "improvement": 100 * best.improvement,
            "plan": best.plan.label(),
            "plans_tried": len(best.candidates),
        }

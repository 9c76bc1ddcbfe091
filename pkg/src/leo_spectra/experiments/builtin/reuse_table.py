from __future__ import annotations

from leo_spectra.config.config import Command, ExperimentSpec
from leo_spectra.experiments.base import Experiment
from leo_spectra.experiments.builtin.random_sweep import run_planar_point
from leo_spectra.experiments.results import DISTANCE_UNIT, EFFICIENCY_UNIT, Cell, Column
from leo_spectra.physics.link import Scenario


class ReuseTableExperiment(Experiment):
    name = "reuse_table"
    description = "Random-configuration efficiency for each number of subbands, one row per spacing"
    command = Command.REUSE_TABLE
    section = "reuse_table"

    def columns(self, spec: ExperimentSpec) -> list[Column]:
        cols = [Column("delta", DISTANCE_UNIT)]
        for m in spec.reuse_table.num_subbands:
            cols += [
                Column(f"efficiency_M{m}", EFFICIENCY_UNIT),
                Column(f"stderr_M{m}", EFFICIENCY_UNIT),
            ]
        return cols

    def points(self, spec: ExperimentSpec) -> list[float]:
        return list(spec.reuse_table.delta_km)

    def evaluate(
        self, spec: ExperimentSpec, scen: Scenario, point: float, index: int
    ) -> dict[str, Cell]:
        num_subbands = spec.reuse_table.num_subbands
        outcome = run_planar_point(spec, scen, point, num_subbands, index)
        row: dict[str, Cell] = {"delta": point}
        for m in num_subbands:
            row[f"efficiency_M{m}"] = outcome.summaries[m].mean
            row[f"stderr_M{m}"] = outcome.summaries[m].stderr
        return row

from __future__ import annotations
from typing import Any

from leo_spectra.config.config import Command, ExperimentSpec
from leo_spectra.experiments.base import Experiment
from leo_spectra.experiments.results import RATE_UNIT, Cell, Column, SweepResult
from leo_spectra.montecarlo.experiment import AllocationConfig, Metric, run_random_experiment
from leo_spectra.montecarlo.sampling import PlanarProjectedGenerator, SphericalBppGenerator
from leo_spectra.physics.link import Scenario


class PlanarVsSphericalExperiment(Experiment):
    """Typical-terminal rate on the sphere against the same draws projected onto planes.

    Both generators consume the same substream per trial, so every spherical draw is
    compared with its own projection.
    """

    name = "planar_vs_spherical"
    description = "Accuracy of the planar approximation against spherical random constellations"
    command = Command.PLANAR_VS_SPHERICAL
    section = "spherical"

    def columns(self, spec: ExperimentSpec) -> list[Column]:
        return [
            Column("num_satellites"),
            Column("spherical_rate", RATE_UNIT),
            Column("spherical_stderr", RATE_UNIT),
            Column("planar_rate", RATE_UNIT),
            Column("planar_stderr", RATE_UNIT),
            Column("relative_gap", "%"),
        ]

    def points(self, spec: ExperimentSpec) -> list[int]:
        return list(spec.spherical.num_satellites)

    def evaluate(
        self, spec: ExperimentSpec, scen: Scenario, point: int, index: int
    ) -> dict[str, Cell]:
        mc = spec.montecarlo
        fading = spec.fading.params()
        outcomes = {}
        for generator in (SphericalBppGenerator(point), PlanarProjectedGenerator(point)):
            outcomes[generator.name] = run_random_experiment(
                scen,
                generator,
                AllocationConfig(),
                trials=mc.trials,
                stream=self.stream(spec),
                fading=fading,
                metric=Metric.TYPICAL_RATE,
                point_index=index,
                workers=mc.workers,
                confidence=mc.confidence,
            ).summaries[1]

        spherical = outcomes["spherical_bpp"]
        planar = outcomes["planar_projected"]
        gap = abs(planar.mean - spherical.mean) / spherical.mean if spherical.mean > 0 else 0.0
        return {
            "num_satellites": point,
            "spherical_rate": spherical.mean,
            "spherical_stderr": spherical.stderr,
            "planar_rate": planar.mean,
            "planar_stderr": planar.stderr,
            "relative_gap": 100 * gap,
        }

    def summarize(self, spec: ExperimentSpec, scen: Scenario, result: SweepResult) -> dict[str, Any]:
        gaps = [float(g) for g in result.column("relative_gap")]
        shrinking = all(b <= a for a, b in zip(gaps, gaps[1:]))
        return {"gap_monotone_decreasing": shrinking}

from __future__ import annotations

from typing import Any

from leo_spectra.analysis.regular import r_reg
from leo_spectra.config.config import Command, ExperimentSpec
from leo_spectra.experiments.base import Experiment, per_1000_km2
from leo_spectra.experiments.results import DISTANCE_UNIT, EFFICIENCY_UNIT, Cell, Column, SweepResult
from leo_spectra.montecarlo.experiment import (
    AllocationConfig,
    ExperimentOutcome,
    Summary,
    run_random_experiment,
)
from leo_spectra.montecarlo.fading import FadingRegime
from leo_spectra.montecarlo.rng import RngStream
from leo_spectra.montecarlo.sampling import PlanarUniformGenerator, RegularGenerator
from leo_spectra.physics.link import Scenario

# Substream family of the regular patch, apart from the random draws
REGULAR_STREAM = 1


def run_planar_point(
    spec: ExperimentSpec,
    scen: Scenario,
    delta: float,
    num_subbands: list[int],
    index: int,
) -> ExperimentOutcome:
    """Monte Carlo estimate of the random-configuration efficiency at spacing `delta`"""
    rnd = spec.random
    generator = PlanarUniformGenerator(
        delta,
        rnd.window_for(delta),
        beams_per_satellite=rnd.beams_per_satellite,
        convention=rnd.spacing_convention,
    )
    allocation = AllocationConfig(
        num_subbands=tuple(num_subbands),
        reuse_factors=tuple(rnd.reuse_factors),
        spacing=delta,
        offset=rnd.hex_offset_km,
    )
    mc = spec.montecarlo
    return run_random_experiment(
        scen,
        generator,
        allocation,
        trials=mc.trials,
        stream=RngStream(mc.seed),
        fading=spec.fading.params(),
        point_index=index,
        workers=mc.workers,
        confidence=mc.confidence,
    )


def run_regular_faded_point(spec: ExperimentSpec, scen: Scenario, delta: float, index: int) -> Summary:
    """Monte Carlo efficiency of the regular patch under the configured fading"""
    sites = spec.random.regular_patch_sites
    mc = spec.montecarlo
    outcome = run_random_experiment(
        scen,
        RegularGenerator(delta, sites, sites),
        AllocationConfig(spacing=delta),
        trials=mc.trials,
        stream=RngStream(mc.seed).child(REGULAR_STREAM),
        fading=spec.fading.params(),
        point_index=index,
        workers=mc.workers,
        confidence=mc.confidence,
    )
    return outcome.summaries[1]


def _faded(spec: ExperimentSpec) -> bool:
    return spec.fading.regime != FadingRegime.NONE


class RandomSweepExperiment(Experiment):
    name = "random_sweep"
    description = "Monte Carlo efficiency of random constellations with hexagonal frequency reuse"
    command = Command.RANDOM_SWEEP
    section = "random"

    def columns(self, spec: ExperimentSpec) -> list[Column]:
        cols = [Column("delta", DISTANCE_UNIT)]
        for m in spec.random.num_subbands:
            cols += [
                Column(f"efficiency_M{m}", EFFICIENCY_UNIT),
                Column(f"ci_low_M{m}", EFFICIENCY_UNIT),
                Column(f"ci_high_M{m}", EFFICIENCY_UNIT),
                Column(f"reuse_distance_M{m}", DISTANCE_UNIT),
            ]
        if spec.random.include_regular:
            cols.append(Column("regular_efficiency", EFFICIENCY_UNIT))
            if _faded(spec):
                cols += [
                    Column("regular_faded_efficiency", EFFICIENCY_UNIT),
                    Column("regular_faded_ci_low", EFFICIENCY_UNIT),
                    Column("regular_faded_ci_high", EFFICIENCY_UNIT),
                ]
        return cols

    def points(self, spec: ExperimentSpec) -> list[float]:
        return spec.sweep.values()

    def evaluate(
        self, spec: ExperimentSpec, scen: Scenario, point: float, index: int
    ) -> dict[str, Cell]:
        outcome = run_planar_point(spec, scen, point, spec.random.num_subbands, index)
        row: dict[str, Cell] = {"delta": point}
        for m in spec.random.num_subbands:
            summary = outcome.summaries[m]
            row[f"efficiency_M{m}"] = summary.mean
            row[f"ci_low_M{m}"] = summary.ci_low
            row[f"ci_high_M{m}"] = summary.ci_high
            row[f"reuse_distance_M{m}"] = outcome.reuse_distance[m]
        if spec.random.include_regular:
            row["regular_efficiency"] = per_1000_km2(
                r_reg(scen.full_band_psd, point, scen, spec.truncation.build())
            )
            if _faded(spec):
                faded = run_regular_faded_point(spec, scen, point, index)
                row["regular_faded_efficiency"] = faded.mean
                row["regular_faded_ci_low"] = faded.ci_low
                row["regular_faded_ci_high"] = faded.ci_high
        return row

    def summarize(self, spec: ExperimentSpec, scen: Scenario, result: SweepResult) -> dict[str, Any]:
        if not spec.random.include_regular or 1 not in spec.random.num_subbands:
            return {}
        reference = "regular_faded_efficiency" if _faded(spec) else "regular_efficiency"
        # Single-channel comparison: the regular value must clear the random lower confidence bound
        dominates = all(
            regular >= low for regular, low in zip(result.column(reference), result.column("ci_low_M1"))
        )
        return {"regular_dominates_single_channel": dominates}

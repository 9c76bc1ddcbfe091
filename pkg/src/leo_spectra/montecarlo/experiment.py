from __future__ import annotations

from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
import logging
import math

import numpy as np
from numpy.typing import NDArray
from scipy import stats

from leo_spectra.montecarlo.fading import FadingParams, FadingRegime, apply_fading
from leo_spectra.montecarlo.rng import RngStream
from leo_spectra.montecarlo.sampling import ConstellationGenerator
from leo_spectra.physics.geometry import lattice_density
from leo_spectra.physics.link import (
    AREA_UNIT_KM2,
    Constellation,
    Scenario,
    gain_matrix,
    terminal_rates,
)
from leo_spectra.spectrum.allocation import build_spectrum_plan, full_reuse_plan
from leo_spectra.utils.errors import SpectraError

logger = logging.getLogger(__name__)


class Metric(str, Enum):
    # bits/s/Hz per 1000 km²
    AREA = "area"
    # bits/s/Hz of the typical terminal
    TYPICAL_RATE = "typical_rate"


@dataclass(frozen=True)
class AllocationConfig:
    """Subband counts to evaluate and the reuse distances (in multiples of Δ) to try for each"""

    num_subbands: tuple[int, ...] = (1,)
    reuse_factors: tuple[float, ...] = (1.0,)
    spacing: float = 1.0
    offset: tuple[float, float] = (0.0, 0.0)

    def reuse_distances(self) -> tuple[float, ...]:
        return tuple(self.spacing * f for f in self.reuse_factors)


@dataclass
class Summary:
    mean: float
    stderr: float
    ci_low: float
    ci_high: float
    trials: int

    @classmethod
    def of(cls, values: Sequence[float], confidence: float = 0.95) -> Summary:
        data = np.asarray(values, dtype=float)
        n = len(data)
        if n == 0:
            raise SpectraError("Cannot summarize zero trials")
        # np.sum reduces pairwise, so the mean does not depend on worker scheduling
        mean = float(np.sum(data) / n)
        if n == 1:
            return cls(mean, 0.0, mean, mean, 1)
        stderr = float(np.std(data, ddof=1) / math.sqrt(n))
        half = float(stats.t.ppf(0.5 + confidence / 2, n - 1)) * stderr
        return cls(mean, stderr, mean - half, mean + half, n)


@dataclass
class ExperimentOutcome:
    """Per subband count: the summary at the reuse distance with the best across-trial mean"""

    summaries: dict[int, Summary]
    reuse_distance: dict[int, float | None]
    samples: dict[int, NDArray[np.float64]] = field(default_factory=dict)


@dataclass(frozen=True)
class TrialTask:
    scen: Scenario
    generator: ConstellationGenerator
    allocation: AllocationConfig
    fading: FadingParams
    metric: Metric
    stream: RngStream
    substream: tuple[int, ...]


def evaluate(
    scen: Scenario,
    constellation: Constellation,
    metric: Metric,
    rates: NDArray[np.float64],
    periodic: bool = False,
) -> float:
    """Turn per-terminal rates into the requested metric.

    With `periodic` the rates belong to one terminal per translation class of a
    regular patch.
    """
    if metric == Metric.TYPICAL_RATE:
        return float(rates[0])
    if periodic:
        density = lattice_density(constellation.metadata["delta"])
        return float(np.mean(rates)) * density * AREA_UNIT_KM2
    area = constellation.area_km2 or 4 * math.pi * scen.earth.earth_radius_km**2
    return float(np.sum(rates)) / area * AREA_UNIT_KM2


def run_trial(task: TrialTask) -> NDArray[np.float64]:
    """One draw evaluated for every (subband count, reuse distance) pair"""
    rng = task.stream.generator(*task.substream)
    constellation = task.generator.sample(task.scen, rng)
    alloc = task.allocation
    distances = alloc.reuse_distances()
    out = np.zeros((len(alloc.num_subbands), len(distances)))
    if constellation.num_beams == 0:
        return out

    # Subband plans break the lattice periodicity, fading breaks it per draw
    periodic = (
        task.metric == Metric.AREA
        and task.fading.regime == FadingRegime.NONE
        and "representatives" in constellation.metadata
        and all(m == 1 for m in alloc.num_subbands)
    )
    if task.metric == Metric.TYPICAL_RATE:
        terminals = np.array([constellation.metadata.get("typical", 0)])
    elif periodic:
        terminals = constellation.metadata["representatives"]
    else:
        terminals = None

    gains = apply_fading(gain_matrix(task.scen, constellation, terminals), task.fading, rng)

    for a, m in enumerate(alloc.num_subbands):
        if m == 1:
            plan = full_reuse_plan(task.scen, constellation)
            rates = terminal_rates(task.scen, constellation, plan, gains, terminals)
            out[a, :] = evaluate(task.scen, constellation, task.metric, rates, periodic)
            continue
        for b, length in enumerate(distances):
            plan = build_spectrum_plan(task.scen, constellation, m, length, alloc.offset)
            rates = terminal_rates(task.scen, constellation, plan, gains, terminals)
            out[a, b] = evaluate(task.scen, constellation, task.metric, rates, periodic)
    return out


def run_random_experiment(
    scen: Scenario,
    generator: ConstellationGenerator,
    allocation: AllocationConfig,
    trials: int,
    stream: RngStream,
    fading: FadingParams | None = None,
    metric: Metric = Metric.AREA,
    point_index: int = 0,
    workers: int = 1,
    confidence: float = 0.95,
) -> ExperimentOutcome:
    """Average the metric over independent draws; trial t always uses substream (point, t)"""
    if trials < 1:
        raise SpectraError("Need at least one trial", details={"trials": trials})
    fading = fading or FadingParams.none()
    tasks = [
        TrialTask(scen, generator, allocation, fading, metric, stream, (point_index, t))
        for t in range(trials)
    ]
    logger.debug(f"Running {trials} trials of {generator.name} at point {point_index}")

    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_trial, tasks))
    else:
        results = [run_trial(task) for task in tasks]
    table = np.stack(results)

    distances = allocation.reuse_distances()
    summaries: dict[int, Summary] = {}
    chosen: dict[int, float | None] = {}
    samples: dict[int, NDArray[np.float64]] = {}
    for a, m in enumerate(allocation.num_subbands):
        means = table[:, a, :].sum(axis=0) / trials
        best = int(np.argmax(means))
        summaries[m] = Summary.of(table[:, a, best], confidence)
        chosen[m] = None if m == 1 else distances[best]
        samples[m] = table[:, a, best]
    return ExperimentOutcome(summaries, chosen, samples)

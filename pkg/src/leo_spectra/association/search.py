from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import logging

import numpy as np

from leo_spectra.analysis.regular import regular_constellation
from leo_spectra.association.shuffle import ShufflePlan, feasible_plans
from leo_spectra.physics.geometry import lattice_density
from leo_spectra.physics.link import Scenario, terminal_rates

logger = logging.getLogger(__name__)


@dataclass
class ShuffleSearchResult:
    plan: ShufflePlan
    efficiency: float
    identity_efficiency: float
    candidates: list[tuple[ShufflePlan, float]] = field(default_factory=list)

    @property
    def improvement(self) -> float:
        """Relative gain over the identity association"""
        if self.identity_efficiency == 0:
            return 0.0
        return self.efficiency / self.identity_efficiency - 1.0


def evaluate_plan(
    scen: Scenario, delta: float, plan: ShufflePlan, nx: int = 128, ny: int = 128
) -> float:
    """Area efficiency of a periodic association, from one terminal per translation class"""
    constellation = regular_constellation(scen, delta, nx, ny, plan)
    reps = constellation.metadata["representatives"]
    rates = terminal_rates(scen, constellation, terminals=reps)
    return float(np.mean(rates)) * lattice_density(delta)


def _evaluate(args: tuple[Scenario, float, ShufflePlan, int, int]) -> float:
    return evaluate_plan(*args)


def optimize_shuffle(
    scen: Scenario,
    delta: float,
    nx: int = 128,
    ny: int = 128,
    workers: int = 1,
) -> ShuffleSearchResult:
    """Exhaustive search over the shuffle plans whose blocks fit the beam region"""
    plans = [
        plan
        for plan in feasible_plans(delta, scen.altitude, scen.gamma_g, max_block=min(nx, ny) // 2)
        if nx % plan.block_x == 0 and ny % max(plan.block_y, 2) == 0
    ]
    logger.debug(f"Evaluating {len(plans)} shuffle plans at delta={delta:.6g}")

    jobs = [(scen, delta, plan, nx, ny) for plan in plans]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_evaluate, jobs))
    else:
        values = [_evaluate(job) for job in jobs]

    candidates = list(zip(plans, values))
    identity_value = values[0]
    best_plan, best_value = max(candidates, key=lambda item: item[1])
    return ShuffleSearchResult(
        plan=best_plan,
        efficiency=best_value,
        identity_efficiency=identity_value,
        candidates=candidates,
    )

from __future__ import annotations
import abc
from collections.abc import Iterator, Sequence
import logging
from typing import Any

from leo_spectra.config.config import Command, ExperimentSpec
from leo_spectra.experiments.events import ExperimentEvent
from leo_spectra.experiments.results import Cell, Column, SweepResult
from leo_spectra.montecarlo.rng import RngStream
from leo_spectra.physics.link import AREA_UNIT_KM2, Scenario

logger = logging.getLogger(__name__)


def per_1000_km2(value_per_km2: float) -> float:
    return value_per_km2 * AREA_UNIT_KM2


class Experiment(abc.ABC):
    name: str = "base_experiment"
    description: str = "Base experiment"
    command: Command = Command.REGULAR_SWEEP
    # Name of the ExperimentSpec section holding this experiment's parameters
    section: str = "sweep"

    @abc.abstractmethod
    def columns(self, spec: ExperimentSpec) -> list[Column]:
        pass

    @abc.abstractmethod
    def points(self, spec: ExperimentSpec) -> Sequence[Any]:
        pass

    @abc.abstractmethod
    def evaluate(
        self, spec: ExperimentSpec, scen: Scenario, point: Any, index: int
    ) -> dict[str, Cell]:
        """Compute one row of the result table"""
        pass

    def summarize(self, spec: ExperimentSpec, scen: Scenario, result: SweepResult) -> dict[str, Any]:
        return {}

    def stream(self, spec: ExperimentSpec) -> RngStream:
        return RngStream(spec.montecarlo.seed)

    def run(self, spec: ExperimentSpec) -> Iterator[ExperimentEvent]:
        """Evaluate every point in order, yielding progress events.

        Errors are reported as a RUN_ERROR event and then re-raised to the caller.
        """
        try:
            scen = spec.scenario.build()
            points = list(self.points(spec))
            result = SweepResult(self.command.value, self.columns(spec))

            yield ExperimentEvent.run_start(self.name, len(points))
            for index, point in enumerate(points):
                values = self.evaluate(spec, scen, point, index)
                result.add_row(values)
                logger.debug(f"{self.name}: point {index + 1}/{len(points)} done")
                yield ExperimentEvent.point_complete(index, len(points), values)

            result.summary = self.summarize(spec, scen, result)
        except Exception as e:
            yield ExperimentEvent.run_error(e)
            raise

        yield ExperimentEvent.run_complete(result)

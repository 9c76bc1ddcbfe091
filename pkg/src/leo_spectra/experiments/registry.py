import logging

from leo_spectra.config.config import Command
from leo_spectra.experiments.base import Experiment
from leo_spectra.experiments.builtin import get_all_builtin_experiments
from leo_spectra.utils.errors import ConfigError

logger = logging.getLogger(__name__)


class ExperimentRegistry:
    def __init__(self) -> None:
        self._experiments: dict[Command, Experiment] = {}

    def register(self, experiment: Experiment) -> None:
        if experiment.command in self._experiments:
            logger.warning(f"Overwriting existing experiment: {experiment.command.value}")

        self._experiments[experiment.command] = experiment
        logger.debug(f"Registered experiment: {experiment.name}")

    def get(self, command: Command | str) -> Experiment:
        try:
            key = Command(command)
        except ValueError as e:
            raise ConfigError(f"Unknown command: {command}", config_key="command") from e

        if key not in self._experiments:
            raise ConfigError(f"No experiment registered for {key.value}", config_key="command")
        return self._experiments[key]

    def get_experiments(self) -> list[Experiment]:
        return list(self._experiments.values())


def create_default_registry() -> ExperimentRegistry:
    """Registry holding every builtin experiment"""
    registry = ExperimentRegistry()

    for experiment_class in get_all_builtin_experiments():
        registry.register(experiment_class())

    return registry

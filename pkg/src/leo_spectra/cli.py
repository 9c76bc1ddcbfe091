import json
import logging
from pathlib import Path
import sys

import click
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape

from leo_spectra.config.config import Command, ExperimentSpec
from leo_spectra.config.loader import load_config
from leo_spectra.experiments.events import ExperimentEventType
from leo_spectra.experiments.registry import create_default_registry
from leo_spectra.experiments.results import ResultWriter, SweepResult
from leo_spectra.ui.tui import TUI, get_console
from leo_spectra.utils.errors import ConfigError, ConvergenceError, SpectraError

logger = logging.getLogger(__name__)

console = get_console()

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3


def exit_code_for(error: Exception) -> int:
    if isinstance(error, (ConfigError, ValidationError)):
        return EXIT_CONFIG
    if isinstance(error, ConvergenceError):
        return EXIT_CONVERGENCE
    return EXIT_FAILURE


def setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def collect_overrides(
    sets: tuple[str, ...],
    output: Path | None = None,
    seed: int | None = None,
    trials: int | None = None,
    workers: int | None = None,
) -> list[str]:
    """Dedicated flags become `--set` style overrides applied after the user's own"""
    overrides = list(sets)
    if output is not None:
        overrides.append(f"output={json.dumps(str(output))}")
    if seed is not None:
        overrides.append(f"montecarlo.seed={seed}")
    if trials is not None:
        overrides.append(f"montecarlo.trials={trials}")
    if workers is not None:
        overrides.append(f"montecarlo.workers={workers}")
    return overrides


def check_feasible(spec: ExperimentSpec) -> None:
    """Build the physical scenario once so bad values fail before any computation"""
    try:
        spec.scenario.build()
    except SpectraError as e:
        raise ConfigError(
            f"Infeasible scenario: {e.message}", config_key="scenario", details=dict(e.details)
        ) from e


def execute(spec: ExperimentSpec, tui: TUI) -> SweepResult:
    check_feasible(spec)
    experiment = create_default_registry().get(spec.command)
    result: SweepResult | None = None

    try:
        for event in experiment.run(spec):
            if event.type == ExperimentEventType.RUN_START:
                tui.run_start(event.data["name"], event.data["total_points"])
            elif event.type == ExperimentEventType.POINT_COMPLETE:
                tui.point_complete(event.data["index"], event.data["total"])
            elif event.type == ExperimentEventType.RUN_ERROR:
                tui.show_error(event.data["kind"], event.data["error"])
            elif event.type == ExperimentEventType.RUN_COMPLETE:
                result = event.data["result"]
    finally:
        tui.run_end()

    if result is None:
        raise SpectraError(f"Experiment {experiment.name} produced no result")

    written = ResultWriter(spec.output).save(result, spec)
    tui.show_result(result, written)
    return result


def _guarded(action) -> None:
    """Run `action`, translating domain errors into the documented exit codes"""
    try:
        action()
    except (SpectraError, ValidationError) as e:
        console.print(f"[error]{type(e).__name__}: {escape(str(e))}[/error]")
        sys.exit(exit_code_for(e))
    sys.exit(EXIT_OK)


def run_options(func):
    decorators = [
        click.option(
            "--config",
            "config_path",
            type=click.Path(exists=True, dir_okay=False, path_type=Path),
            help="Experiment file (JSON, or TOML by suffix)",
        ),
        click.option(
            "--set",
            "sets",
            multiple=True,
            metavar="KEY=VALUE",
            help="Override one setting, e.g. --set scenario.snr_db=8",
        ),
        click.option("--output", "-o", type=click.Path(path_type=Path), help="Output path stem"),
        click.option("--seed", type=int, help="Master random seed"),
        click.option("--trials", type=int, help="Monte Carlo trials per point"),
        click.option("--workers", type=int, help="Worker processes"),
    ]
    for decorator in reversed(decorators):
        func = decorator(func)
    return func


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
def main(verbose: bool) -> None:
    """Area spectral efficiency experiments for LEO satellite networks."""
    setup_logging(verbose)


def _make_command(command: Command) -> click.Command:
    @click.command(name=command.value)
    @run_options
    def run_command(
        config_path: Path | None,
        sets: tuple[str, ...],
        output: Path | None,
        seed: int | None,
        trials: int | None,
        workers: int | None,
    ) -> None:
        overrides = collect_overrides(sets, output, seed, trials, workers)

        def action() -> None:
            spec = load_config(config_path=config_path, overrides=overrides, command=command.value)
            execute(spec, TUI(console))

        _guarded(action)

    run_command.help = create_default_registry().get(command).description
    return run_command


for _command in Command:
    main.add_command(_make_command(_command))


@main.command(name="list")
def list_experiments() -> None:
    """List the registered experiments."""
    TUI(console).show_experiments(create_default_registry().get_experiments())


@main.command(name="show-config")
@click.argument("command", required=False, type=click.Choice([c.value for c in Command]))
@run_options
def show_config(
    command: str | None,
    config_path: Path | None,
    sets: tuple[str, ...],
    output: Path | None,
    seed: int | None,
    trials: int | None,
    workers: int | None,
) -> None:
    """Print the fully resolved configuration without running anything."""
    overrides = collect_overrides(sets, output, seed, trials, workers)

    def action() -> None:
        spec = load_config(config_path=config_path, overrides=overrides, command=command)
        TUI(console).show_config(spec.to_dict())

    _guarded(action)


@main.command(name="rerun")
@click.argument("sidecar", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def rerun(sidecar: Path) -> None:
    """Run again from a JSON sidecar written by an earlier run."""

    def action() -> None:
        execute(ResultWriter.load_spec(sidecar), TUI(console))

    _guarded(action)

from pathlib import Path
import json
from typing import Any

from rich import box
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn
from rich.syntax import Syntax
from rich.table import Table
from rich.text import Text
from rich.theme import Theme

from leo_spectra.experiments.base import Experiment
from leo_spectra.experiments.results import Cell, SweepResult

SPECTRA_THEME = Theme(
    {
        # General
        "info": "cyan",
        "warning": "yellow",
        "error": "bright_red bold",
        "success": "green",
        "dim": "dim",
        "muted": "grey50",
        "border": "grey35",
        "highlight": "bold red",
        # Tables
        "header": "bright_white bold",
        "unit": "grey50",
        "value": "bright_white",
        "experiment": "bright_magenta bold",
        "code": "white",
    }
)

# Singleton console handler
_console: Console | None = None


def get_console() -> Console:
    global _console
    if _console is None:
        _console = Console(theme=SPECTRA_THEME, highlight=False)

    return _console


def format_cell(value: Cell) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


class TUI:
    def __init__(self, console: Console | None = None) -> None:
        self.console = console or get_console()
        self._progress: Progress | None = None
        self._task_id: int | None = None

    def run_start(self, name: str, total_points: int) -> None:
        """Open a progress bar for a run of `total_points` points"""
        self._progress = Progress(
            TextColumn("[experiment]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            console=self.console,
            transient=True,
        )
        self._progress.start()
        self._task_id = self._progress.add_task(name, total=total_points)

    def point_complete(self, index: int, total: int) -> None:
        if self._progress is not None and self._task_id is not None:
            self._progress.update(self._task_id, completed=index + 1)

    def run_end(self) -> None:
        if self._progress is not None:
            self._progress.stop()
        self._progress = None
        self._task_id = None

    def result_table(self, result: SweepResult) -> Table:
        table = Table(box=box.SIMPLE_HEAD, header_style="header", title=result.command)
        for col in result.columns:
            header = Text(col.name, style="header")
            if col.unit:
                header.append(f"\n{col.unit}", style="unit")
            table.add_column(header, justify="right", style="value")

        for row in result.rows:
            table.add_row(*(format_cell(v) for v in row))
        return table

    def show_result(self, result: SweepResult, written: tuple[Path, Path] | None = None) -> None:
        self.console.print()
        self.console.print(self.result_table(result))

        if result.summary:
            grid = Table.grid(padding=(0, 1))
            grid.add_column(style="muted", justify="right", no_wrap=True)
            grid.add_column(style="code")
            for key, value in result.summary.items():
                grid.add_row(key, format_cell(value))
            self.console.print(
                Panel(grid, title=Text("summary", style="info"), border_style="border", box=box.ROUNDED)
            )

        if written:
            csv_path, sidecar_path = written
            self.console.print(
                f"[success]Wrote {escape(str(csv_path))} and {escape(str(sidecar_path))}[/success]"
            )

    def show_error(self, kind: str, message: str) -> None:
        self.run_end()
        self.console.print(f"\n[error]{kind}: {escape(message)}[/error]")

    def show_experiments(self, experiments: list[Experiment]) -> None:
        table = Table(box=box.SIMPLE_HEAD, header_style="header")
        table.add_column("command", style="experiment", no_wrap=True)
        table.add_column("parameters", style="muted")
        table.add_column("description", style="code")
        for experiment in experiments:
            table.add_row(experiment.command.value, experiment.section, experiment.description)
        self.console.print(table)

    def show_config(self, config: dict[str, Any]) -> None:
        text = json.dumps(config, indent=2, sort_keys=True)
        self.console.print(Syntax(text, "json", theme="monokai", word_wrap=True))

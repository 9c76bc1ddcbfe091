from __future__ import annotations
import csv
from dataclasses import dataclass, field
import json
import logging
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from leo_spectra.config.config import ExperimentSpec
from leo_spectra.utils.errors import ConfigError, SpectraError
from leo_spectra.utils.paths import ensure_parent_directory, with_suffix

logger = logging.getLogger(__name__)

# Units written into the CSV header
EFFICIENCY_UNIT = "bits/s/Hz/1000km2"
RATE_UNIT = "bits/s/Hz"
DISTANCE_UNIT = "km"

Cell = float | int | str | None


@dataclass(frozen=True)
class Column:
    name: str
    unit: str | None = None

    @property
    def header(self) -> str:
        return f"{self.name} [{self.unit}]" if self.unit else self.name

    @classmethod
    def from_header(cls, header: str) -> Column:
        name, sep, rest = header.partition(" [")
        if sep and rest.endswith("]"):
            return cls(name, rest[:-1])
        return cls(header)


@dataclass
class SweepResult:
    command: str
    columns: list[Column]
    rows: list[list[Cell]] = field(default_factory=list)
    # Scalars that do not belong to any row, e.g. the optimal spacing of a sweep
    summary: dict[str, Any] = field(default_factory=dict)

    def add_row(self, values: dict[str, Cell]) -> list[Cell]:
        missing = [c.name for c in self.columns if c.name not in values]
        if missing:
            raise SpectraError("Row is missing columns", details={"missing": missing})
        row = [values[c.name] for c in self.columns]
        self.rows.append(row)
        return row

    def column(self, name: str) -> list[Cell]:
        for index, col in enumerate(self.columns):
            if col.name == name:
                return [row[index] for row in self.rows]
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "columns": [{"name": c.name, "unit": c.unit} for c in self.columns],
            "rows": self.rows,
            "summary": self.summary,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SweepResult:
        return cls(
            command=data["command"],
            columns=[Column(c["name"], c.get("unit")) for c in data["columns"]],
            rows=[list(row) for row in data.get("rows", [])],
            summary=dict(data.get("summary", {})),
        )


def _format_cell(value: Cell) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ResultWriter:
    """Writes `<output>.csv` and the `<output>.json` configuration sidecar"""

    def __init__(self, output: Path) -> None:
        self.csv_path = with_suffix(output, ".csv")
        self.sidecar_path = with_suffix(output, ".json")

    def save(self, result: SweepResult, spec: ExperimentSpec) -> tuple[Path, Path]:
        ensure_parent_directory(self.csv_path)
        with open(self.csv_path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow([c.header for c in result.columns])
            for row in result.rows:
                writer.writerow([_format_cell(v) for v in row])

        with open(self.sidecar_path, "w", encoding="utf-8") as f:
            json.dump(spec.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")

        logger.debug(f"Wrote {len(result.rows)} rows to {self.csv_path}")
        return self.csv_path, self.sidecar_path

    @staticmethod
    def load_spec(sidecar: Path) -> ExperimentSpec:
        try:
            with open(sidecar, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(
                f"Invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}",
                config_file=str(sidecar),
            ) from e
        except OSError as e:
            raise ConfigError(f"Failed to read sidecar: {e}", config_file=str(sidecar)) from e

        try:
            return ExperimentSpec(**data)
        except ValidationError as e:
            raise ConfigError(f"Invalid sidecar: {e}", config_file=str(sidecar)) from e

    @staticmethod
    def load_csv(path: Path) -> tuple[list[Column], list[list[str]]]:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader)
            rows = [row for row in reader]
        return [Column.from_header(h) for h in header], rows

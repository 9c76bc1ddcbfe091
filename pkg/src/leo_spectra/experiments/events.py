from __future__ import annotations
from enum import Enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from leo_spectra.utils.errors import SpectraError

if TYPE_CHECKING:
    from leo_spectra.experiments.results import SweepResult


class ExperimentEventType(str, Enum):
    # Run lifecycle
    RUN_START = "run_start"
    RUN_COMPLETE = "run_complete"
    RUN_ERROR = "run_error"

    # Progress
    POINT_COMPLETE = "point_complete"


@dataclass
class ExperimentEvent:
    type: ExperimentEventType
    data: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def run_start(cls, name: str, total_points: int) -> ExperimentEvent:
        return cls(
            type=ExperimentEventType.RUN_START,
            data={"name": name, "total_points": total_points},
        )

    @classmethod
    def point_complete(cls, index: int, total: int, row: dict[str, Any]) -> ExperimentEvent:
        return cls(
            type=ExperimentEventType.POINT_COMPLETE,
            data={"index": index, "total": total, "row": row},
        )

    @classmethod
    def run_complete(cls, result: SweepResult) -> ExperimentEvent:
        return cls(
            type=ExperimentEventType.RUN_COMPLETE,
            data={"result": result},
        )

    @classmethod
    def run_error(cls, error: Exception) -> ExperimentEvent:
        details = error.to_dict() if isinstance(error, SpectraError) else {}
        return cls(
            type=ExperimentEventType.RUN_ERROR,
            data={
                "error": str(error),
                "kind": type(error).__name__,
                "details": details,
            },
        )

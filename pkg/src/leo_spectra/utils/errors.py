from typing import Any

import numpy as np

# Units shown next to well-known parameters in error messages
PARAMETER_UNITS: dict[str, str] = {
    "delta": "km",
    "L": "km",
    "altitude_km": "km",
    "earth_radius_km": "km",
    "x": "km",
    "y": "km",
    "z": "km",
    "window": "km",
    "theta": "rad",
    "beamwidth_deg": "deg",
}


def _plain(value: Any) -> Any:
    """numpy scalars and arrays as built-in Python values"""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def format_parameter(name: str, value: Any) -> str:
    value = _plain(value)
    if isinstance(value, float):
        text = f"{value:.6g}"
    elif isinstance(value, list) and len(value) > 6:
        text = f"[{len(value)} values]"
    else:
        text = str(value)
    unit = PARAMETER_UNITS.get(name)
    return f"{name}={text} {unit}" if unit else f"{name}={text}"


class SpectraError(Exception):
    """Root of the package errors; `details` names the offending parameters"""

    def __init__(
        self,
        message: str,
        details: dict[str, Any] | None = None,
        cause: Exception | None = None,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.details = details or {}
        self.cause = cause

    def __str__(self) -> str:
        base = self.message
        if self.details:
            params = ", ".join(format_parameter(k, v) for k, v in self.details.items())
            base = f"{base} ({params})"
        if self.cause:
            base = f"{base}: {self.cause}"
        return base

    def to_dict(self) -> dict[str, Any]:
        return {
            "type": self.__class__.__name__,
            "message": self.message,
            "details": _plain(self.details),
            "units": {k: PARAMETER_UNITS[k] for k in self.details if k in PARAMETER_UNITS},
            "cause": str(self.cause) if self.cause else None,
        }


class ConfigError(SpectraError):
    def __init__(
        self,
        message: str,
        config_key: str | None = None,
        config_file: str | None = None,
        **kwargs: Any,
    ) -> None:
        details = kwargs.pop("details", {})

        if config_key:
            details["config_key"] = config_key
        if config_file:
            details["config_file"] = config_file
        super().__init__(message, details=details, **kwargs)
        self.config_key = config_key
        self.config_file = config_file


class GeometryError(SpectraError):
    pass


class InvalidIndexError(GeometryError):
    """Lattice index pair violating the i = j (mod 2) parity rule."""

    def __init__(self, i: int, j: int, **kwargs: Any) -> None:
        super().__init__(
            f"Invalid lattice index ({i}, {j}): i and j must have the same parity",
            details={"i": i, "j": j},
            **kwargs,
        )
        self.i = i
        self.j = j


class DegenerateGeometryError(GeometryError):
    pass


class BelowHorizonError(GeometryError):
    pass


class PatternDomainError(SpectraError):
    pass


class ConvergenceError(SpectraError):
    """A sum, integral or search that did not settle within its tolerance"""


class AssociationError(SpectraError):
    pass


class SpectrumError(SpectraError):
    def __init__(
        self,
        message: str,
        nearest_valid: list[int] | None = None,
        **kwargs: Any,
    ) -> None:
        details = kwargs.pop("details", {})

        if nearest_valid:
            details["nearest_valid"] = nearest_valid
        super().__init__(message, details=details, **kwargs)
        self.nearest_valid = nearest_valid or []

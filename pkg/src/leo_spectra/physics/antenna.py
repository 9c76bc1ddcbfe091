from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import bisect
from scipy.special import j1, jn_zeros

from leo_spectra.utils.errors import PatternDomainError

# First zero of J1, fixes the first-null beamwidth through K sin(B) = FIRST_NULL
FIRST_NULL = 3.8317
HALF_POWER_GAIN = 0.5
_SERIES_CUTOFF = 1e-3


class PatternKind(str, Enum):
    BESSEL = "bessel"
    MONOTONE_ENVELOPE = "monotone_envelope"
    NO_SIDELOBE = "no_sidelobe"


def bessel_ratio(x: ArrayLike) -> NDArray[np.float64]:
    """J1(x)/x with the removable singularity at 0 filled in"""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < _SERIES_CUTOFF
    xs = x[small]
    out[small] = 0.5 - xs**2 / 16 + xs**4 / 384
    xl = x[~small]
    out[~small] = j1(xl) / xl
    return out


def _bessel_power(x: NDArray[np.float64]) -> NDArray[np.float64]:
    return 4.0 * bessel_ratio(x) ** 2


def beamwidth_from_k(k: float) -> float:
    """First-null beamwidth in radians for a pattern constant K"""
    if k < FIRST_NULL:
        raise PatternDomainError(
            "Pattern constant too small for a null inside 90 degrees",
            details={"K": k, "minimum": FIRST_NULL},
        )
    return math.asin(FIRST_NULL / k)


@dataclass(frozen=True)
class BeamPattern:
    """Unit-peak spot-beam pattern 4|J1(K sin θ)/(K sin θ)|² and its bounding variants.

    `first_null_beamwidth` is in radians.
    """

    first_null_beamwidth: float
    kind: PatternKind = PatternKind.BESSEL

    def __post_init__(self) -> None:
        if not 0 < self.first_null_beamwidth <= math.pi / 2:
            raise PatternDomainError(
                "Beamwidth must lie in (0, 90] degrees",
                details={"beamwidth_deg": math.degrees(self.first_null_beamwidth)},
            )

    @classmethod
    def from_degrees(
        cls, beamwidth_deg: float, kind: PatternKind = PatternKind.BESSEL
    ) -> BeamPattern:
        return cls(math.radians(beamwidth_deg), PatternKind(kind))

    @property
    def k(self) -> float:
        return FIRST_NULL / math.sin(self.first_null_beamwidth)

    @property
    def beamwidth_deg(self) -> float:
        return math.degrees(self.first_null_beamwidth)

    def envelope(self) -> BeamPattern:
        return replace(self, kind=PatternKind.MONOTONE_ENVELOPE)

    def without_sidelobes(self) -> BeamPattern:
        return replace(self, kind=PatternKind.NO_SIDELOBE)

    @cached_property
    def _sidelobe_peaks(self) -> NDArray[np.float64]:
        # Local maxima of (J1(x)/x)² sit at the zeros of J2; enough of them to pass x = K
        count = int(self.k / math.pi) + 3
        return jn_zeros(2, count)

    def gain(self, theta: ArrayLike) -> NDArray[np.float64] | float:
        theta_arr = np.asarray(theta, dtype=float)
        if np.any(np.isnan(theta_arr)) or np.any(theta_arr < 0):
            raise PatternDomainError(
                "Off-axis angle must be non-negative", details={"theta": theta}
            )

        # Back hemisphere takes the 90 degree value
        clamped = np.minimum(theta_arr, math.pi / 2)
        x = self.k * np.sin(clamped)
        value = _bessel_power(x)

        if self.kind == PatternKind.NO_SIDELOBE:
            value = np.where(clamped < self.first_null_beamwidth, value, 0.0)
        elif self.kind == PatternKind.MONOTONE_ENVELOPE:
            value = self._envelope_value(x, value)

        if value.ndim == 0:
            return float(value)
        return value

    def _envelope_value(
        self, x: NDArray[np.float64], value: NDArray[np.float64]
    ) -> NDArray[np.float64]:
        peaks = self._sidelobe_peaks
        # Peak heights decrease with x, so the sup over [x, K] is the value at x,
        # at the first peak not below x, or at the end point
        idx = np.searchsorted(peaks, x, side="left")
        idx = np.minimum(idx, len(peaks) - 1)
        next_peak = peaks[idx]
        peak_value = np.where(next_peak <= self.k, _bessel_power(next_peak), 0.0)
        end_value = float(_bessel_power(np.array(self.k)))
        return np.maximum(np.maximum(value, peak_value), end_value)


def gain(pattern: BeamPattern, theta: ArrayLike) -> NDArray[np.float64] | float:
    return pattern.gain(theta)


def combined_gain(
    sat: BeamPattern, gs: BeamPattern, theta_sat: ArrayLike, theta_gs: ArrayLike
) -> NDArray[np.float64] | float:
    """Joint attenuation of a satellite beam and a terminal beam"""
    return sat.gain(theta_sat) * gs.gain(theta_gs)


def half_power_angle(pattern: BeamPattern, xtol: float = 1e-9) -> float:
    """Off-axis angle where the main lobe drops to half power, in radians"""
    main_lobe = replace(pattern, kind=PatternKind.BESSEL)
    return bisect(
        lambda t: main_lobe.gain(t) - HALF_POWER_GAIN,
        0.0,
        pattern.first_null_beamwidth,
        xtol=xtol,
    )

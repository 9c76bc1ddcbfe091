"""Closed-form analytics of the regular configuration.

Satellites sit on a hexagonal lattice of spacing Δ at altitude h with one terminal
directly below each, every beam pointing straight down or up. The interference
at the origin terminal is a lattice sum over all other sites.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import lru_cache
import logging
import math

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import quad

from leo_spectra.analysis.optimize import grid_then_golden
from leo_spectra.association.shuffle import ShufflePlan, shuffle_2d
from leo_spectra.physics.antenna import PatternKind
from leo_spectra.physics.geometry import (
    LatticeIndex,
    SQRT3,
    lattice_density,
    lattice_xy,
    ring_indices,
    toroidal_patch,
)
from leo_spectra.physics.link import Constellation, Scenario
from leo_spectra.utils.errors import AssociationError, ConvergenceError, GeometryError

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


@dataclass(frozen=True)
class Truncation:
    """Rings are summed directly until the continuum remainder drops below
    `tail_tolerance` of the sum, but never past `cutoff_radius_multiplier`·h or
    `max_rings` rings. The remainder is then added as its continuum integral."""

    cutoff_radius_multiplier: float = 20.0
    tail_tolerance: float = 1e-8
    max_rings: int = 300

    def __post_init__(self) -> None:
        if not self.cutoff_radius_multiplier > 0 or not self.tail_tolerance > 0:
            raise ConvergenceError(
                "Truncation parameters must be positive",
                details={
                    "cutoff_radius_multiplier": self.cutoff_radius_multiplier,
                    "tail_tolerance": self.tail_tolerance,
                },
            )
        if self.max_rings < 1:
            raise ConvergenceError("Need at least one ring", details={"max_rings": self.max_rings})


DEFAULT_TRUNCATION = Truncation()


def theta_reg(idx: LatticeIndex, delta: float, h: float) -> float:
    """Off-axis angle between a nadir-pointing satellite at `idx` and the origin terminal"""
    if idx.is_origin:
        return 0.0
    x, y = lattice_xy(idx.i, idx.j, delta)
    return math.acos(h / math.sqrt(float(x) ** 2 + float(y) ** 2 + h**2))


@lru_cache(maxsize=16)
def _disc_sites(rings: int) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    parts = [ring_indices(n) for n in range(1, rings + 1)]
    i = np.concatenate([p[0] for p in parts])
    j = np.concatenate([p[1] for p in parts])
    i.setflags(write=False)
    j.setflags(write=False)
    return i, j


def _pattern_at_cos(scen: Scenario, u: float) -> float:
    theta = math.acos(min(1.0, max(0.0, u)))
    return float(scen.pattern_product(theta, theta))


def _continuum(scen: Scenario, u_max: float, tolerance: float) -> float:
    """2π h^(2-α) ∫_0^u_max u^(α-3) W(arccos u) du, the integral over ρ > h·sqrt(1/u_max² - 1)"""
    if u_max <= 0:
        return 0.0
    alpha, h = scen.alpha, scen.altitude
    if alpha <= 2 and _pattern_at_cos(scen, 0.0) > 0:
        raise ConvergenceError(
            "Lattice interference diverges: alpha <= 2 with a pattern that does not decay",
            details={"alpha": alpha},
        )

    if alpha > 2:
        # Algebraic weight handles the integrable endpoint singularity at u = 0
        value, _ = quad(
            lambda u: _pattern_at_cos(scen, u),
            0.0,
            u_max,
            weight="alg",
            wvar=(alpha - 3.0, 0.0),
            epsrel=tolerance,
            limit=400,
        )
    else:
        value, _ = quad(
            lambda u: u ** (alpha - 3.0) * _pattern_at_cos(scen, u),
            0.0,
            u_max,
            epsrel=tolerance,
            limit=400,
        )
    return 2 * math.pi * h ** (2 - alpha) * value


@dataclass(frozen=True)
class LatticeSum:
    value: float
    # Rings summed directly before the continuum took over
    rings: int
    tail: float


def truncated_lattice_sum(
    scen: Scenario, delta: float, truncation: Truncation = DEFAULT_TRUNCATION
) -> LatticeSum:
    """Direct ring summation, stopped once the continuum remainder falls below
    `tail_tolerance` of the running sum (checked at rings 1, 2, 4, ... and the cap)."""
    if not delta > 0:
        raise GeometryError("Spacing must be positive", details={"delta": delta})
    h = scen.altitude
    row = delta * SQRT3 / 2
    cap = min(
        truncation.max_rings,
        max(1, math.ceil(truncation.cutoff_radius_multiplier * h / row)),
    )

    i, j = _disc_sites(cap)
    x, y = lattice_xy(i, j, delta)
    rho2 = x**2 + y**2
    order = np.argsort(rho2, kind="stable")
    rho2 = rho2[order]
    d2 = rho2 + h**2
    theta = np.arccos(h / np.sqrt(d2))
    running = np.cumsum(d2 ** (-scen.alpha / 2) * scen.pattern_product(theta, theta))

    density = lattice_density(delta)
    checkpoints = [1 << k for k in range(cap.bit_length()) if (1 << k) < cap] + [cap]
    for rings in checkpoints:
        # Ring n lies entirely outside the disc of radius n·Δ·√3/2
        radius = rings * row
        count = int(np.searchsorted(rho2, radius**2, side="right"))
        direct = float(running[count - 1]) if count else 0.0
        u_edge = h / math.sqrt(radius**2 + h**2)
        tail = density * _continuum(scen, u_edge, truncation.tail_tolerance)
        if tail <= truncation.tail_tolerance * direct:
            break

    logger.debug(
        f"Lattice sum at delta={delta:.6g}: {count} sites in {rings}/{cap} rings, "
        f"tail {tail:.3e} of {direct + tail:.3e}"
    )
    return LatticeSum(direct + tail, rings, tail)


@lru_cache(maxsize=4096)
def lattice_sum(
    scen: Scenario, delta: float, truncation: Truncation = DEFAULT_TRUNCATION
) -> float:
    """Σ over lattice sites other than the origin of D^(-α)·W(θ)"""
    return truncated_lattice_sum(scen, delta, truncation).value


def eta(
    psd: float, delta: float, scen: Scenario, truncation: Truncation = DEFAULT_TRUNCATION
) -> float:
    """Interference-to-noise ratio at the origin terminal"""
    if psd == 0:
        return 0.0
    return psd / scen.noise_sigma2 * lattice_sum(scen, delta, truncation)


def gamma(psd: float, scen: Scenario) -> float:
    """Serving-link SNR at PSD `psd`"""
    return psd / scen.noise_sigma2 * scen.altitude ** (-scen.alpha)


def r_reg(
    psd: float, delta: float, scen: Scenario, truncation: Truncation = DEFAULT_TRUNCATION
) -> float:
    """Spectral efficiency of the regular configuration, bits/s/Hz/km²"""
    sinr = gamma(psd, scen) / (eta(psd, delta, scen, truncation) + 1)
    return lattice_density(delta) * math.log1p(sinr) / LN2


@dataclass(frozen=True)
class RegularAnalysis:
    scen: Scenario
    delta: float
    truncation: Truncation = DEFAULT_TRUNCATION

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise GeometryError("Spacing must be positive", details={"delta": self.delta})

    def theta(self, idx: LatticeIndex) -> float:
        return theta_reg(idx, self.delta, self.scen.altitude)

    def eta(self, psd: float) -> float:
        return eta(psd, self.delta, self.scen, self.truncation)

    def efficiency(self, psd: float) -> float:
        return r_reg(psd, self.delta, self.scen, self.truncation)


@dataclass
class DeltaOptimum:
    delta: float
    efficiency: float
    on_boundary: bool


def optimize_delta(
    psd: float,
    scen: Scenario,
    delta_range: tuple[float, float] = (1.0, 1000.0),
    grid_points: int = 128,
    rtol: float = 1e-4,
    truncation: Truncation = DEFAULT_TRUNCATION,
) -> DeltaOptimum:
    lo, hi = delta_range
    best = grid_then_golden(
        lambda d: r_reg(psd, d, scen, truncation), lo, hi, grid_points=grid_points, rtol=rtol
    )
    return DeltaOptimum(delta=best.x, efficiency=best.value, on_boundary=best.on_boundary)


@dataclass(frozen=True)
class PsdSegment:
    """Piecewise-constant PSD limit over [f_lo, f_hi)"""

    f_lo: float
    f_hi: float
    psd: float

    @property
    def width(self) -> float:
        return self.f_hi - self.f_lo


def wideband_upper_bound(
    scen: Scenario,
    psd_profile: Callable[[float], float] | None = None,
    subbands: Sequence[tuple[float, float]] | None = None,
    delta_range: tuple[float, float] = (1.0, 1000.0),
    truncation: Truncation = DEFAULT_TRUNCATION,
) -> float:
    """Bandwidth-weighted average of the per-subband optimized regular efficiency.

    The profile is sampled at each subband midpoint. Without arguments the whole band
    is one subband at psd_max.
    """
    if subbands is None:
        subbands = [(0.0, scen.bandwidth)]
    if psd_profile is None:
        psd_profile = lambda f: scen.psd_max  # noqa: E731

    segments = [PsdSegment(lo, hi, float(psd_profile((lo + hi) / 2))) for lo, hi in subbands]
    total = sum(s.width for s in segments)
    if not total > 0:
        raise GeometryError("Subbands must have positive total width")

    value = 0.0
    for seg in segments:
        if seg.psd <= 0:
            continue
        best = optimize_delta(seg.psd, scen, delta_range, truncation=truncation)
        value += seg.width * best.efficiency
    return value / total


def count_lattice_points(threshold: float) -> int:
    """Number of same-parity (i, j) ≠ (0, 0) with i² + 3j² ≤ threshold"""
    if threshold < 4:
        return 0
    limit = threshold * (1 + 1e-12)
    j_max = int(math.floor(math.sqrt(limit / 3)))
    count = 0
    for j in range(-j_max, j_max + 1):
        i_max = int(math.floor(math.sqrt(max(0.0, limit - 3 * j * j))))
        # i runs over values of the parity of j in [-i_max, i_max]
        lo = -i_max if (i_max - j) % 2 == 0 else -i_max + 1
        if lo > i_max:
            continue
        count += (i_max - lo) // 2 + 1
    return count - 1


def count_in_beam_region(delta: float, h: float, gamma_g: float) -> int:
    """Interfering lattice sites inside the terminal beam region"""
    if not delta > 0:
        raise GeometryError("Spacing must be positive", details={"delta": delta})
    return count_lattice_points(4 * h**2 * math.tan(gamma_g / 2) ** 2 / delta**2)


def minimum_interference(scen: Scenario, psd: float) -> float:
    """Weakest possible interference from one satellite inside the terminal beam region"""
    h = scen.altitude
    envelope = scen.with_patterns(PatternKind.MONOTONE_ENVELOPE)
    w = float(envelope.sat_pattern.gain(scen.gamma_s)) * float(
        envelope.gs_pattern.gain(scen.gamma_g)
    )
    return psd * (h**2 * (1 + math.tan(scen.gamma_g / 2) ** 2)) ** (-scen.alpha / 2) * w


def beam_region_upper_bound(scen: Scenario, delta: float, psd: float | None = None) -> float:
    """Upper bound on the regular efficiency under the beam-region constraints.

    The noise term is σ², the same normalization the regular efficiency uses.
    """
    psd = scen.psd_max if psd is None else psd
    x = count_in_beam_region(delta, scen.altitude, scen.gamma_g)
    signal = psd * scen.altitude ** (-scen.alpha)
    sinr = signal / (x * minimum_interference(scen, psd) + scen.noise_sigma2)
    return lattice_density(delta) * math.log1p(sinr) / LN2


def high_density_limit(psd: float, scen: Scenario) -> float:
    """Limit of the regular efficiency as Δ → 0, bits/s/Hz/km²"""
    if psd <= 0:
        return 0.0
    spread = _continuum(scen, 1.0, DEFAULT_TRUNCATION.tail_tolerance)
    if spread == 0:
        raise ConvergenceError("Pattern has no main lobe, limit is unbounded")
    return scen.altitude ** (-scen.alpha) / (spread * LN2)


@dataclass
class SinrGrid:
    x: NDArray[np.float64]
    y: NDArray[np.float64]
    sinr: NDArray[np.float64]

    def maximizer(self) -> tuple[float, float]:
        row, col = np.unravel_index(int(np.argmax(self.sinr)), self.sinr.shape)
        return float(self.x[col]), float(self.y[row])

    @property
    def spacing(self) -> tuple[float, float]:
        return float(self.x[1] - self.x[0]), float(self.y[1] - self.y[0])


def _cell_grid(delta: float, n: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    # n odd keeps the origin on the grid
    return (
        np.linspace(-delta / 2, delta / 2, n),
        np.linspace(-delta * SQRT3 / 2, delta * SQRT3 / 2, n),
    )


def _site_terms(
    scen: Scenario, delta: float, site: tuple[int, int], gx: NDArray, gy: NDArray
) -> NDArray[np.float64]:
    h = scen.altitude
    sx, sy = lattice_xy(site[0], site[1], delta)
    d2 = (gx - sx) ** 2 + (gy - sy) ** 2 + h**2
    theta = np.arccos(h / np.sqrt(d2))
    return d2 ** (-scen.alpha / 2) * scen.pattern_product(theta, theta)


def cell_sinr_grid(
    scen: Scenario,
    delta: float,
    n: int = 101,
    psd: float | None = None,
    rings: int = 20,
) -> SinrGrid:
    """SINR of a terminal moved across the fundamental cell while every beam stays vertical"""
    psd = scen.psd_max if psd is None else psd
    xs, ys = _cell_grid(delta, n)
    gx, gy = np.meshgrid(xs, ys)

    signal = psd * _site_terms(scen, delta, (0, 0), gx, gy)
    interference = np.zeros_like(gx)
    ring_i, ring_j = _disc_sites(rings)
    for i, j in zip(ring_i.tolist(), ring_j.tolist()):
        interference += psd * _site_terms(scen, delta, (i, j), gx, gy)
    return SinrGrid(xs, ys, signal / (interference + scen.noise_sigma2))


@dataclass
class ConvexityReport:
    min_second_difference: float
    fraction_nonnegative: float
    convex: bool
    points: int


def second_difference_report(values: NDArray[np.float64], tol: float = 1e-12) -> ConvexityReport:
    """Second differences of a 2-D sample along both axes; NaN entries are ignored"""
    values = np.asarray(values, dtype=float)
    dxx = values[:, 2:] - 2 * values[:, 1:-1] + values[:, :-2]
    dyy = values[2:, :] - 2 * values[1:-1, :] + values[:-2, :]
    diffs = np.concatenate([dxx.ravel(), dyy.ravel()])
    diffs = diffs[np.isfinite(diffs)]
    if diffs.size == 0:
        return ConvexityReport(float("nan"), float("nan"), False, 0)
    scale = max(1.0, float(np.nanmax(np.abs(values))))
    nonneg = diffs >= -tol * scale
    return ConvexityReport(
        min_second_difference=float(diffs.min()),
        fraction_nonnegative=float(nonneg.mean()),
        convex=bool(nonneg.all()),
        points=int(diffs.size),
    )


def ratio_convexity_report(
    scen: Scenario,
    delta: float,
    sites: Sequence[tuple[int, int]] | None = None,
    n: int = 51,
    floor: float = 1e-9,
) -> dict[tuple[int, int], ConvexityReport]:
    """Convexity of W_ij/W_00 over the fundamental cell, per interfering site.

    Points where the serving pattern falls below `floor` are excluded.
    """
    if sites is None:
        ring_i, ring_j = ring_indices(1)
        sites = list(zip(ring_i.tolist(), ring_j.tolist()))
    xs, ys = _cell_grid(delta, n)
    gx, gy = np.meshgrid(xs, ys)
    h = scen.altitude

    def pattern(site: tuple[int, int]) -> NDArray[np.float64]:
        sx, sy = lattice_xy(site[0], site[1], delta)
        theta = np.arccos(h / np.sqrt((gx - sx) ** 2 + (gy - sy) ** 2 + h**2))
        return scen.pattern_product(theta, theta)

    serving = pattern((0, 0))
    reports = {}
    for site in sites:
        ratio = np.where(serving > floor, pattern(tuple(site)) / np.maximum(serving, floor), np.nan)
        reports[tuple(site)] = second_difference_report(ratio)
    return reports


def representative_terminals(nx: int, ny: int, plan: ShufflePlan | None) -> NDArray[np.int64]:
    """One terminal per translation class of a periodic association on an nx × ny patch"""
    plan = (plan or ShufflePlan.identity()).normalized()
    reps_x = plan.block_x
    reps_y = max(plan.block_y, 2)
    rows = np.arange(reps_y)
    cols = np.arange(reps_x)
    return (rows[:, None] * nx + cols[None, :]).ravel()


def regular_constellation(
    scen: Scenario,
    delta: float,
    nx: int,
    ny: int,
    plan: ShufflePlan | None = None,
    psd: float | None = None,
) -> Constellation:
    """Toroidal regular patch with aligned beams, optionally with a shuffled association"""
    plan = (plan or ShufflePlan.identity()).normalized()
    if nx % plan.block_x or ny % max(plan.block_y, 2):
        raise AssociationError(
            "Patch size must be a multiple of the shuffle blocks",
            details={"nx": nx, "ny": ny, "plan": plan.label()},
        )

    patch = toroidal_patch(nx, ny, delta)
    sats = patch.positions(scen.earth.orbit_radius_km)
    terms = patch.positions(scen.earth.earth_radius_km)

    association = np.full(patch.size, -1, dtype=np.int64)
    for s, (i, j) in enumerate(zip(patch.i.tolist(), patch.j.tolist())):
        target = shuffle_2d(LatticeIndex(i, j), plan)
        association[patch.site_of(target.i, target.j)] = s
    if np.any(association < 0):
        raise AssociationError("Shuffle is not a bijection on this patch", details={"plan": plan.label()})

    psd_value = scen.full_band_psd if psd is None else psd
    torus = patch.torus
    return Constellation.aligned(
        sats,
        terms,
        association,
        torus=torus,
        area_km2=torus[0] * torus[1],
        beam_psd=np.full(patch.size, psd_value),
        metadata={
            "delta": delta,
            "plan": plan.label(),
            "representatives": representative_terminals(nx, ny, plan),
        },
    )

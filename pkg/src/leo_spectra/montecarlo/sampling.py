from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
import logging
import math

import numpy as np
from numpy.typing import NDArray

from leo_spectra.analysis.regular import regular_constellation
from leo_spectra.association.hungarian import min_distance_association
from leo_spectra.physics.geometry import (
    EarthMode,
    EarthModel,
    ProjectionLayer,
    field_of_view_angle,
    lattice_density,
    project_points,
)
from leo_spectra.physics.link import Constellation, Scenario
from leo_spectra.utils.errors import GeometryError

logger = logging.getLogger(__name__)


class SpacingConvention(str, Enum):
    # Same density as the hexagonal lattice of spacing Δ
    DENSITY_MATCHED = "density_matched"
    # Mean nearest-neighbour distance of the uniform field equals Δ
    NEAREST_NEIGHBOR = "nearest_neighbor"


def density_for_spacing(delta: float, convention: SpacingConvention) -> float:
    if convention == SpacingConvention.NEAREST_NEIGHBOR:
        if not delta > 0:
            raise GeometryError("Spacing must be positive", details={"delta": delta})
        return 1.0 / (4.0 * delta**2)
    return lattice_density(delta)


def planar_count(
    delta: float,
    window: tuple[float, float],
    convention: SpacingConvention = SpacingConvention.DENSITY_MATCHED,
) -> int:
    width, height = window
    if not (width > 0 and height > 0):
        raise GeometryError("Window area must be positive", details={"window": window})
    return int(round(width * height * density_for_spacing(delta, convention)))


def sample_uniform_planar(
    delta: float,
    window: tuple[float, float],
    rng: np.random.Generator,
    convention: SpacingConvention = SpacingConvention.DENSITY_MATCHED,
) -> NDArray[np.float64]:
    """(N, 2) points uniform in [0, W) × [0, H) with N fixed by the spacing convention"""
    n = planar_count(delta, window, convention)
    return rng.uniform((0.0, 0.0), window, size=(n, 2))


def sample_cap_angles(
    n: int, cap: float, rng: np.random.Generator
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Polar and azimuth angles of n uniform points in a spherical cap of half-angle `cap`"""
    if n < 0:
        raise GeometryError("Sample count must be non-negative", details={"n": n})
    u = rng.uniform(size=n)
    zeta = np.arccos(1.0 - u * (1.0 - math.cos(cap)))
    phi = rng.uniform(0.0, 2 * math.pi, size=n)
    return zeta, phi


def _on_sphere(radius: float, zeta: NDArray, phi: NDArray) -> NDArray[np.float64]:
    return radius * np.column_stack(
        [np.sin(zeta) * np.cos(phi), np.sin(zeta) * np.sin(phi), np.cos(zeta)]
    )


def sample_bpp_spherical(
    n: int, earth: EarthModel, rng: np.random.Generator, cap: float | None = None
) -> NDArray[np.float64]:
    """n satellites uniform over the orbital-shell cap seen from (0, 0, r_e)"""
    if n < 1:
        raise GeometryError("Need at least one satellite", details={"n": n})
    cap = field_of_view_angle(earth) if cap is None else cap
    zeta, phi = sample_cap_angles(n, cap, rng)
    return _on_sphere(earth.orbit_radius_km, zeta, phi)


class ConstellationGenerator(ABC):
    """Draws one random constellation per call"""

    name: str

    @abstractmethod
    def sample(self, scen: Scenario, rng: np.random.Generator) -> Constellation:
        pass


@dataclass
class PlanarUniformGenerator(ConstellationGenerator):
    delta: float
    window: tuple[float, float]
    beams_per_satellite: int = 1
    convention: SpacingConvention = SpacingConvention.DENSITY_MATCHED
    name: str = "planar_uniform"

    def sample(self, scen: Scenario, rng: np.random.Generator) -> Constellation:
        earth = scen.earth
        sats_xy = sample_uniform_planar(self.delta, self.window, rng, self.convention)
        terms_xy = rng.uniform(
            (0.0, 0.0), self.window, size=(len(sats_xy) * self.beams_per_satellite, 2)
        )
        sats = np.column_stack([sats_xy, np.full(len(sats_xy), earth.orbit_radius_km)])
        terms = np.column_stack([terms_xy, np.full(len(terms_xy), earth.earth_radius_km)])

        torus = (float(self.window[0]), float(self.window[1]))
        assignment = min_distance_association(sats, terms, torus, self.beams_per_satellite)
        return Constellation.aligned(
            sats,
            terms,
            assignment.mapping,
            torus=torus,
            area_km2=torus[0] * torus[1],
            mode=EarthMode.PLANAR,
        )


def draw_spherical(
    scen: Scenario, n: int, rng: np.random.Generator
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """n satellites and n terminals in the typical terminal's field of view, that terminal first"""
    earth = scen.earth
    sats = sample_bpp_spherical(n, earth, rng)
    zeta, phi = sample_cap_angles(n - 1, field_of_view_angle(earth), rng)
    typical = np.array([[0.0, 0.0, earth.earth_radius_km]])
    terms = np.vstack([typical, _on_sphere(earth.earth_radius_km, zeta, phi)])
    return sats, terms


@dataclass
class SphericalBppGenerator(ConstellationGenerator):
    num_satellites: int
    name: str = "spherical_bpp"

    def sample(self, scen: Scenario, rng: np.random.Generator) -> Constellation:
        sats, terms = draw_spherical(scen, self.num_satellites, rng)
        return spherical_constellation(sats, terms)


@dataclass
class PlanarProjectedGenerator(ConstellationGenerator):
    """The spherical draw radially projected onto the two planes, association kept"""

    num_satellites: int
    name: str = "planar_projected"

    def sample(self, scen: Scenario, rng: np.random.Generator) -> Constellation:
        sats, terms = draw_spherical(scen, self.num_satellites, rng)
        return projected_constellation(scen, spherical_constellation(sats, terms))


def spherical_constellation(sats: NDArray[np.float64], terms: NDArray[np.float64]) -> Constellation:
    assignment = min_distance_association(sats, terms)
    return Constellation.aligned(
        sats, terms, assignment.mapping, mode=EarthMode.SPHERICAL, metadata={"typical": 0}
    )


def projected_constellation(scen: Scenario, spherical: Constellation) -> Constellation:
    sats = project_points(spherical.sat_positions, scen.earth, ProjectionLayer.SATELLITE)
    terms = project_points(spherical.term_positions, scen.earth, ProjectionLayer.TERMINAL)
    return Constellation.aligned(
        sats, terms, spherical.association, mode=EarthMode.PLANAR, metadata={"typical": 0}
    )


@dataclass
class RegularGenerator(ConstellationGenerator):
    """The regular lattice patch, returned unchanged for every draw"""

    delta: float
    nx: int = 64
    ny: int = 64
    name: str = "regular"

    def sample(self, scen: Scenario, rng: np.random.Generator) -> Constellation:
        return regular_constellation(scen, self.delta, self.nx, self.ny)

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass
from enum import Enum
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from leo_spectra.utils.errors import (
    BelowHorizonError,
    DegenerateGeometryError,
    GeometryError,
    InvalidIndexError,
)

EARTH_RADIUS_KM = 6378.0
SQRT3 = math.sqrt(3.0)


class EarthMode(str, Enum):
    SPHERICAL = "spherical"
    PLANAR = "planar"


class ProjectionLayer(str, Enum):
    SATELLITE = "satellite"
    TERMINAL = "terminal"


@dataclass(frozen=True)
class EarthModel:
    altitude_km: float
    earth_radius_km: float = EARTH_RADIUS_KM
    mode: EarthMode = EarthMode.PLANAR

    def __post_init__(self) -> None:
        if not self.earth_radius_km > 0:
            raise GeometryError(
                "Earth radius must be positive",
                details={"earth_radius_km": self.earth_radius_km},
            )
        if not self.altitude_km > 0:
            raise GeometryError(
                "Altitude must be positive", details={"altitude_km": self.altitude_km}
            )

    @property
    def orbit_radius_km(self) -> float:
        return self.earth_radius_km + self.altitude_km

    def layer_height(self, layer: ProjectionLayer) -> float:
        if layer == ProjectionLayer.SATELLITE:
            return self.orbit_radius_km
        return self.earth_radius_km


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise GeometryError(
                "Point components must be finite",
                details={"x": self.x, "y": self.y, "z": self.z},
            )

    def __iter__(self) -> Iterator[float]:
        return iter((self.x, self.y, self.z))

    def as_array(self) -> NDArray[np.float64]:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, values: ArrayLike) -> Point3:
        x, y, z = (float(v) for v in np.asarray(values, dtype=float).reshape(3))
        return cls(x, y, z)


@dataclass(frozen=True)
class LatticeIndex:
    i: int
    j: int

    def __post_init__(self) -> None:
        if (self.i - self.j) % 2 != 0:
            raise InvalidIndexError(self.i, self.j)

    @property
    def is_origin(self) -> bool:
        return self.i == 0 and self.j == 0

    def hex_distance(self, other: LatticeIndex | None = None) -> int:
        """Number of nearest-neighbour hops between two sites"""
        di = self.i - (other.i if other else 0)
        dj = self.j - (other.j if other else 0)
        return max(abs(dj), (abs(di) + abs(dj)) // 2)


def _vec(p: Point3 | ArrayLike) -> NDArray[np.float64]:
    if isinstance(p, Point3):
        return p.as_array()
    return np.asarray(p, dtype=float)


def regular_satellite_position(
    idx: LatticeIndex, delta: float, earth: EarthModel
) -> Point3:
    if not delta > 0:
        raise GeometryError("Spacing must be positive", details={"delta": delta})
    return Point3(idx.i * delta / 2, idx.j * delta * SQRT3 / 2, earth.orbit_radius_km)


def regular_terminal_position(
    idx: LatticeIndex, delta: float, earth: EarthModel
) -> Point3:
    if not delta > 0:
        raise GeometryError("Spacing must be positive", details={"delta": delta})
    return Point3(idx.i * delta / 2, idx.j * delta * SQRT3 / 2, earth.earth_radius_km)


def off_axis_angle(
    beam_origin: Point3 | ArrayLike,
    look_dir: Point3 | ArrayLike,
    target: Point3 | ArrayLike,
) -> float:
    """Angle between a boresight and the direction from the beam origin to `target`, in radians"""
    look = _vec(look_dir)
    look_norm = np.linalg.norm(look)
    if look_norm == 0:
        raise DegenerateGeometryError("Look direction has zero length")

    direction = _vec(target) - _vec(beam_origin)
    distance = np.linalg.norm(direction)
    if distance == 0:
        raise DegenerateGeometryError("Target coincides with the beam origin")

    cosine = float(np.dot(look, direction) / (look_norm * distance))
    return math.acos(min(1.0, max(-1.0, cosine)))


def field_of_view_angle(earth: EarthModel) -> float:
    """Largest central angle at which a satellite is still above a terminal's horizon"""
    return math.acos(earth.earth_radius_km / earth.orbit_radius_km)


def central_angle(a: ArrayLike, b: ArrayLike) -> NDArray[np.float64]:
    """Angle at the Earth's centre between position vectors; broadcasts over leading axes"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cosine = np.sum(a * b, axis=-1) / (
        np.linalg.norm(a, axis=-1) * np.linalg.norm(b, axis=-1)
    )
    return np.arccos(np.clip(cosine, -1.0, 1.0))


def project_to_plane(
    p: Point3 | ArrayLike, earth: EarthModel, layer: ProjectionLayer
) -> Point3:
    coords = _vec(p)
    if coords[2] <= 0:
        raise BelowHorizonError(
            "Cannot project a point with non-positive height",
            details={"z": float(coords[2])},
        )
    return Point3.from_array(project_points(coords[None, :], earth, layer)[0])


def project_points(
    points: ArrayLike, earth: EarthModel, layer: ProjectionLayer
) -> NDArray[np.float64]:
    """Radial projection of (n, 3) Earth-centred points onto the plane z = layer height"""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if np.any(points[:, 2] <= 0):
        raise BelowHorizonError("Cannot project points with non-positive height")
    rho = earth.layer_height(layer) / points[:, 2]
    return points * rho[:, None]


def lattice_density(delta: float) -> float:
    """Sites per km² of the hexagonal lattice with nearest-neighbour spacing `delta`"""
    if not delta > 0:
        raise GeometryError("Spacing must be positive", details={"delta": delta})
    return 2.0 / (SQRT3 * delta**2)


def ring_indices(n: int) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """Index pairs of the 6n lattice sites at hex distance n from the origin"""
    if n == 0:
        return np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64)

    # Top and bottom rows of the ring
    edge_i = np.arange(-n, n + 1, 2, dtype=np.int64)
    i_parts = [edge_i, edge_i]
    j_parts = [np.full_like(edge_i, n), np.full_like(edge_i, -n)]

    # Left and right flanks
    side_j = np.arange(-n + 1, n, dtype=np.int64)
    side_i = 2 * n - np.abs(side_j)
    i_parts += [side_i, -side_i]
    j_parts += [side_j, side_j]

    return np.concatenate(i_parts), np.concatenate(j_parts)


def lattice_patch(center: LatticeIndex, radius: int) -> Iterator[LatticeIndex]:
    """Lazily walk every site within `radius` hops of `center`, ring by ring"""
    for n in range(radius + 1):
        ring_i, ring_j = ring_indices(n)
        for di, dj in zip(ring_i.tolist(), ring_j.tolist()):
            yield LatticeIndex(center.i + di, center.j + dj)


def lattice_xy(
    i: ArrayLike, j: ArrayLike, delta: float
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    return (
        np.asarray(i, dtype=float) * delta / 2,
        np.asarray(j, dtype=float) * delta * SQRT3 / 2,
    )


@dataclass(frozen=True)
class ToroidalPatch:
    """Period cell of the regular lattice; row `j` holds sites with x index a = 0..nx-1"""

    nx: int
    ny: int
    delta: float
    i: NDArray[np.int64]
    j: NDArray[np.int64]

    @property
    def torus(self) -> tuple[float, float]:
        return (self.nx * self.delta, self.ny * self.delta * SQRT3 / 2)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    def positions(self, height: float) -> NDArray[np.float64]:
        x, y = lattice_xy(self.i, self.j, self.delta)
        return np.column_stack([x, y, np.full_like(x, height)])

    def site_of(self, i: int, j: int) -> int:
        """Flat index of lattice site (i, j) after wrapping into the cell"""
        jj = j % self.ny
        a = ((i - (j % 2)) // 2) % self.nx
        return jj * self.nx + a


def toroidal_patch(nx: int, ny: int, delta: float) -> ToroidalPatch:
    if nx < 1 or ny < 2 or ny % 2 != 0:
        raise GeometryError(
            "Toroidal patch needs nx >= 1 and an even ny >= 2",
            details={"nx": nx, "ny": ny},
        )
    if not delta > 0:
        raise GeometryError("Spacing must be positive", details={"delta": delta})

    j = np.repeat(np.arange(ny, dtype=np.int64), nx)
    a = np.tile(np.arange(nx, dtype=np.int64), ny)
    i = 2 * a + (j % 2)
    return ToroidalPatch(nx=nx, ny=ny, delta=delta, i=i, j=j)


def minimum_image(
    displacement: NDArray[np.float64], torus: tuple[float, float] | None
) -> NDArray[np.float64]:
    """Wrap the x/y components of displacement vectors onto the torus, z untouched"""
    if torus is None:
        return displacement
    wrapped = np.array(displacement, dtype=float, copy=True)
    for axis, period in enumerate(torus):
        component = wrapped[..., axis]
        wrapped[..., axis] = component - period * np.round(component / period)
    return wrapped

from __future__ import annotations

from dataclasses import dataclass
import logging
import math

import numpy as np
from numpy.typing import NDArray

from leo_spectra.utils.errors import SpectrumError

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)


def _pairs(max_m: int):
    for m in range(1, math.isqrt(max_m) + 1):
        for n in range(0, m + 1):
            value = m * m + m * n + n * n
            if value <= max_m:
                yield value, m, n


def valid_reuse_numbers(max_m: int) -> list[int]:
    """Cluster sizes m² + mn + n² not larger than `max_m`"""
    if max_m < 1:
        raise SpectrumError("max_M must be at least 1", nearest_valid=[1])
    return sorted({value for value, _, _ in _pairs(max_m)})


def _nearest_valid(value: int) -> list[int]:
    candidates = valid_reuse_numbers(max(4, 2 * value))
    below = [c for c in candidates if c < value]
    above = [c for c in candidates if c > value]
    return ([below[-1]] if below else []) + ([above[0]] if above else [])


def reuse_pair(num_subbands: int) -> tuple[int, int]:
    """The (m, n), m ≥ n ≥ 0, with m² + mn + n² = M"""
    if num_subbands >= 1:
        for value, m, n in _pairs(num_subbands):
            if value == num_subbands:
                return m, n
    raise SpectrumError(
        f"{num_subbands} subbands cannot form a hexagonal reuse cluster",
        nearest_valid=_nearest_valid(max(1, num_subbands)),
    )


@dataclass(frozen=True)
class Window:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise SpectrumError("Window must have positive width and height")

    @classmethod
    def from_torus(cls, torus: tuple[float, float]) -> Window:
        return cls(0.0, 0.0, torus[0], torus[1])

    @classmethod
    def bounding(cls, xy: NDArray[np.float64], margin: float = 0.0) -> Window:
        lo = xy.min(axis=0) - margin
        hi = xy.max(axis=0) + margin
        # Degenerate extents still get a usable window
        hi = np.maximum(hi, lo + 1e-6)
        return cls(float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2)


@dataclass(frozen=True, eq=False)
class HexLayout:
    num_subbands: int
    reuse_distance: float
    side: float
    centers: NDArray[np.float64]
    labels: NDArray[np.int64]
    # Per-axis stretch of a torus-periodic layout
    stretch: tuple[float, float] = (1.0, 1.0)


def _coset_labels(q: NDArray[np.int64], r: NDArray[np.int64], m: int, n: int) -> NDArray[np.int64]:
    """Label 1..M of each cell, equal labels exactly when cells differ by a co-channel shift"""
    size = m * m + m * n + n * n
    key_a = ((m + n) * q + n * r) % size
    key_b = (-n * q + m * r) % size

    # Number cosets in first-appearance order over one period so the origin gets label 1
    table: dict[tuple[int, int], int] = {}
    for qq in range(size):
        for rr in range(size):
            key = (((m + n) * qq + n * rr) % size, (-n * qq + m * rr) % size)
            if key not in table:
                table[key] = len(table) + 1
    lookup = np.zeros((size, size), dtype=np.int64)
    for (a, b), label in table.items():
        lookup[a, b] = label
    return lookup[key_a, key_b]


def hex_layout(
    num_subbands: int,
    reuse_distance: float,
    window: Window,
    offset: tuple[float, float] = (0.0, 0.0),
) -> HexLayout:
    """Flat-top hexagonal cells of side L/√(3M) covering `window`, labelled by reuse cluster"""
    m, n = reuse_pair(num_subbands)
    if not reuse_distance > 0:
        raise SpectrumError("Reuse distance must be positive", details={"L": reuse_distance})

    side = reuse_distance / math.sqrt(3 * num_subbands)
    # Cell (q, r) is centred at q·(1.5a, √3a/2) + r·(0, √3a) + offset
    ux, uy, vy = 1.5 * side, SQRT3 * side / 2, SQRT3 * side
    ox, oy = offset

    q_lo = math.ceil((window.x_min - ox) / ux)
    q_hi = math.floor((window.x_max - ox) / ux)
    qs, rs = [], []
    for q in range(q_lo, q_hi + 1):
        base = oy + q * uy
        r_lo = math.ceil((window.y_min - base) / vy)
        r_hi = math.floor((window.y_max - base) / vy)
        if r_hi >= r_lo:
            r = np.arange(r_lo, r_hi + 1, dtype=np.int64)
            qs.append(np.full_like(r, q))
            rs.append(r)

    if qs:
        q_arr = np.concatenate(qs)
        r_arr = np.concatenate(rs)
    else:
        # Window fits inside one cell: keep the centre nearest to it
        cx, cy = window.center
        q0 = round((cx - ox) / ux)
        r0 = round((cy - oy - q0 * uy) / vy)
        q_arr = np.array([q0], dtype=np.int64)
        r_arr = np.array([r0], dtype=np.int64)

    centers = np.column_stack([ox + q_arr * ux, oy + q_arr * uy + r_arr * vy])
    labels = _coset_labels(q_arr, r_arr, m, n)
    logger.debug(f"Hex layout M={num_subbands}, L={reuse_distance:.4g}: {len(centers)} cells")
    return HexLayout(num_subbands, reuse_distance, side, centers, labels)


def _is_cochannel(q: int, r: int, m: int, n: int) -> bool:
    size = m * m + m * n + n * n
    return ((m + n) * q + n * r) % size == 0 and (-n * q + m * r) % size == 0


def periodic_hex_layout(
    num_subbands: int,
    reuse_distance: float,
    torus: tuple[float, float],
    offset: tuple[float, float] = (0.0, 0.0),
) -> HexLayout:
    """Hex cells tiling a torus so that the reuse pattern continues across its seams.

    Each axis is stretched by the smallest factor >= 1 that fits a whole number of
    co-channel periods, which keeps same-label centres at least L apart on the torus.
    """
    m, n = reuse_pair(num_subbands)
    if not reuse_distance > 0:
        raise SpectrumError("Reuse distance must be positive", details={"L": reuse_distance})
    window = Window.from_torus(torus)
    tx, ty = window.x_max, window.y_max

    side = reuse_distance / math.sqrt(3 * num_subbands)
    # Shortest co-channel shifts along x, (q, r) = (2k, -k), and along y, (0, r)
    kx = next(k for k in range(1, num_subbands + 1) if _is_cochannel(2 * k, -k, m, n))
    ry = next(r for r in range(1, num_subbands + 1) if _is_cochannel(0, r, m, n))
    period_x = 3 * side * kx
    period_y = SQRT3 * side * ry

    cx = max(1, math.floor(tx / period_x))
    cy = max(1, math.floor(ty / period_y))
    if tx < period_x or ty < period_y:
        logger.warning(
            f"Torus {tx:.4g}x{ty:.4g} km is smaller than one reuse period "
            f"({period_x:.4g}x{period_y:.4g} km), co-channel cells come closer than L={reuse_distance:.4g}"
        )
    sx = tx / (cx * period_x)
    sy = ty / (cy * period_y)

    q, r = np.meshgrid(
        np.arange(2 * kx * cx, dtype=np.int64), np.arange(ry * cy, dtype=np.int64), indexing="ij"
    )
    q, r = q.ravel(), r.ravel()
    x = q * 1.5 * side * sx
    y = np.mod(q * SQRT3 * side / 2 + r * SQRT3 * side, cy * period_y) * sy
    ox, oy = offset
    centers = np.column_stack([np.mod(x + ox, tx), np.mod(y + oy, ty)])
    labels = _coset_labels(q, r, m, n)
    logger.debug(
        f"Periodic hex layout M={num_subbands}, L={reuse_distance:.4g}: "
        f"{len(centers)} cells, stretch ({sx:.4f}, {sy:.4f})"
    )
    return HexLayout(num_subbands, reuse_distance, side, centers, labels, (sx, sy))

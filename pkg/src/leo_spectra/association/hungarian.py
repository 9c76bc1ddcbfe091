from __future__ import annotations

from dataclasses import dataclass
import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import linear_sum_assignment

from leo_spectra.physics.geometry import minimum_image
from leo_spectra.utils.errors import AssociationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Assignment:
    """Terminal k is served by satellite `mapping[k]`"""

    mapping: NDArray[np.int64]
    cost: float

    def __len__(self) -> int:
        return len(self.mapping)

    def terminals_of(self, i: int) -> NDArray[np.int64]:
        return np.flatnonzero(self.mapping == i)


def squared_distances(
    sat_positions: ArrayLike,
    term_positions: ArrayLike,
    torus: tuple[float, float] | None = None,
) -> NDArray[np.float64]:
    """(terminals, satellites) matrix of squared link lengths"""
    sats = np.asarray(sat_positions, dtype=float).reshape(-1, 3)
    terms = np.asarray(term_positions, dtype=float).reshape(-1, 3)
    disp = minimum_image(terms[:, None, :] - sats[None, :, :], torus)
    return np.sum(disp**2, axis=-1)


def assignment_cost(
    mapping: ArrayLike,
    sat_positions: ArrayLike,
    term_positions: ArrayLike,
    torus: tuple[float, float] | None = None,
) -> float:
    mapping = np.asarray(mapping, dtype=np.int64)
    d2 = squared_distances(sat_positions, term_positions, torus)
    return float(np.sum(d2[np.arange(len(mapping)), mapping]))


def min_distance_association(
    sat_positions: ArrayLike,
    term_positions: ArrayLike,
    torus: tuple[float, float] | None = None,
    beams_per_satellite: int = 1,
) -> Assignment:
    """Exact minimum total squared-distance association.

    With several beams per satellite every satellite column is replicated once per
    beam, so each satellite ends up serving exactly `beams_per_satellite` terminals.
    """
    sats = np.asarray(sat_positions, dtype=float).reshape(-1, 3)
    terms = np.asarray(term_positions, dtype=float).reshape(-1, 3)
    if beams_per_satellite < 1:
        raise AssociationError(
            "Each satellite needs at least one beam",
            details={"beams_per_satellite": beams_per_satellite},
        )
    if len(terms) != beams_per_satellite * len(sats):
        raise AssociationError(
            "Terminal count must equal satellites times beams per satellite",
            details={
                "satellites": len(sats),
                "terminals": len(terms),
                "beams_per_satellite": beams_per_satellite,
            },
        )
    if len(terms) == 0:
        return Assignment(mapping=np.zeros(0, dtype=np.int64), cost=0.0)

    d2 = squared_distances(sats, terms, torus)
    cost_matrix = np.tile(d2, (1, beams_per_satellite))
    rows, cols = linear_sum_assignment(cost_matrix)

    mapping = np.empty(len(terms), dtype=np.int64)
    mapping[rows] = cols % len(sats)
    cost = float(cost_matrix[rows, cols].sum())
    logger.debug(f"Associated {len(terms)} terminals to {len(sats)} satellites, cost {cost:.6g}")
    return Assignment(mapping=mapping, cost=cost)

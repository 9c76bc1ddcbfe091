from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
import logging
import math
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial import cKDTree

from leo_spectra.physics.link import (
    Constellation,
    Scenario,
    gain_matrix,
    spectral_efficiency_wideband,
)
from leo_spectra.spectrum.reuse import HexLayout, Window, hex_layout, periodic_hex_layout, reuse_pair
from leo_spectra.utils.errors import SpectrumError

logger = logging.getLogger(__name__)

_TIE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpectrumPlan:
    """Subband sets per terminal (G_k) and per satellite (S_i) with their PSD levels.

    Subbands are labelled 1..M and have equal width B/M.
    """

    num_subbands: int
    reuse_distance: float | None
    hex_side: float | None
    centers: NDArray[np.float64]
    labels: NDArray[np.int64]
    terminal_subbands: tuple[frozenset[int], ...]
    satellite_subbands: tuple[frozenset[int], ...]
    satellite_psd: NDArray[np.float64]
    beam_psd: NDArray[np.float64]
    association: NDArray[np.int64]

    def subband_matrix(self) -> NDArray[np.bool_]:
        """(beams, M) mask, True where beam k transmits on subband m+1"""
        holds = np.zeros((len(self.terminal_subbands), self.num_subbands), dtype=bool)
        for k, subbands in enumerate(self.terminal_subbands):
            for label in subbands:
                holds[k, label - 1] = True
        return holds

    @property
    def served(self) -> NDArray[np.bool_]:
        return np.array([bool(g) for g in self.terminal_subbands])

    def check_consistency(self) -> list[str]:
        """Violations of G_k ⊆ S_F(k) and S_i = ∪ G_k"""
        problems = []
        unions: list[set[int]] = [set() for _ in self.satellite_subbands]
        for k, subbands in enumerate(self.terminal_subbands):
            server = int(self.association[k])
            if not subbands <= self.satellite_subbands[server]:
                problems.append(f"terminal {k} holds subbands its satellite {server} lacks")
            unions[server] |= subbands
        for i, (union, declared) in enumerate(zip(unions, self.satellite_subbands)):
            if union != declared:
                problems.append(f"satellite {i} subbands differ from its terminals' union")
        return problems

    def to_dict(self) -> dict[str, Any]:
        return {
            "num_subbands": self.num_subbands,
            "reuse_distance_km": self.reuse_distance,
            "hex_side_km": self.hex_side,
            "centers": self.centers.tolist(),
            "labels": self.labels.tolist(),
            "terminal_subbands": [sorted(g) for g in self.terminal_subbands],
            "satellite_subbands": [sorted(s) for s in self.satellite_subbands],
            "satellite_psd": self.satellite_psd.tolist(),
            "beam_psd": self.beam_psd.tolist(),
        }


def nearest_terminal(
    term_xy: ArrayLike,
    points: ArrayLike,
    torus: tuple[float, float] | None = None,
) -> NDArray[np.int64]:
    """Index of the terminal nearest to each point, lowest index on ties"""
    terms = np.asarray(term_xy, dtype=float).reshape(-1, 2)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(terms) == 0:
        raise SpectrumError("Need at least one terminal")
    if len(pts) == 0:
        return np.zeros(0, dtype=np.int64)

    if torus is not None:
        box = np.asarray(torus, dtype=float)
        tree = cKDTree(np.mod(terms, box), boxsize=box)
        pts = np.mod(pts, box)
    else:
        tree = cKDTree(terms)

    k = min(4, len(terms))
    dist, idx = tree.query(pts, k=k)
    if k == 1:
        return idx.astype(np.int64)

    # Among the candidates tied with the nearest, keep the lowest terminal index
    tied = dist <= dist[:, :1] * (1 + _TIE_TOL) + _TIE_TOL
    masked = np.where(tied, idx, np.iinfo(np.int64).max)
    return masked.min(axis=1).astype(np.int64)


def voronoi_assign(
    term_positions: ArrayLike,
    hex_centers: ArrayLike,
    labels: ArrayLike,
    torus: tuple[float, float] | None = None,
) -> list[frozenset[int]]:
    """G_k: labels of the hexagon centres whose nearest terminal is k (empty when unserved)"""
    terms = np.asarray(term_positions, dtype=float)
    terms_xy = terms[:, :2] if terms.ndim == 2 and terms.shape[1] >= 2 else terms.reshape(-1, 2)
    labels = np.asarray(labels, dtype=np.int64)
    owner = nearest_terminal(terms_xy, hex_centers, torus)

    sets: list[set[int]] = [set() for _ in range(len(terms_xy))]
    for k, label in zip(owner.tolist(), labels.tolist()):
        sets[k].add(label)
    return [frozenset(s) for s in sets]


def psd_levels(
    scen: Scenario, subband_sets: Sequence[frozenset[int]], num_subbands: int
) -> NDArray[np.float64]:
    """Constant PSD per transmitter: psd_max unless its power would exceed P_max"""
    counts = np.array([len(s) for s in subband_sets], dtype=float)
    occupied = counts * scen.bandwidth / num_subbands
    with np.errstate(divide="ignore"):
        power_limited = np.where(occupied > 0, scen.p_max / np.maximum(occupied, 1e-300), 0.0)
    return np.where(counts > 0, np.minimum(scen.psd_max, power_limited), 0.0)


def _assemble(
    scen: Scenario,
    constellation: Constellation,
    num_subbands: int,
    terminal_subbands: list[frozenset[int]],
    layout: HexLayout | None,
) -> SpectrumPlan:
    satellite_sets: list[set[int]] = [set() for _ in range(constellation.num_satellites)]
    for k, subbands in enumerate(terminal_subbands):
        satellite_sets[int(constellation.association[k])] |= subbands
    frozen_sats = tuple(frozenset(s) for s in satellite_sets)

    return SpectrumPlan(
        num_subbands=num_subbands,
        reuse_distance=layout.reuse_distance if layout else None,
        hex_side=layout.side if layout else None,
        centers=layout.centers if layout else np.zeros((0, 2)),
        labels=layout.labels if layout else np.zeros(0, dtype=np.int64),
        terminal_subbands=tuple(terminal_subbands),
        satellite_subbands=frozen_sats,
        satellite_psd=psd_levels(scen, frozen_sats, num_subbands),
        # Every spot beam meets the PSD and power limits on its own
        beam_psd=psd_levels(scen, terminal_subbands, num_subbands),
        association=constellation.association,
    )


def full_reuse_plan(scen: Scenario, constellation: Constellation) -> SpectrumPlan:
    """M = 1: every terminal uses the whole band"""
    sets = [frozenset({1}) for _ in range(constellation.num_beams)]
    return _assemble(scen, constellation, 1, sets, None)


def build_spectrum_plan(
    scen: Scenario,
    constellation: Constellation,
    num_subbands: int,
    reuse_distance: float,
    offset: tuple[float, float] = (0.0, 0.0),
) -> SpectrumPlan:
    reuse_pair(num_subbands)
    if num_subbands == 1:
        return full_reuse_plan(scen, constellation)

    terms_xy = constellation.term_positions[:, :2]
    if constellation.torus is not None:
        layout = periodic_hex_layout(num_subbands, reuse_distance, constellation.torus, offset)
    else:
        layout = hex_layout(num_subbands, reuse_distance, Window.bounding(terms_xy), offset)
    sets = voronoi_assign(terms_xy, layout.centers, layout.labels, constellation.torus)
    plan = _assemble(scen, constellation, num_subbands, sets, layout)
    logger.debug(
        f"Plan M={num_subbands}, L={reuse_distance:.4g}: "
        f"{int(plan.served.sum())}/{len(sets)} terminals served"
    )
    return plan


@dataclass
class ReuseOptimum:
    reuse_distance: float
    efficiency: float
    plan: SpectrumPlan
    grid: list[tuple[float, float]]


def optimize_reuse_distance(
    scen: Scenario,
    constellation: Constellation,
    num_subbands: int,
    l_values: Sequence[float],
    gains: NDArray[np.float64] | None = None,
    offset: tuple[float, float] = (0.0, 0.0),
) -> ReuseOptimum:
    """Grid search over reuse distances for the best wideband efficiency"""
    reuse_pair(num_subbands)
    if len(l_values) == 0:
        raise SpectrumError("Need at least one reuse distance")
    if gains is None:
        gains = gain_matrix(scen, constellation)

    if num_subbands == 1:
        plan = full_reuse_plan(scen, constellation)
        value = spectral_efficiency_wideband(scen, constellation, plan, gains)
        return ReuseOptimum(float(l_values[0]), value, plan, [(float(l), value) for l in l_values])

    best: ReuseOptimum | None = None
    grid = []
    for length in l_values:
        plan = build_spectrum_plan(scen, constellation, num_subbands, float(length), offset)
        value = spectral_efficiency_wideband(scen, constellation, plan, gains)
        grid.append((float(length), value))
        if best is None or value > best.efficiency:
            best = ReuseOptimum(float(length), value, plan, grid)
    return best


def reuse_distance_grid(delta: float, factors: Sequence[float]) -> list[float]:
    """Candidate reuse distances as multiples of the spacing"""
    return [delta * f for f in factors if f > 0 and math.isfinite(f)]

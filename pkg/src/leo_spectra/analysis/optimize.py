from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
import logging

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize_scalar

from leo_spectra.utils.errors import SpectraError

logger = logging.getLogger(__name__)


@dataclass
class ScalarOptimum:
    x: float
    value: float
    on_boundary: bool
    grid: NDArray[np.float64]
    grid_values: NDArray[np.float64]


def grid_then_golden(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    grid_points: int = 128,
    rtol: float = 1e-4,
    log_grid: bool = True,
) -> ScalarOptimum:
    """Maximize `func` on [lo, hi]: coarse grid first, golden-section around the best grid point"""
    if not 0 < lo < hi:
        raise SpectraError("Search range must satisfy 0 < lo < hi", details={"lo": lo, "hi": hi})
    if grid_points < 3:
        raise SpectraError("Need at least 3 grid points", details={"grid_points": grid_points})

    grid = np.geomspace(lo, hi, grid_points) if log_grid else np.linspace(lo, hi, grid_points)
    values = np.array([func(float(x)) for x in grid])
    best = int(np.argmax(values))

    if best in (0, grid_points - 1):
        logger.warning(f"Maximum sits on the search boundary at {grid[best]:.6g}")
        return ScalarOptimum(float(grid[best]), float(values[best]), True, grid, values)

    bracket = (float(grid[best - 1]), float(grid[best]), float(grid[best + 1]))
    try:
        result = minimize_scalar(lambda x: -func(x), bracket=bracket, method="golden", tol=rtol)
    except (ValueError, RuntimeError) as e:
        # Flat neighbourhoods cannot be bracketed, the grid point is as good as it gets
        logger.debug(f"Golden refinement skipped: {e}")
        return ScalarOptimum(float(grid[best]), float(values[best]), False, grid, values)

    x, value = float(result.x), float(-result.fun)
    if not bracket[0] <= x <= bracket[2] or value < values[best]:
        x, value = float(grid[best]), float(values[best])
    return ScalarOptimum(x, value, False, grid, values)

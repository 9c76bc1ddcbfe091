from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from numpy.typing import ArrayLike

from leo_spectra.physics.geometry import LatticeIndex, SQRT3, minimum_image
from leo_spectra.utils.errors import AssociationError

_TOL = 1e-9


def _is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0


@dataclass(frozen=True)
class ShufflePlan:
    """Block sizes and round counts of the two per-axis shuffles.

    Zero rounds on an axis leaves that axis unshuffled.
    """

    block_x: int = 1
    block_y: int = 1
    rounds_x: int = 0
    rounds_y: int = 0

    def __post_init__(self) -> None:
        for axis in ("x", "y"):
            block = getattr(self, f"block_{axis}")
            rounds = getattr(self, f"rounds_{axis}")
            if not _is_power_of_two(block):
                raise AssociationError(
                    f"block_{axis} must be a power of two", details={f"block_{axis}": block}
                )
            exponent = int(math.log2(block))
            if not 0 <= rounds <= max(0, exponent - 1):
                raise AssociationError(
                    f"rounds_{axis} must lie in [0, n_{axis} - 1]",
                    details={f"block_{axis}": block, f"rounds_{axis}": rounds},
                )

    @classmethod
    def identity(cls) -> ShufflePlan:
        return cls()

    @property
    def n_x(self) -> int:
        return int(math.log2(self.block_x))

    @property
    def n_y(self) -> int:
        return int(math.log2(self.block_y))

    @property
    def is_identity(self) -> bool:
        return self.rounds_x == 0 and self.rounds_y == 0

    def normalized(self) -> ShufflePlan:
        """Equivalent plan with unshuffled axes reduced to block size 1"""
        return ShufflePlan(
            block_x=self.block_x if self.rounds_x else 1,
            block_y=self.block_y if self.rounds_y else 1,
            rounds_x=self.rounds_x,
            rounds_y=self.rounds_y,
        )

    def label(self) -> str:
        if self.is_identity:
            return "identity"
        return f"Dx={self.block_x},Dy={self.block_y},lx={self.rounds_x},ly={self.rounds_y}"

    def is_feasible(self, delta: float, altitude: float, gamma_g: float) -> bool:
        """Shuffled pairs stay inside the terminal beam region"""
        reach = (self.block_x * delta) ** 2 + (self.block_y * delta * SQRT3 / 2) ** 2
        return reach <= (altitude * math.tan(gamma_g / 2)) ** 2 * (1 + _TOL)


def shuffle_1d(k: int, j: int) -> int:
    """Map satellite k (1-based) to a terminal index with block exponent j.

    Inside a block of 2^j indices odd k go to (k + 2^j + 1)/2 and even k to k/2;
    other blocks repeat the same pattern shifted by a multiple of 2^j.
    """
    if j < 1:
        raise AssociationError("Block exponent must be at least 1", details={"j": j})
    size = 1 << j
    base = size * ((k - 1) // size)
    r = k - base
    if r % 2:
        return base + (r + size + 1) // 2
    return base + r // 2


def shuffle_composed(k: int, n: int, rounds: int) -> int:
    """Apply f^(n) first, then f^(n-1), down to f^(n-rounds+1)"""
    if not 0 <= rounds <= max(0, n - 1):
        raise AssociationError(
            "Rounds must lie in [0, n - 1]", details={"n": n, "rounds": rounds}
        )
    for exponent in range(n, n - rounds, -1):
        k = shuffle_1d(k, exponent)
    return k


def _axis_map(value: int, n: int, rounds: int) -> int:
    # 0-based wrapper around the 1-based per-axis shuffle
    if rounds == 0:
        return value
    return shuffle_composed(value + 1, n, rounds) - 1


def shuffle_2d(idx: LatticeIndex, plan: ShufflePlan) -> LatticeIndex:
    """Terminal lattice index served by the satellite at `idx`"""
    q = idx.i % 2
    a = (idx.i - q) // 2
    fx = _axis_map(a, plan.n_x, plan.rounds_x)
    fy = _axis_map(idx.j, plan.n_y, plan.rounds_y)
    r = fy % 2
    return LatticeIndex(2 * fx + r, fy)


@dataclass
class RuleCheck:
    satisfied: bool
    violations: list[tuple[int, int]] = field(default_factory=list)


def check_association_rule(
    mapping: ArrayLike,
    sat_positions: ArrayLike,
    term_positions: ArrayLike,
    delta_s: float,
    delta_g: float,
    torus: tuple[float, float] | None = None,
) -> RuleCheck:
    """Terminals served by satellites within delta_s of each other must be more than delta_g apart"""
    mapping = np.asarray(mapping, dtype=np.int64)
    sats = np.asarray(sat_positions, dtype=float).reshape(-1, 3)[mapping]
    terms = np.asarray(term_positions, dtype=float).reshape(-1, 3)
    n = len(mapping)
    if n < 2:
        return RuleCheck(satisfied=True)

    sat_gap = np.linalg.norm(minimum_image(sats[:, None, :] - sats[None, :, :], torus), axis=-1)
    term_gap = np.linalg.norm(
        minimum_image(terms[:, None, :] - terms[None, :, :], torus), axis=-1
    )
    close = sat_gap <= delta_s * (1 + _TOL)
    bad = close & (term_gap <= delta_g * (1 + _TOL))
    bad &= np.triu(np.ones((n, n), dtype=bool), k=1)
    pairs = [(int(a), int(b)) for a, b in zip(*np.nonzero(bad))]
    return RuleCheck(satisfied=not pairs, violations=pairs)


def feasible_plans(
    delta: float, altitude: float, gamma_g: float, max_block: int = 64
) -> list[ShufflePlan]:
    """Every distinct plan whose blocks fit the beam region, identity first"""
    plans: dict[ShufflePlan, None] = {ShufflePlan.identity(): None}
    blocks = [1 << n for n in range(int(math.log2(max_block)) + 1)]
    for dx in blocks:
        for dy in blocks:
            candidate = ShufflePlan(block_x=dx, block_y=dy)
            if not candidate.is_feasible(delta, altitude, gamma_g):
                continue
            for lx in range(max(0, candidate.n_x - 1) + 1):
                for ly in range(max(0, candidate.n_y - 1) + 1):
                    plan = ShufflePlan(dx, dy, lx, ly).normalized()
                    plans.setdefault(plan, None)
    return list(plans)

from __future__ import annotations

from dataclasses import dataclass, field, replace
import logging
import math
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike, NDArray

from leo_spectra.physics.antenna import BeamPattern, PatternKind
from leo_spectra.physics.geometry import (
    EarthMode,
    EarthModel,
    Point3,
    central_angle,
    field_of_view_angle,
    minimum_image,
    off_axis_angle,
)
from leo_spectra.utils.errors import (
    AssociationError,
    DegenerateGeometryError,
    GeometryError,
    SpectraError,
)

if TYPE_CHECKING:
    from leo_spectra.spectrum.allocation import SpectrumPlan

logger = logging.getLogger(__name__)

# Spectral efficiencies are reported per 1000 km²
AREA_UNIT_KM2 = 1000.0

# A link gain is the dimensionless attenuation d^(-α)·w_s·w_g
LinkGain = float

# Largest beam × terminal gain block built in one go
_GAIN_BUDGET = 2_000_000


@dataclass(frozen=True)
class Scenario:
    """Physical parameters shared by every link of an experiment.

    Angles are radians. The antenna-gain normalization is folded into `noise_sigma2`.
    """

    earth: EarthModel
    alpha: float
    sat_pattern: BeamPattern
    gs_pattern: BeamPattern
    psd_max: float
    p_max: float
    noise_sigma2: float
    gamma_s: float = math.pi / 2
    gamma_g: float = math.pi / 2
    bandwidth: float = 1.0

    def __post_init__(self) -> None:
        if self.alpha < 2:
            raise SpectraError(
                "Path-loss exponent must be at least 2", details={"alpha": self.alpha}
            )
        for name in ("psd_max", "p_max", "noise_sigma2", "bandwidth"):
            if not getattr(self, name) > 0:
                raise SpectraError(
                    f"{name} must be positive", details={name: getattr(self, name)}
                )
        for name in ("gamma_s", "gamma_g"):
            if not 0 <= getattr(self, name) <= math.pi:
                raise SpectraError(
                    f"{name} must lie in [0, 180] degrees",
                    details={name: math.degrees(getattr(self, name))},
                )

    @classmethod
    def from_snr_db(
        cls,
        snr_db: float,
        sat_beamwidth_deg: float,
        gs_beamwidth_deg: float,
        altitude_km: float = 550.0,
        alpha: float = 2.5,
        gamma_s_deg: float = 90.0,
        gamma_g_deg: float = 90.0,
        pattern: PatternKind = PatternKind.BESSEL,
        earth_radius_km: float = 6378.0,
        mode: EarthMode = EarthMode.PLANAR,
        bandwidth: float = 1.0,
    ) -> Scenario:
        """PSD-limited scenario: psd_max·h^(-α)/σ² equals `snr_db` and P_max never binds"""
        earth = EarthModel(altitude_km, earth_radius_km, EarthMode(mode))
        psd_max = 1.0
        sigma2 = psd_max * altitude_km ** (-alpha) / 10 ** (snr_db / 10)
        return cls(
            earth=earth,
            alpha=alpha,
            sat_pattern=BeamPattern.from_degrees(sat_beamwidth_deg, pattern),
            gs_pattern=BeamPattern.from_degrees(gs_beamwidth_deg, pattern),
            psd_max=psd_max,
            p_max=psd_max * bandwidth,
            noise_sigma2=sigma2,
            gamma_s=math.radians(gamma_s_deg),
            gamma_g=math.radians(gamma_g_deg),
            bandwidth=bandwidth,
        )

    @classmethod
    def from_power_snr_db(
        cls,
        power_snr_db: float,
        sat_beamwidth_deg: float,
        gs_beamwidth_deg: float,
        psd_headroom: float = 10.0,
        **kwargs,
    ) -> Scenario:
        """Power-limited scenario: P_max·h^(-α)/(B·σ²) equals `power_snr_db`, psd_max = headroom·P_max/B"""
        base = cls.from_snr_db(power_snr_db, sat_beamwidth_deg, gs_beamwidth_deg, **kwargs)
        p_max = base.psd_max * base.bandwidth
        return replace(base, p_max=p_max, psd_max=psd_headroom * p_max / base.bandwidth)

    @property
    def altitude(self) -> float:
        return self.earth.altitude_km

    @property
    def snr(self) -> float:
        return self.psd_max * self.altitude ** (-self.alpha) / self.noise_sigma2

    @property
    def snr_db(self) -> float:
        return 10 * math.log10(self.snr)

    @property
    def full_band_psd(self) -> float:
        """PSD of a beam that spreads its power over the whole band"""
        return min(self.psd_max, self.p_max / self.bandwidth)

    def pattern_product(self, theta_sat: ArrayLike, theta_gs: ArrayLike):
        return self.sat_pattern.gain(theta_sat) * self.gs_pattern.gain(theta_gs)

    def with_patterns(self, kind: PatternKind) -> Scenario:
        return replace(
            self,
            sat_pattern=replace(self.sat_pattern, kind=kind),
            gs_pattern=replace(self.gs_pattern, kind=kind),
        )


def _unit_rows(v: NDArray[np.float64], what: str) -> NDArray[np.float64]:
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(norms == 0):
        raise DegenerateGeometryError(f"{what} contains a zero-length direction")
    return v / norms


@dataclass(frozen=True, eq=False)
class Constellation:
    """Satellites, terminals and the spot beams connecting them.

    Beam `k` serves terminal `k` from satellite `association[k]` and points along
    `beam_look[k]`. A bijective association is the single-channel case; a
    many-to-one association gives each satellite several spot beams.
    """

    sat_positions: NDArray[np.float64]
    term_positions: NDArray[np.float64]
    association: NDArray[np.int64]
    beam_look: NDArray[np.float64]
    term_look: NDArray[np.float64]
    beam_psd: NDArray[np.float64] | None = None
    torus: tuple[float, float] | None = None
    area_km2: float | None = None
    mode: EarthMode = EarthMode.PLANAR
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        sats = np.asarray(self.sat_positions, dtype=float).reshape(-1, 3)
        terms = np.asarray(self.term_positions, dtype=float).reshape(-1, 3)
        assoc = np.asarray(self.association, dtype=np.int64).reshape(-1)
        if len(assoc) != len(terms):
            raise AssociationError(
                "Association must name one satellite per terminal",
                details={"terminals": len(terms), "association": len(assoc)},
            )
        if len(assoc) and (assoc.min() < 0 or assoc.max() >= len(sats)):
            raise AssociationError("Association refers to a missing satellite")
        if not (np.all(np.isfinite(sats)) and np.all(np.isfinite(terms))):
            raise GeometryError("Positions must be finite")

        object.__setattr__(self, "sat_positions", sats)
        object.__setattr__(self, "term_positions", terms)
        object.__setattr__(self, "association", assoc)
        if len(assoc):
            object.__setattr__(
                self, "beam_look", _unit_rows(np.asarray(self.beam_look, float).reshape(-1, 3), "beam_look")
            )
            object.__setattr__(
                self, "term_look", _unit_rows(np.asarray(self.term_look, float).reshape(-1, 3), "term_look")
            )
        if self.beam_psd is not None:
            psd = np.asarray(self.beam_psd, dtype=float).reshape(-1)
            if len(psd) != len(assoc) or np.any(psd < 0):
                raise SpectraError("Beam PSD must be one non-negative value per beam")
            object.__setattr__(self, "beam_psd", psd)

    @classmethod
    def aligned(
        cls,
        sat_positions: ArrayLike,
        term_positions: ArrayLike,
        association: ArrayLike | None = None,
        torus: tuple[float, float] | None = None,
        area_km2: float | None = None,
        mode: EarthMode = EarthMode.PLANAR,
        beam_psd: ArrayLike | None = None,
        metadata: dict | None = None,
    ) -> Constellation:
        """Every serving beam and terminal point straight at each other"""
        sats = np.asarray(sat_positions, dtype=float).reshape(-1, 3)
        terms = np.asarray(term_positions, dtype=float).reshape(-1, 3)
        if association is None:
            if len(sats) != len(terms):
                raise AssociationError(
                    "Identity association needs equal counts",
                    details={"satellites": len(sats), "terminals": len(terms)},
                )
            association = np.arange(len(terms))
        assoc = np.asarray(association, dtype=np.int64)

        link = minimum_image(terms - sats[assoc], torus) if len(assoc) else terms
        if len(assoc) and np.any(np.linalg.norm(link, axis=1) == 0):
            raise DegenerateGeometryError("A terminal coincides with its satellite")
        return cls(
            sat_positions=sats,
            term_positions=terms,
            association=assoc,
            beam_look=link,
            term_look=-link,
            beam_psd=beam_psd,
            torus=torus,
            area_km2=area_km2,
            mode=mode,
            metadata=metadata or {},
        )

    @property
    def num_beams(self) -> int:
        return len(self.association)

    @property
    def num_satellites(self) -> int:
        return len(self.sat_positions)

    @property
    def is_single_channel(self) -> bool:
        return (
            self.num_beams == self.num_satellites
            and len(np.unique(self.association)) == self.num_beams
        )

    @property
    def satellite_psd(self) -> NDArray[np.float64] | None:
        """Highest beam PSD of each satellite (0 for satellites without beams)"""
        if self.beam_psd is None:
            return None
        out = np.zeros(self.num_satellites)
        np.maximum.at(out, self.association, self.beam_psd)
        return out

    def beam_psd_or(self, scen: Scenario) -> NDArray[np.float64]:
        if self.beam_psd is not None:
            return self.beam_psd
        return np.full(self.num_beams, scen.full_band_psd)

    def beam_region_violations(self, scen: Scenario) -> list[int]:
        """Beams whose boresight (or whose terminal's) leaves its beam region"""
        if self.mode == EarthMode.SPHERICAL:
            nadir = -_unit_rows(self.sat_positions[self.association], "satellite position")
            zenith = _unit_rows(self.term_positions, "terminal position")
        else:
            nadir = np.tile([0.0, 0.0, -1.0], (self.num_beams, 1))
            zenith = -nadir
        tilt_s = np.arccos(np.clip(np.sum(self.beam_look * nadir, axis=1), -1, 1))
        tilt_g = np.arccos(np.clip(np.sum(self.term_look * zenith, axis=1), -1, 1))
        bad = (tilt_s > scen.gamma_s / 2 + 1e-12) | (tilt_g > scen.gamma_g / 2 + 1e-12)
        return np.flatnonzero(bad).tolist()


def link_gain(
    scen: Scenario,
    sat_pos: Point3 | ArrayLike,
    sat_look: Point3 | ArrayLike,
    term_pos: Point3 | ArrayLike,
    term_look: Point3 | ArrayLike,
) -> LinkGain:
    s = np.asarray(tuple(sat_pos) if isinstance(sat_pos, Point3) else sat_pos, dtype=float)
    t = np.asarray(tuple(term_pos) if isinstance(term_pos, Point3) else term_pos, dtype=float)
    distance = float(np.linalg.norm(t - s))
    if distance == 0:
        raise DegenerateGeometryError("Satellite and terminal coincide")
    theta_sat = off_axis_angle(s, sat_look, t)
    theta_gs = off_axis_angle(t, term_look, s)
    return distance ** (-scen.alpha) * float(scen.pattern_product(theta_sat, theta_gs))


def visibility_mask(
    scen: Scenario, constellation: Constellation, terminals: NDArray[np.int64]
) -> NDArray[np.bool_]:
    """(satellites, terminals) mask of satellites above each terminal's horizon"""
    shape = (constellation.num_satellites, len(terminals))
    # Planar windows extend to an infinite horizon
    if constellation.mode == EarthMode.PLANAR:
        return np.ones(shape, dtype=bool)
    angles = central_angle(
        constellation.sat_positions[:, None, :],
        constellation.term_positions[terminals][None, :, :],
    )
    return angles < field_of_view_angle(scen.earth)


def gain_matrix(
    scen: Scenario,
    constellation: Constellation,
    terminals: ArrayLike | None = None,
) -> NDArray[np.float64]:
    """Beam-to-terminal gains c[j, k] for beam j and terminal `terminals[k]`"""
    cols = (
        np.arange(constellation.num_beams)
        if terminals is None
        else np.asarray(terminals, dtype=np.int64)
    )
    sats = constellation.sat_positions[constellation.association]
    terms = constellation.term_positions[cols]

    disp = minimum_image(terms[None, :, :] - sats[:, None, :], constellation.torus)
    distance = np.linalg.norm(disp, axis=-1)
    if np.any(distance == 0):
        raise DegenerateGeometryError("A terminal coincides with a transmitting satellite")

    cos_sat = np.einsum("jd,jkd->jk", constellation.beam_look, disp) / distance
    cos_gs = -np.einsum("kd,jkd->jk", constellation.term_look[cols], disp) / distance
    theta_sat = np.arccos(np.clip(cos_sat, -1.0, 1.0))
    theta_gs = np.arccos(np.clip(cos_gs, -1.0, 1.0))
    return distance ** (-scen.alpha) * scen.pattern_product(theta_sat, theta_gs)


def interference_mask(
    scen: Scenario, constellation: Constellation, terminals: ArrayLike | None = None
) -> NDArray[np.bool_]:
    """(beams, terminals) mask of beams that interfere at each terminal"""
    cols = (
        np.arange(constellation.num_beams)
        if terminals is None
        else np.asarray(terminals, dtype=np.int64)
    )
    visible = visibility_mask(scen, constellation, cols)[constellation.association]
    own = np.arange(constellation.num_beams)[:, None] == cols[None, :]
    return visible & ~own


def interferer_set(
    constellation: Constellation, terminal_k: int, earth: EarthModel
) -> set[int]:
    """Satellites other than the server that are above terminal k's horizon"""
    if not 0 <= terminal_k < constellation.num_beams:
        raise AssociationError("Terminal index out of range", details={"k": terminal_k})
    server = int(constellation.association[terminal_k])
    if earth.mode == EarthMode.PLANAR:
        visible = np.ones(constellation.num_satellites, dtype=bool)
    else:
        angles = central_angle(
            constellation.sat_positions, constellation.term_positions[terminal_k]
        )
        visible = angles < field_of_view_angle(earth)
    return {int(i) for i in np.flatnonzero(visible) if i != server}


def sinr_all(
    scen: Scenario,
    constellation: Constellation,
    gains: NDArray[np.float64] | None = None,
    terminals: ArrayLike | None = None,
    active: NDArray[np.bool_] | None = None,
    psd: NDArray[np.float64] | None = None,
) -> NDArray[np.float64]:
    """SINR of each requested terminal.

    `gains` may carry fading already multiplied in. `active` restricts the
    transmitting beams (one subband's co-channel set).
    """
    cols = (
        np.arange(constellation.num_beams)
        if terminals is None
        else np.asarray(terminals, dtype=np.int64)
    )
    if len(cols) == 0:
        return np.zeros(0)
    if gains is None:
        gains = gain_matrix(scen, constellation, cols)
    power = constellation.beam_psd_or(scen) if psd is None else np.asarray(psd, float)
    if active is not None:
        power = np.where(active, power, 0.0)

    mask = interference_mask(scen, constellation, cols)
    received = power[:, None] * gains
    interference = np.sum(np.where(mask, received, 0.0), axis=0)
    signal = received[cols, np.arange(len(cols))]
    return signal / (interference + scen.noise_sigma2)


def sinr(scen: Scenario, constellation: Constellation, terminal_k: int) -> float:
    return float(sinr_all(scen, constellation, terminals=[terminal_k])[0])


def terminal_rates(
    scen: Scenario,
    constellation: Constellation,
    plan: SpectrumPlan | None = None,
    gains: NDArray[np.float64] | None = None,
    terminals: ArrayLike | None = None,
) -> NDArray[np.float64]:
    """Per-terminal rate in bits/s/Hz, full reuse when `plan` is None"""
    cols = (
        np.arange(constellation.num_beams)
        if terminals is None
        else np.asarray(terminals, dtype=np.int64)
    )
    if len(cols) == 0:
        return np.zeros(0)
    if gains is None and len(cols) * constellation.num_beams > _GAIN_BUDGET:
        step = max(1, _GAIN_BUDGET // constellation.num_beams)
        return np.concatenate(
            [
                terminal_rates(scen, constellation, plan, None, cols[s : s + step])
                for s in range(0, len(cols), step)
            ]
        )
    if gains is None:
        gains = gain_matrix(scen, constellation, cols)
    if plan is None:
        return np.log2(1.0 + sinr_all(scen, constellation, gains, cols))

    holds = plan.subband_matrix()
    rates = np.zeros(len(cols))
    for m in range(plan.num_subbands):
        active = holds[:, m]
        if not np.any(active[cols]):
            continue
        s = sinr_all(scen, constellation, gains, cols, active=active, psd=plan.beam_psd)
        rates += np.where(active[cols], np.log2(1.0 + s), 0.0) / plan.num_subbands
    return rates


def _area(scen: Scenario, constellation: Constellation) -> float:
    if constellation.area_km2 is not None:
        return constellation.area_km2
    return 4 * math.pi * scen.earth.earth_radius_km**2


def spectral_efficiency_spherical(scen: Scenario, constellation: Constellation) -> float:
    """Sum rate over the whole Earth's surface area, bits/s/Hz/km²"""
    if constellation.num_beams == 0:
        return 0.0
    rates = terminal_rates(scen, constellation)
    return float(np.sum(rates)) / (4 * math.pi * scen.earth.earth_radius_km**2)


def spectral_efficiency(
    scen: Scenario,
    constellation: Constellation,
    gains: NDArray[np.float64] | None = None,
) -> float:
    """Single-channel efficiency normalized by the window area when the constellation has one"""
    if constellation.num_beams == 0:
        return 0.0
    rates = terminal_rates(scen, constellation, gains=gains)
    return float(np.sum(rates)) / _area(scen, constellation)


def spectral_efficiency_wideband(
    scen: Scenario,
    constellation: Constellation,
    plan: SpectrumPlan,
    gains: NDArray[np.float64] | None = None,
) -> float:
    if constellation.num_beams == 0:
        return 0.0
    rates = terminal_rates(scen, constellation, plan=plan, gains=gains)
    return float(np.sum(rates)) / _area(scen, constellation)


@dataclass
class SymmetryReport:
    holds: bool
    violations: list[str] = field(default_factory=list)


def check_symmetry_conditions(
    gains: NDArray[np.float64], mask: NDArray[np.bool_], rtol: float = 1e-9
) -> SymmetryReport:
    """Check that every link sees the same interferer count, direct gain and interferer gain multiset"""
    violations: list[str] = []
    counts = mask.sum(axis=0)
    if len(set(counts.tolist())) > 1:
        violations.append(f"unequal interferer counts: {sorted(set(counts.tolist()))}")

    direct = np.diag(gains)
    if len(direct) and not np.allclose(direct, direct[0], rtol=rtol, atol=0):
        violations.append("unequal direct gains")

    if not violations:
        columns = [np.sort(gains[mask[:, k], k]) for k in range(gains.shape[1])]
        reference = columns[0] if columns else np.zeros(0)
        for k, col in enumerate(columns[1:], start=1):
            if not np.allclose(col, reference, rtol=rtol, atol=0):
                violations.append(f"interferer gains of link {k} differ from link 0")
                break

    return SymmetryReport(holds=not violations, violations=violations)


@dataclass
class FullPowerCheck:
    optimal: bool
    full_power_rate: float
    best_competing_rate: float
    witness: NDArray[np.float64]
    symmetry: SymmetryReport


def full_power_is_optimal_check(
    scen: Scenario,
    constellation: Constellation,
    trials: int,
    rng: np.random.Generator,
) -> FullPowerCheck:
    """Compare the sum rate at uniform psd_max against random feasible PSD vectors"""
    gains = gain_matrix(scen, constellation)
    mask = interference_mask(scen, constellation)
    symmetry = check_symmetry_conditions(gains, mask)
    if not symmetry.holds:
        logger.warning(f"Full-power check on an asymmetric configuration: {symmetry.violations}")

    n = constellation.num_beams
    full = np.full(n, scen.psd_max)

    def sum_rate(psd: NDArray[np.float64]) -> float:
        return float(np.sum(np.log2(1 + sinr_all(scen, constellation, gains, psd=psd))))

    full_rate = sum_rate(full)
    best_rate = -np.inf
    witness = full
    for _ in range(trials):
        candidate = rng.uniform(0.0, scen.psd_max, size=n)
        rate = sum_rate(candidate)
        if rate > best_rate:
            best_rate, witness = rate, candidate

    logger.debug(f"Full power {full_rate:.6g}, best of {trials} random vectors {best_rate:.6g}")
    return FullPowerCheck(
        optimal=full_rate >= best_rate,
        full_power_rate=full_rate,
        best_competing_rate=float(best_rate),
        witness=witness,
        symmetry=symmetry,
    )

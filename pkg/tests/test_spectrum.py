import json
import math

import numpy as np
from numpy.testing import assert_array_equal
import pytest
from scipy.spatial.distance import pdist, squareform

from leo_spectra.physics.link import Constellation, Scenario
from leo_spectra.spectrum.allocation import (
    build_spectrum_plan,
    full_reuse_plan,
    nearest_terminal,
    optimize_reuse_distance,
    psd_levels,
    reuse_distance_grid,
    voronoi_assign,
)
from leo_spectra.spectrum.reuse import (
    Window,
    hex_layout,
    periodic_hex_layout,
    reuse_pair,
    valid_reuse_numbers,
)
from leo_spectra.utils.errors import SpectrumError

H = 550.0


def random_constellation(rng, n: int = 60, side: float = 400.0) -> Constellation:
    xy = rng.uniform(0, side, (n, 2))
    sats = np.column_stack([xy, np.full(n, H)])
    terms = np.column_stack([xy + rng.normal(0, 5, (n, 2)), np.zeros(n)])
    return Constellation.aligned(sats, terms, torus=(side, side), area_km2=side * side)


def test_valid_reuse_numbers():
    assert valid_reuse_numbers(20) == [1, 3, 4, 7, 9, 12, 13, 16, 19]
    assert reuse_pair(1) == (1, 0)
    assert reuse_pair(19) == (3, 2)
    assert reuse_pair(12) == (2, 2)


def test_invalid_reuse_number_suggests_neighbours():
    with pytest.raises(SpectrumError) as info:
        reuse_pair(5)
    assert info.value.nearest_valid == [4, 7]
    assert info.value.details["nearest_valid"] == [4, 7]


@pytest.mark.parametrize("m", [1, 3, 4, 7, 12, 19])
def test_co_channel_centres_are_reuse_distance_apart(m):
    length = 100.0
    layout = hex_layout(m, length, Window(0.0, 0.0, 12 * length, 12 * length))
    assert layout.side == pytest.approx(length / math.sqrt(3 * m))
    assert set(layout.labels.tolist()) == set(range(1, m + 1))

    for label in range(1, m + 1):
        same = layout.centers[layout.labels == label]
        gaps = squareform(pdist(same))
        np.fill_diagonal(gaps, np.inf)
        assert gaps.min() == pytest.approx(length)


def _torus_gaps(points, torus) -> np.ndarray:
    period = np.asarray(torus)
    d = points[:, None, :] - points[None, :, :]
    d -= period * np.round(d / period)
    gaps = np.hypot(d[..., 0], d[..., 1])
    np.fill_diagonal(gaps, np.inf)
    return gaps


@pytest.mark.parametrize(
    "m, torus", [(3, (700.0, 520.0)), (4, (1234.0, 1234.0)), (7, (900.0, 610.0)), (12, (1000.0, 800.0))]
)
def test_periodic_layout_keeps_reuse_distance_across_seams(m, torus):
    length = 100.0
    layout = periodic_hex_layout(m, length, torus, offset=(13.0, -7.0))
    assert set(layout.labels.tolist()) == set(range(1, m + 1))
    assert min(layout.stretch) >= 1.0
    assert np.all((layout.centers >= 0) & (layout.centers <= np.asarray(torus)))

    for label in range(1, m + 1):
        gaps = _torus_gaps(layout.centers[layout.labels == label], torus)
        assert gaps.min() >= length * (1 - 1e-9)


def test_periodic_layout_tiles_the_torus():
    torus = (1234.0, 1234.0)
    layout = periodic_hex_layout(4, 100.0, torus)
    sx, sy = layout.stretch
    cell_area = 1.5 * math.sqrt(3) * layout.side**2 * sx * sy
    assert len(layout.centers) * cell_area == pytest.approx(torus[0] * torus[1])
    origin = np.flatnonzero(np.all(np.isclose(layout.centers, 0.0), axis=1))
    assert layout.labels[origin].tolist() == [1]


def test_periodic_layout_smaller_than_one_period(caplog):
    with caplog.at_level("WARNING"):
        layout = periodic_hex_layout(7, 100.0, (50.0, 50.0))
    assert "smaller than one reuse period" in caplog.text
    assert len(layout.centers) >= 7


def test_full_reuse_labels():
    layout = hex_layout(1, 60.0, Window(0.0, 0.0, 500.0, 500.0))
    assert np.all(layout.labels == 1)
    gaps = pdist(layout.centers)
    assert gaps.min() == pytest.approx(60.0)


def test_origin_cell_gets_first_label():
    layout = hex_layout(4, 100.0, Window(-1.0, -1.0, 300.0, 300.0))
    origin = np.flatnonzero(np.all(np.isclose(layout.centers, 0.0), axis=1))
    assert layout.labels[origin].tolist() == [1]


def test_tiny_window_single_centre():
    layout = hex_layout(4, 100.0, Window(10.0, 10.0, 10.5, 10.5))
    assert len(layout.centers) == 1


def test_bad_window():
    with pytest.raises(SpectrumError):
        Window(0.0, 0.0, 0.0, 1.0)


def test_voronoi_single_terminal():
    centers = np.array([[0.0, 0.0], [50.0, 0.0], [0.0, 50.0]])
    sets = voronoi_assign(np.array([[10.0, 10.0, 0.0]]), centers, [1, 3, 1])
    assert sets == [frozenset({1, 3})]


def test_voronoi_unserved_terminal():
    sets = voronoi_assign(np.array([[0.0, 0.0, 0.0], [500.0, 0.0, 0.0]]), [[1.0, 0.0]], [2])
    assert sets == [frozenset({2}), frozenset()]


def test_ties_go_to_lowest_index():
    assert_array_equal(nearest_terminal([[-1.0, 0.0], [1.0, 0.0]], [[0.0, 0.0]]), [0])
    assert_array_equal(nearest_terminal([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]], [[0.0, 0.0]]), [0])


def test_nearest_terminal_wraps_on_torus():
    assert_array_equal(nearest_terminal([[1.0, 5.0], [50.0, 5.0]], [[99.0, 5.0]], torus=(100.0, 100.0)), [0])


def test_psd_levels():
    psd_limited = Scenario.from_snr_db(10.0, 10.0, 20.0)
    power_limited = Scenario.from_power_snr_db(8.0, 10.0, 20.0)
    sets = [frozenset({1}), frozenset({1, 2, 3, 4}), frozenset()]

    assert psd_levels(psd_limited, sets, 4).tolist() == [1.0, 1.0, 0.0]

    levels = psd_levels(power_limited, sets, 4)
    assert levels == pytest.approx([4.0, 1.0, 0.0])
    occupied = np.array([len(s) for s in sets]) * power_limited.bandwidth / 4
    assert np.all(levels * occupied <= power_limited.p_max * (1 + 1e-12))
    assert np.all(levels <= power_limited.psd_max)


def test_plan_is_consistent(rng):
    scen = Scenario.from_power_snr_db(8.0, 10.0, 20.0)
    c = random_constellation(rng)
    plan = build_spectrum_plan(scen, c, 4, 120.0)
    assert plan.check_consistency() == []
    assert plan.hex_side == pytest.approx(120.0 / math.sqrt(12))
    assert plan.subband_matrix().shape == (60, 4)

    counts = np.array([len(s) for s in plan.satellite_subbands])
    assert np.all(plan.satellite_psd * counts * scen.bandwidth / 4 <= scen.p_max * (1 + 1e-12))


def test_multi_beam_plan_unions_subbands(rng, scen):
    sats = np.array([[0.0, 0.0, H], [300.0, 0.0, H]])
    terms = np.column_stack([rng.uniform(-100, 400, (8, 2)), np.zeros(8)])
    c = Constellation.aligned(sats, terms, association=[0, 0, 0, 0, 1, 1, 1, 1])
    plan = build_spectrum_plan(scen, c, 3, 90.0)
    assert plan.check_consistency() == []
    assert plan.satellite_subbands[0] == frozenset().union(*plan.terminal_subbands[:4])


def test_plan_to_dict_is_json(rng, scen):
    plan = build_spectrum_plan(scen, random_constellation(rng, n=20), 3, 150.0)
    data = json.loads(json.dumps(plan.to_dict()))
    assert set(data) == {
        "num_subbands",
        "reuse_distance_km",
        "hex_side_km",
        "centers",
        "labels",
        "terminal_subbands",
        "satellite_subbands",
        "satellite_psd",
        "beam_psd",
    }
    assert len(data["terminal_subbands"]) == 20


def test_invalid_subband_count(rng, scen):
    with pytest.raises(SpectrumError):
        build_spectrum_plan(scen, random_constellation(rng, n=10), 5, 100.0)


def test_full_reuse_ignores_distance(rng, scen):
    c = random_constellation(rng, n=30)
    best = optimize_reuse_distance(scen, c, 1, [50.0, 100.0, 200.0])
    values = {v for _, v in best.grid}
    assert len(values) == 1
    assert best.plan.num_subbands == 1
    assert full_reuse_plan(scen, c).terminal_subbands == best.plan.terminal_subbands


def test_reuse_search_returns_grid_maximum(rng, scen):
    c = random_constellation(rng, n=40)
    best = optimize_reuse_distance(scen, c, 4, reuse_distance_grid(20.0, [1, 2, 4]))
    assert [length for length, _ in best.grid] == [20.0, 40.0, 80.0]
    assert best.efficiency == max(v for _, v in best.grid)


def test_reuse_distance_grid():
    assert reuse_distance_grid(50.0, [0.5, 1.0, -1.0, float("inf")]) == [25.0, 50.0]


def test_torus_plan_keeps_co_channel_cells_apart(rng, scen):
    side = 1234.0
    c = random_constellation(rng, n=600, side=side)
    plan = build_spectrum_plan(scen, c, 4, 100.0)
    assert plan.check_consistency() == []
    for label in range(1, 5):
        gaps = _torus_gaps(plan.centers[plan.labels == label], (side, side))
        assert gaps.min() >= 100.0 * (1 - 1e-9)

import math

import numpy as np
from numpy.testing import assert_allclose
import pytest

from leo_spectra.physics.geometry import (
    EarthModel,
    LatticeIndex,
    Point3,
    ProjectionLayer,
    central_angle,
    field_of_view_angle,
    lattice_density,
    lattice_patch,
    lattice_xy,
    minimum_image,
    off_axis_angle,
    project_to_plane,
    regular_satellite_position,
    regular_terminal_position,
    ring_indices,
    toroidal_patch,
)
from leo_spectra.utils.errors import (
    BelowHorizonError,
    DegenerateGeometryError,
    GeometryError,
    InvalidIndexError,
)


@pytest.mark.parametrize(
    "i, j, expected",
    [
        (0, 0, (0.0, 0.0, 6928.0)),
        (2, 0, (100.0, 0.0, 6928.0)),
        (1, 1, (50.0, 86.6025, 6928.0)),
    ],
)
def test_satellite_positions(earth, i, j, expected):
    p = regular_satellite_position(LatticeIndex(i, j), 100.0, earth)
    assert_allclose(tuple(p), expected, atol=1e-4)


@pytest.mark.parametrize(
    "i, j, delta, expected",
    [
        (0, 0, 100.0, (0.0, 0.0, 6378.0)),
        (2, 0, 100.0, (100.0, 0.0, 6378.0)),
        (1, -1, 50.0, (25.0, -43.3013, 6378.0)),
    ],
)
def test_terminal_positions(earth, i, j, delta, expected):
    p = regular_terminal_position(LatticeIndex(i, j), delta, earth)
    assert_allclose(tuple(p), expected, atol=1e-4)


def test_parity_violation_is_rejected():
    with pytest.raises(InvalidIndexError):
        LatticeIndex(1, 0)


def test_non_positive_spacing(earth):
    with pytest.raises(GeometryError):
        regular_satellite_position(LatticeIndex(0, 0), 0.0, earth)


def test_same_index_pair_is_altitude_apart(earth):
    for idx in lattice_patch(LatticeIndex(0, 0), 3):
        s = regular_satellite_position(idx, 37.0, earth).as_array()
        g = regular_terminal_position(idx, 37.0, earth).as_array()
        assert np.linalg.norm(s - g) == pytest.approx(550.0)


def test_off_axis_angles():
    down = (0.0, 0.0, -1.0)
    assert off_axis_angle((0, 0, 550), down, (0, 0, 0)) == pytest.approx(0.0)
    assert off_axis_angle((0, 0, 550), down, (550, 0, 0)) == pytest.approx(math.pi / 4)


def test_off_axis_matches_closed_form():
    h = 550.0
    target = np.array([120.0, -40.0, 0.0])
    expected = math.acos(h / math.hypot(120.0, 40.0, h))
    assert off_axis_angle((0, 0, h), (0, 0, -1), target) == pytest.approx(expected)


def test_aligned_looks_give_equal_angles():
    sat = np.array([30.0, 10.0, 550.0])
    term = np.array([0.0, 0.0, 0.0])
    axis = (term - sat) / np.linalg.norm(term - sat)
    other = np.array([80.0, -20.0, 0.0])
    other_sat = other + np.array([0.0, 0.0, 550.0])
    assert off_axis_angle(sat, axis, sat + axis) == pytest.approx(0.0)
    # Both ends of the connecting axis see the other end on boresight
    assert off_axis_angle(term, -axis, sat) == pytest.approx(off_axis_angle(sat, axis, term))
    assert 0 <= off_axis_angle(sat, axis, other) <= math.pi
    assert off_axis_angle(other_sat, (0, 0, -1), other) == pytest.approx(0.0)


def test_degenerate_off_axis():
    with pytest.raises(DegenerateGeometryError):
        off_axis_angle((0, 0, 1), (0, 0, 0), (1, 1, 1))
    with pytest.raises(DegenerateGeometryError):
        off_axis_angle((0, 0, 1), (0, 0, -1), (0, 0, 1))


def test_field_of_view():
    assert math.degrees(field_of_view_angle(EarthModel(550.0))) == pytest.approx(22.957, abs=1e-3)
    assert math.degrees(field_of_view_angle(EarthModel(6378.0))) == pytest.approx(60.0)
    assert field_of_view_angle(EarthModel(1e-9)) == pytest.approx(0.0, abs=1e-3)


def test_projection_onto_layers(earth):
    sat = project_to_plane((100.0, 0.0, 6828.0), earth, ProjectionLayer.SATELLITE)
    assert_allclose(tuple(sat), (101.464, 0.0, 6928.0), atol=1e-3)

    term = project_to_plane((50.0, 50.0, 6300.0), earth, ProjectionLayer.TERMINAL)
    assert_allclose(tuple(term), (50.619, 50.619, 6378.0), atol=1e-3)

    same = project_to_plane((10.0, 5.0, 6928.0), earth, ProjectionLayer.SATELLITE)
    assert tuple(same) == pytest.approx((10.0, 5.0, 6928.0))


def test_projection_is_idempotent(earth):
    once = project_to_plane(Point3(321.0, -45.0, 6500.0), earth, ProjectionLayer.TERMINAL)
    twice = project_to_plane(once, earth, ProjectionLayer.TERMINAL)
    assert_allclose(tuple(once), tuple(twice))


def test_projection_below_horizon(earth):
    with pytest.raises(BelowHorizonError):
        project_to_plane((1.0, 1.0, 0.0), earth, ProjectionLayer.SATELLITE)


def test_lattice_density():
    assert lattice_density(100.0) == pytest.approx(1.1547e-4, rel=1e-4)
    assert lattice_density(50.0) == pytest.approx(4.6188e-4, rel=1e-4)
    assert lattice_density(200.0) == pytest.approx(lattice_density(100.0) / 4)


def test_nearest_neighbour_distance_is_spacing():
    indices = [(i, j) for i in range(-6, 7) for j in range(-3, 4) if (i - j) % 2 == 0]
    x, y = lattice_xy([i for i, _ in indices], [j for _, j in indices], 10.0)
    pts = np.column_stack([x, y])
    d = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    d[d == 0] = np.inf
    assert d.min() == pytest.approx(10.0)


def test_rings_have_six_n_distinct_sites():
    for n in range(1, 6):
        i, j = ring_indices(n)
        assert len(i) == 6 * n
        assert len(set(zip(i.tolist(), j.tolist()))) == 6 * n
        for a, b in zip(i.tolist(), j.tolist()):
            assert LatticeIndex(a, b).hex_distance() == n


def test_lattice_patch_is_ordered_by_ring():
    center = LatticeIndex(3, 1)
    sites = list(lattice_patch(center, 2))
    assert len(sites) == 1 + 6 + 12
    assert sites[0] == center
    hops = [s.hex_distance(center) for s in sites]
    assert hops == sorted(hops)


def test_central_angle():
    assert central_angle((1, 0, 0), (0, 1, 0)) == pytest.approx(math.pi / 2)
    angles = central_angle(np.array([[0, 0, 1.0], [0, 1.0, 0]]), np.array([0, 0, 2.0]))
    assert_allclose(angles, [0.0, math.pi / 2])


def test_toroidal_patch_layout():
    patch = toroidal_patch(4, 6, 10.0)
    assert patch.size == 24
    assert patch.torus == pytest.approx((40.0, 6 * 10.0 * math.sqrt(3) / 2))
    for flat, (i, j) in enumerate(zip(patch.i.tolist(), patch.j.tolist())):
        assert patch.site_of(i, j) == flat
        # Translating by one period in either direction lands on the same site
        assert patch.site_of(i + 2 * patch.nx, j) == flat
        assert patch.site_of(i, j + patch.ny) == flat


def test_toroidal_patch_needs_even_rows():
    with pytest.raises(GeometryError):
        toroidal_patch(4, 3, 10.0)


def test_minimum_image():
    torus = (100.0, 50.0)
    wrapped = minimum_image(np.array([[60.0, -30.0, 7.0], [10.0, 20.0, 0.0]]), torus)
    assert_allclose(wrapped, [[-40.0, 20.0, 7.0], [10.0, 20.0, 0.0]])
    raw = np.array([1.0, 2.0, 3.0])
    assert minimum_image(raw, None) is raw

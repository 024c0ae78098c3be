import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from baryiso.corpus import gen_two_ball, random_polygon
from baryiso.measures import (
    EXACT,
    GRID,
    QuadratureOptions,
    ball_intersection,
    barycenter,
    diameter,
    is_connected,
    perimeter,
    summarize,
    symdiff_volume,
    symmetry_defect,
    volume,
)
from baryiso.shapes import (
    AxisBox,
    Ball,
    BallCap,
    DegenerateShapeError,
    Empty,
    Hyperplane,
    Polygon2D,
    Union,
    clip_halfspace,
    regular_polygon,
    voxelize,
)
import oracles

R1 = 1 / math.sqrt(math.pi)
UNIT_SQUARE = AxisBox((-0.5, -0.5), (0.5, 0.5))


def test_ball_summary_matches_closed_form():
    s = summarize(Ball((0.0, 0.0), 1.0))
    assert s.volume == pytest.approx(math.pi, rel=1e-14)
    assert s.perimeter == pytest.approx(2 * math.pi, rel=1e-14)
    assert s.diameter == 2.0
    assert s.method == EXACT
    assert s.error_bound["volume"] == 0.0


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_ball_volume_oracle(n):
    assert volume(Ball(np.zeros(n), 0.7)) == pytest.approx(oracles.ball_volume(n, 0.7), rel=1e-13)


def test_square_measures():
    s = summarize(UNIT_SQUARE)
    assert s.volume == 1.0 and s.perimeter == 4.0
    assert s.diameter == pytest.approx(math.sqrt(2))
    assert np.allclose(s.barycenter, 0.0)


def test_polygon_barycenter_against_shapely():
    p = random_polygon(7)
    ref = oracles.polygon(p.vertices)
    assert volume(p) == pytest.approx(ref.area, rel=1e-12)
    assert perimeter(p) == pytest.approx(ref.length, rel=1e-12)
    assert np.allclose(barycenter(p), [ref.centroid.x, ref.centroid.y], atol=1e-12)


def test_half_ball_barycenter():
    cap = clip_halfspace(Ball((0.0, 0.0, 0.0), 1.0), Hyperplane(2), "+")
    assert isinstance(cap, BallCap)
    assert barycenter(cap)[2] == pytest.approx(3 / 8, rel=1e-12)


def test_disk_square_symdiff_segment_oracle():
    ref = oracles.disk_square_symdiff()
    assert ref == pytest.approx(0.1810919376, abs=1e-9)
    assert symdiff_volume(Ball((0.0, 0.0), R1), UNIT_SQUARE) == pytest.approx(ref, abs=1e-9)


def test_disk_square_symdiff_shapely_oracle():
    ref = oracles.shapely_symdiff(oracles.shapely_disk((0, 0), R1), oracles.unit_square_polygon())
    assert symdiff_volume(Ball((0.0, 0.0), R1), UNIT_SQUARE) == pytest.approx(ref, abs=1e-6)


def test_disk_polygon_intersection_against_shapely():
    p = random_polygon(11)
    ref = oracles.shapely_disk((0.1, -0.05), 0.4).intersection(oracles.polygon(p.vertices)).area
    assert ball_intersection(p, Ball((0.1, -0.05), 0.4)) == pytest.approx(ref, abs=1e-6)


def test_half_disk_symmetry_defect_is_one():
    half = clip_halfspace(Ball((0.0, 0.0), 1.0), Hyperplane(0), "+")
    assert symmetry_defect(half, [0]) == pytest.approx(1.0, abs=1e-12)
    assert symmetry_defect(half, [1]) == pytest.approx(0.0, abs=1e-12)


def test_symmetry_defect_of_empty_rejected():
    with pytest.raises(DegenerateShapeError):
        symmetry_defect(Empty(2), [0])


def test_connectedness():
    assert is_connected(UNIT_SQUARE)
    assert not is_connected(gen_two_ball(2, 0.1, 200))
    assert is_connected(Union((Ball((0, 0), 1.0), Ball((1.5, 0), 1.0))))
    g = voxelize(gen_two_ball(2, 0.3, 3.0), 0.05)
    assert not is_connected(g)


@given(st.floats(0.2, 5), st.floats(-3, 3), st.floats(-3, 3))
def test_scaling_and_translation_laws(t, x, y):
    p = random_polygon(3)
    q = p.scale(t).translate((x, y))
    assert volume(q) == pytest.approx(t**2 * volume(p), rel=1e-10)
    assert perimeter(q) == pytest.approx(t * perimeter(p), rel=1e-10)
    assert diameter(q) == pytest.approx(t * diameter(p), rel=1e-10)
    assert np.allclose(barycenter(q), t * barycenter(p) + np.array([x, y]), atol=1e-9)


@settings(max_examples=20)
@given(st.integers(0, 10_000), st.integers(0, 10_000), st.integers(0, 10_000))
def test_symdiff_triangle_inequality(a, b, c):
    A, B, C = (random_polygon(s) for s in (a, b, c))
    ab, bc, ac = symdiff_volume(A, B), symdiff_volume(B, C), symdiff_volume(A, C)
    assert ac <= ab + bc + 1e-9


@given(st.integers(0, 10_000))
def test_connected_perimeter_at_least_twice_diameter(seed):
    p = random_polygon(seed)
    assert perimeter(p) >= 2 * diameter(p) - 1e-12


def test_grid_perimeter_within_one_percent():
    g = voxelize(Ball((0.0, 0.0), 1.0), 0.005)
    assert perimeter(g) == pytest.approx(2 * math.pi, rel=0.01)


def test_grid_summary_carries_error():
    g = voxelize(regular_polygon((0, 0), 1.0, 64), 0.02)
    s = summarize(g)
    assert s.method == GRID
    assert s.error_bound["perimeter"] > 0


def test_grid_volume_against_midpoint_oracle():
    ref = oracles.grid_area(lambda X, Y: X**2 + Y**2 < 1.0, (-1.2, -1.2), (1.2, 1.2), 0.01)
    assert abs(ref - math.pi) < 1e-2
    g = voxelize(Ball((0.0, 0.0), 1.0), 0.01)
    assert volume(g) == pytest.approx(math.pi, abs=1e-2)


def test_explicit_quadrature_spacing():
    q = QuadratureOptions(h=0.01)
    u = Union((Ball((0, 0), 1.0), Ball((1.0, 0), 1.0)))
    lens = 2 * oracles.segment_area(1.0, 0.5)
    assert volume(u, q) == pytest.approx(2 * math.pi - lens, rel=5e-3)

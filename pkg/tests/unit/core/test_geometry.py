import math

import pytest

from fieldcover.core import decomposition, routing
from fieldcover.core.errors import DegenerateGeometryError, GeometryError
from fieldcover.core.geometry import (
    EPS,
    SNAP,
    TOL,
    FreeSpace,
    Point,
    Polygon,
    clip_line,
    contains,
    polyline_length,
    signed_area,
)
from tests.conftest import diamond, rect


def test_point_rejects_non_finite():
    """Test that NaN and infinite coordinates are refused."""
    with pytest.raises(GeometryError):
        Point(math.nan, 0.0)
    with pytest.raises(GeometryError):
        Point(0.0, math.inf)


def test_signed_area_orientation():
    """Test that the shoelace area is positive for CCW and negative for CW rings."""
    ccw = [(0, 0), (10, 0), (10, 10), (0, 10)]
    assert signed_area(ccw) == pytest.approx(100.0)
    assert signed_area(list(reversed(ccw))) == pytest.approx(-100.0)


def test_signed_area_needs_three_vertices():
    with pytest.raises(GeometryError):
        signed_area([(0, 0), (1, 1)])


def test_polygon_drops_closing_vertex():
    polygon = Polygon.from_coords([(0, 0), (1, 0), (1, 1), (0, 0)])
    assert len(polygon.vertices) == 3


@pytest.mark.parametrize(
    "coords",
    [
        [(0, 0), (1, 0), (1, 0), (0, 1)],  # repeated vertex
        [(0, 0), (1, 0), (2, 0)],  # collinear
        [(0, 0), (2, 2), (2, 0), (0, 2)],  # bow tie
    ],
)
def test_polygon_rejects_degenerate_rings(coords):
    """Test that repeated vertices, zero area and self-intersection are refused."""
    with pytest.raises(DegenerateGeometryError):
        Polygon.from_coords(coords)


def test_free_space_normalizes_orientation():
    """Test that the boundary ends up CCW and obstacles CW whatever the input order."""
    boundary = rect(0, 0, 10, 10).reversed()
    obstacle = diamond(5, 5, 2)
    free = FreeSpace(boundary, (obstacle.oriented(ccw=True),))

    assert free.boundary.is_ccw
    assert not free.obstacles[0].is_ccw
    assert free.area == pytest.approx(100.0 - 8.0)


def test_free_space_rejects_obstacle_outside_boundary():
    with pytest.raises(DegenerateGeometryError) as excinfo:
        FreeSpace(rect(0, 0, 10, 10), (rect(8, 8, 12, 12),))
    assert excinfo.value.field == "obstacles[0]"


def test_free_space_rejects_obstacle_touching_boundary():
    with pytest.raises(DegenerateGeometryError) as excinfo:
        FreeSpace(rect(0, 0, 10, 10), (rect(0, 4, 2, 6),))
    assert excinfo.value.field == "obstacles[0]"


def test_free_space_rejects_overlapping_obstacles():
    """Test that the later of two intersecting obstacles is named."""
    with pytest.raises(DegenerateGeometryError) as excinfo:
        FreeSpace(rect(0, 0, 10, 10), (rect(2, 2, 5, 5), rect(4, 4, 7, 7)))
    assert excinfo.value.field == "obstacles[1]"


def test_clip_line_through_square():
    segments = clip_line(rect(0, 0, 10, 10), Point(5, 0), (0, 1))

    assert len(segments) == 1
    assert segments[0].start.x == pytest.approx(5.0)
    assert segments[0].start.y == pytest.approx(0.0)
    assert segments[0].end.y == pytest.approx(10.0)


def test_clip_line_around_obstacle(diamond_free):
    """Test that a line through an obstacle yields one segment on each side, in order."""
    segments = clip_line(diamond_free, Point(5, -3), (0, 2))

    assert [(s.start.y, s.end.y) for s in segments] == [
        pytest.approx((0.0, 3.0)),
        pytest.approx((7.0, 10.0)),
    ]


def test_clip_line_splits_at_boundary_touch(diamond_free):
    """Test that touching the obstacle's tip splits the line there."""
    segments = clip_line(diamond_free, Point(3, 0), (0, 1))

    assert len(segments) == 2
    assert segments[0].end.y == pytest.approx(5.0)
    assert segments[1].start.y == pytest.approx(5.0)


def test_clip_line_respects_direction():
    segments = clip_line(rect(0, 0, 10, 10), Point(5, 5), (0, -1))

    assert segments[0].start.y == pytest.approx(10.0)
    assert segments[0].end.y == pytest.approx(0.0)


def test_clip_line_missing_region():
    assert clip_line(rect(0, 0, 10, 10), Point(20, 0), (0, 1)) == []


def test_clip_line_zero_direction():
    with pytest.raises(GeometryError):
        clip_line(rect(0, 0, 10, 10), Point(5, 5), (0, 0))


def test_contains_is_strict(diamond_free):
    """Test that boundary points and obstacle interiors are outside."""
    assert contains(diamond_free, Point(1, 1))
    assert not contains(diamond_free, Point(0, 5))
    assert not contains(diamond_free, Point(5, 3))
    assert not contains(diamond_free, Point(5, 5))


def test_polyline_length():
    assert polyline_length([Point(0, 0), Point(3, 4), Point(3, 10)]) == pytest.approx(11.0)
    assert polyline_length([Point(1, 1)]) == 0.0


def test_matching_tolerances_derive_from_eps():
    """Test that every coincidence tolerance is a multiple of EPS."""
    assert EPS == 1e-9
    assert TOL == pytest.approx(100 * EPS)
    assert SNAP == pytest.approx(1000 * EPS)
    assert decomposition.TOL == TOL
    assert routing.SNAP == SNAP

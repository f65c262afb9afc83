"""
fieldcover - coverage path planning for agricultural fields with obstacles.

Planar polygon primitives: points, polygons with holes, line clipping and
point classification. Heavy lifting is delegated to shapely; this module pins
down orientation, tolerance and validation rules for the rest of the package.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, List, Sequence, Tuple, Union

import numpy as np
from shapely.geometry import LineString, LinearRing
from shapely.geometry import Point as ShapelyPoint
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.geometry.base import BaseGeometry

from fieldcover.core.errors import DegenerateGeometryError, GeometryError

logger = logging.getLogger(__name__)

# Absolute coincidence tolerance in meters, used everywhere.
EPS = 1e-9

# Computed coordinates (noding, polygonizing, projections onto rings) are
# matched at fixed multiples of EPS.
TOL = 100 * EPS
SNAP = 1000 * EPS

Coordinate = Tuple[float, float]


@dataclass(frozen=True)
class Point:
    """A point of the plane, in meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite coordinate ({self.x}, {self.y})", field="point")

    @property
    def xy(self) -> Coordinate:
        return (self.x, self.y)

    def distance(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def moved(self, direction: Coordinate, distance: float) -> "Point":
        return Point(self.x + direction[0] * distance, self.y + direction[1] * distance)


@dataclass(frozen=True)
class Segment:
    """A directed straight segment."""

    start: Point
    end: Point

    @property
    def length(self) -> float:
        return self.start.distance(self.end)


def _as_point(value: Union[Point, Sequence[float]]) -> Point:
    if isinstance(value, Point):
        return value
    return Point(float(value[0]), float(value[1]))


def signed_area(poly: Union["Polygon", Sequence[Union[Point, Sequence[float]]]]) -> float:
    """
    Shoelace signed area, positive for counter-clockwise rings.

    Args:
        poly: A Polygon or a sequence of vertices (without closing vertex)

    Returns:
        Signed area in square meters

    Raises:
        GeometryError: If fewer than three vertices are given
    """
    vertices = poly.vertices if isinstance(poly, Polygon) else [_as_point(v) for v in poly]
    if len(vertices) < 3:
        raise GeometryError(f"polygon needs at least 3 vertices, got {len(vertices)}")
    xs = np.array([v.x for v in vertices])
    ys = np.array([v.y for v in vertices])
    return float(0.5 * (np.dot(xs, np.roll(ys, -1)) - np.dot(np.roll(xs, -1), ys)))


@dataclass(frozen=True)
class Polygon:
    """
    A simple polygon given by its vertices (no closing vertex).

    Outer rings are counter-clockwise and holes clockwise once they are part
    of a FreeSpace; a standalone Polygon keeps the order it was given.
    """

    vertices: Tuple[Point, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if len(self.vertices) < 3:
            raise DegenerateGeometryError(
                f"polygon needs at least 3 vertices, got {len(self.vertices)}"
            )
        for a, b in zip(self.vertices, self.vertices[1:] + self.vertices[:1]):
            if a.distance(b) <= EPS:
                raise DegenerateGeometryError(f"repeated consecutive vertex {a.xy}")
        if abs(signed_area(self.vertices)) <= EPS:
            raise DegenerateGeometryError("polygon has zero area")
        if not LinearRing([v.xy for v in self.vertices]).is_simple:
            raise DegenerateGeometryError("polygon is self-intersecting")

    @classmethod
    def from_coords(cls, coords: Iterable[Sequence[float]]) -> "Polygon":
        points = [_as_point(c) for c in coords]
        if len(points) > 1 and points[0].distance(points[-1]) <= EPS:
            points = points[:-1]
        return cls(tuple(points))

    @property
    def coords(self) -> List[Coordinate]:
        return [v.xy for v in self.vertices]

    @property
    def signed_area(self) -> float:
        return signed_area(self)

    @property
    def is_ccw(self) -> bool:
        return self.signed_area > 0

    def reversed(self) -> "Polygon":
        return Polygon(tuple(reversed(self.vertices)))

    def oriented(self, ccw: bool = True) -> "Polygon":
        return self if self.is_ccw == ccw else self.reversed()

    @cached_property
    def shape(self) -> ShapelyPolygon:
        return ShapelyPolygon(self.coords)


@dataclass(frozen=True)
class FreeSpace:
    """
    Obstacle-free region of a field: an outer boundary with polygonal holes.

    Construction normalizes orientation (boundary CCW, obstacles CW) and
    rejects obstacles that touch the boundary or each other.
    """

    boundary: Polygon
    obstacles: Tuple[Polygon, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "boundary", self.boundary.oriented(ccw=True))
        object.__setattr__(
            self, "obstacles", tuple(o.oriented(ccw=False) for o in self.obstacles)
        )
        outer = self.boundary.shape
        for index, obstacle in enumerate(self.obstacles):
            label = f"obstacles[{index}]"
            if not outer.contains(obstacle.shape):
                raise DegenerateGeometryError("obstacle is not inside the boundary", field=label)
            if outer.exterior.distance(obstacle.shape) <= EPS:
                raise DegenerateGeometryError("obstacle touches the boundary", field=label)
            for other_index in range(index):
                if self.obstacles[other_index].shape.distance(obstacle.shape) <= EPS:
                    raise DegenerateGeometryError(
                        f"obstacle intersects obstacles[{other_index}]", field=label
                    )

    @cached_property
    def shape(self) -> ShapelyPolygon:
        return ShapelyPolygon(self.boundary.coords, [o.coords for o in self.obstacles])

    @property
    def rings(self) -> List[Polygon]:
        return [self.boundary, *self.obstacles]

    @property
    def area(self) -> float:
        return float(self.shape.area)


Region = Union[FreeSpace, Polygon, ShapelyPolygon]


def _iter_lines(geom: BaseGeometry) -> Iterator[LineString]:
    if geom.is_empty:
        return
    if isinstance(geom, LineString):
        yield geom
    elif hasattr(geom, "geoms"):
        for part in geom.geoms:
            yield from _iter_lines(part)


def _iter_coords(geom: BaseGeometry) -> Iterator[Coordinate]:
    if geom.is_empty:
        return
    if hasattr(geom, "geoms"):
        for part in geom.geoms:
            yield from _iter_coords(part)
    else:
        for c in geom.coords:
            yield (c[0], c[1])


def clip_line(region: Region, origin: Point, direction: Sequence[float]) -> List[Segment]:
    """
    Maximal segments of an infinite line lying inside a region.

    The line is split wherever it touches the region boundary, so segment
    interiors never contain boundary points. Segments are oriented along
    ``direction`` and sorted along the line.

    Args:
        region: FreeSpace, Polygon or shapely polygon to clip against
        origin: Any point of the line
        direction: Direction vector of the line

    Returns:
        Ordered list of segments, empty when the line misses the region

    Raises:
        GeometryError: If the direction vector is zero
    """
    norm = math.hypot(direction[0], direction[1])
    if norm <= EPS:
        raise GeometryError("direction vector must be nonzero", field="direction")
    ux, uy = direction[0] / norm, direction[1] / norm
    shape = region if isinstance(region, BaseGeometry) else region.shape

    def param(c: Coordinate) -> float:
        return (c[0] - origin.x) * ux + (c[1] - origin.y) * uy

    def at(t: float) -> Coordinate:
        return (origin.x + t * ux, origin.y + t * uy)

    minx, miny, maxx, maxy = shape.bounds
    ts = [param(c) for c in ((minx, miny), (minx, maxy), (maxx, miny), (maxx, maxy))]
    line = LineString([at(min(ts) - 1.0), at(max(ts) + 1.0)])

    inside = line.intersection(shape)
    if inside.is_empty:
        return []
    touches = sorted({param(c) for c in _iter_coords(line.intersection(shape.boundary))})

    intervals: List[Tuple[float, float]] = []
    for piece in _iter_lines(inside):
        piece_ts = [param(c) for c in piece.coords]
        lo, hi = min(piece_ts), max(piece_ts)
        cuts = [lo] + [t for t in touches if lo + EPS < t < hi - EPS] + [hi]
        for a, b in zip(cuts, cuts[1:]):
            if b - a <= EPS:
                continue
            if shape.contains(ShapelyPoint(at((a + b) / 2.0))):
                intervals.append((a, b))
    intervals.sort()

    merged: List[Tuple[float, float]] = []
    for a, b in intervals:
        if merged and a - merged[-1][1] <= EPS and shape.contains(ShapelyPoint(at(a))):
            merged[-1] = (merged[-1][0], b)
        else:
            merged.append((a, b))
    return [Segment(Point(*at(a)), Point(*at(b))) for a, b in merged]


def contains(free: Region, p: Point) -> bool:
    """
    Strict interior membership; points on any boundary edge are outside.
    """
    shape = free if isinstance(free, BaseGeometry) else free.shape
    return bool(shape.contains(ShapelyPoint(p.x, p.y)))


def polyline_length(points: Sequence[Point]) -> float:
    return float(sum(a.distance(b) for a, b in zip(points, points[1:])))

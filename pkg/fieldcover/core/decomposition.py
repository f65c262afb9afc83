"""
fieldcover - coverage path planning for agricultural fields with obstacles.

Boustrophedon cell decomposition of a free space along a sweep direction.

All work happens in the sweep frame (u along the sweep axis, v along the
driving direction) on coordinates snapped to an EPS grid, so edges parallel
to the slice are exactly vertical and can be ordered lexicographically.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import shapely
from shapely.affinity import affine_transform
from shapely.geometry import LineString
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.geometry.base import BaseGeometry
from shapely.geometry.polygon import orient
from shapely.ops import polygonize, unary_union

from fieldcover.core.errors import DecompositionError, GeometryError
from fieldcover.core.geometry import EPS, TOL, Coordinate, FreeSpace, Point, Polygon, clip_line

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepFrame:
    """
    Orthonormal frame of a sweep: ``direction`` is the driving (track)
    direction and ``sweep_axis`` the direction the slice advances in.
    """

    direction: Tuple[float, float]
    sweep_axis: Tuple[float, float]

    def __post_init__(self) -> None:
        dx, dy = self.direction
        sx, sy = self.sweep_axis
        if (
            abs(math.hypot(dx, dy) - 1.0) > EPS
            or abs(math.hypot(sx, sy) - 1.0) > EPS
            or abs(dx * sx + dy * sy) > EPS
        ):
            raise GeometryError("direction and sweep axis must be orthonormal", field="frame")

    @classmethod
    def from_degrees(cls, degrees: float) -> "SweepFrame":
        """
        Frame for a driving direction given in degrees counter-clockwise
        from +x. The sweep axis is the direction rotated clockwise by 90°.
        """
        rad = math.radians(degrees)
        dx = round(math.cos(rad), 12) + 0.0
        dy = round(math.sin(rad), 12) + 0.0
        return cls(direction=(dx, dy), sweep_axis=(dy, -dx + 0.0))

    def sweep_value(self, p: Point) -> float:
        return p.x * self.sweep_axis[0] + p.y * self.sweep_axis[1]

    def along(self, p: Point) -> float:
        return p.x * self.direction[0] + p.y * self.direction[1]

    def to_local(self, p: Point) -> Coordinate:
        return (self.sweep_value(p), self.along(p))

    def to_world(self, u: float, v: float) -> Point:
        sx, sy = self.sweep_axis
        dx, dy = self.direction
        return Point(u * sx + v * dx, u * sy + v * dy)

    def local_shape(self, geom: BaseGeometry) -> BaseGeometry:
        sx, sy = self.sweep_axis
        dx, dy = self.direction
        return affine_transform(geom, [sx, sy, dx, dy, 0.0, 0.0])


class CriticalKind(str, Enum):
    OPEN = "open"
    CLOSE = "close"
    SPLIT = "split"
    MERGE = "merge"


@dataclass(frozen=True)
class CriticalPoint:
    location: Point
    kind: CriticalKind
    sweep_value: float


class Side(str, Enum):
    """Headland side of a cell along the driving direction."""

    LOWER = "lower"
    UPPER = "upper"

    @property
    def opposite(self) -> "Side":
        return Side.UPPER if self is Side.LOWER else Side.LOWER


HeadlandId = Tuple[int, Side]


def headland_name(headland: HeadlandId) -> str:
    """Human-readable headland label such as ``cell 3 upper``."""
    cell_id, side = headland
    return f"cell {cell_id} {Side(side).value}"


@dataclass(frozen=True)
class Cell:
    """
    A slice-monotone piece of the free space.

    ``lower_headland`` and ``upper_headland`` are the boundary chains at the
    minimum and maximum along-track extent, both ordered by increasing sweep
    value. ``local`` is the cell polygon in sweep-frame coordinates.
    """

    id: int
    polygon: Polygon
    lower_headland: Tuple[Point, ...]
    upper_headland: Tuple[Point, ...]
    sweep_interval: Tuple[float, float]
    local: ShapelyPolygon = field(compare=False, repr=False)

    @property
    def sweep_extent(self) -> float:
        return self.sweep_interval[1] - self.sweep_interval[0]


@dataclass(frozen=True)
class CellDecomposition:
    cells: Tuple[Cell, ...]
    frame: SweepFrame
    critical: Tuple[CriticalPoint, ...] = ()
    adjacency: nx.Graph = field(default_factory=nx.Graph, compare=False, repr=False)
    free: Optional[FreeSpace] = field(default=None, compare=False, repr=False)

    def cell(self, cell_id: int) -> Cell:
        return self.cells[cell_id]


@dataclass(frozen=True)
class _Event:
    key: Tuple[int, int]
    u: float
    v: float
    kind: CriticalKind
    # along-track span of the slice-parallel vertex run through the event
    run: Tuple[float, float]


def _key(c: Sequence[float]) -> Tuple[int, int]:
    return (round(c[0] / EPS), round(c[1] / EPS))


def _local_free(free: FreeSpace, frame: SweepFrame) -> ShapelyPolygon:
    local = shapely.set_precision(frame.local_shape(free.shape), EPS)
    if not isinstance(local, ShapelyPolygon) or local.is_empty:
        raise DecompositionError("free space does not survive snapping to the sweep frame")
    return orient(local, sign=1.0)


def _vertical_run(coords: List[Coordinate], keys: List[Tuple[int, int]], i: int) -> Tuple[float, float]:
    n = len(coords)
    vs = [coords[i][1]]
    for step in (-1, 1):
        j = (i + step) % n
        while j != i and keys[j][0] == keys[i][0]:
            vs.append(coords[j][1])
            j = (j + step) % n
    return (min(vs), max(vs))


def _ring_events(coords: List[Coordinate]) -> List[_Event]:
    n = len(coords)
    keys = [_key(c) for c in coords]
    events = []
    for i in range(n):
        here, before, after = keys[i], keys[i - 1], keys[(i + 1) % n]
        at_min = before > here and after > here
        at_max = before < here and after < here
        if not (at_min or at_max):
            continue
        (ax, ay), (bx, by), (cx, cy) = coords[i - 1], coords[i], coords[(i + 1) % n]
        # free space lies to the left of every ring, so a left turn is convex
        convex = (bx - ax) * (cy - by) - (by - ay) * (cx - bx) > 0
        if at_min:
            kind = CriticalKind.OPEN if convex else CriticalKind.SPLIT
        else:
            kind = CriticalKind.CLOSE if convex else CriticalKind.MERGE
        events.append(_Event(here, bx, by, kind, _vertical_run(coords, keys, i)))
    return events


def _ring_coords(local: ShapelyPolygon) -> List[List[Coordinate]]:
    rings = [local.exterior, *local.interiors]
    return [[(c[0], c[1]) for c in ring.coords[:-1]] for ring in rings]


def _events(local: ShapelyPolygon) -> List[_Event]:
    events = sorted(
        (e for coords in _ring_coords(local) for e in _ring_events(coords)),
        key=lambda e: e.key,
    )
    for a, b in zip(events, events[1:]):
        if a.key == b.key:
            raise DecompositionError(
                f"two critical points coincide at sweep value {a.u:.9g}, along-track {a.v:.9g}"
            )
    return events


def critical_points(free: FreeSpace, frame: SweepFrame) -> List[CriticalPoint]:
    """
    Critical points of the slice function restricted to the free-space boundary.

    A vertex is critical when both incident edges leave it on the same side
    of its slice, slice-parallel edges being ordered by their along-track
    coordinate. Convex extrema open or close a cell; reflex ones split or
    merge the slice.

    Returns:
        Critical points sorted by sweep value, then along-track value

    Raises:
        DecompositionError: If two critical points coincide
    """
    events = _events(_local_free(free, frame))
    logger.debug("found %d critical points", len(events))
    return [CriticalPoint(frame.to_world(e.u, e.v), e.kind, e.u) for e in events]


def _slice_cuts(local: ShapelyPolygon, event: _Event) -> List[LineString]:
    v_lo, v_hi = event.run
    cuts = []
    for seg in clip_line(local, Point(event.u, 0.0), (0.0, 1.0)):
        if abs(seg.end.y - v_lo) <= TOL:
            cuts.append(LineString([(event.u, seg.start.y - TOL), (event.u, v_lo)]))
        if abs(seg.start.y - v_hi) <= TOL:
            cuts.append(LineString([(event.u, v_hi), (event.u, seg.end.y + TOL)]))
    if not cuts:
        raise DecompositionError(
            f"no free slice next to {event.kind.value} event at sweep value {event.u:.9g}"
        )
    return cuts


def _merge_slivers(faces: List[ShapelyPolygon]) -> List[ShapelyPolygon]:
    faces = list(faces)
    while len(faces) > 1:
        index = next(
            (
                i
                for i, f in enumerate(faces)
                if min(f.bounds[2] - f.bounds[0], f.bounds[3] - f.bounds[1]) < EPS
            ),
            None,
        )
        if index is None:
            break
        sliver = faces.pop(index)
        shared = [sliver.boundary.intersection(f.boundary).length for f in faces]
        target = max(range(len(faces)), key=shared.__getitem__)
        merged = unary_union([faces[target], sliver])
        if isinstance(merged, ShapelyPolygon):
            faces[target] = merged
        logger.debug("merged sliver face into neighbour")
    return faces


def _walk(n: int, start: int, stop: int) -> List[int]:
    indices = [start]
    while indices[-1] != stop:
        indices.append((indices[-1] + 1) % n)
    return indices


def _build_cell(cell_id: int, face: ShapelyPolygon, frame: SweepFrame) -> Cell:
    coords = [(c[0], c[1]) for c in face.exterior.coords[:-1]]
    n = len(coords)
    us = [c[0] for c in coords]
    umin, umax = min(us), max(us)
    left = [i for i in range(n) if us[i] <= umin + TOL]
    right = [i for i in range(n) if us[i] >= umax - TOL]
    lower_start = min(left, key=lambda i: coords[i][1])
    lower_stop = min(right, key=lambda i: coords[i][1])
    upper_start = max(right, key=lambda i: coords[i][1])
    upper_stop = max(left, key=lambda i: coords[i][1])

    def chain(indices: List[int]) -> Tuple[Point, ...]:
        return tuple(frame.to_world(*coords[i]) for i in indices)

    lower = chain(_walk(n, lower_start, lower_stop))
    upper = chain(list(reversed(_walk(n, upper_start, upper_stop))))
    polygon = Polygon(chain(_walk(n, lower_start, (lower_start - 1) % n)))
    return Cell(cell_id, polygon, lower, upper, (umin, umax), face)


def _face_order(face: ShapelyPolygon) -> Tuple[int, int]:
    coords = face.exterior.coords[:-1]
    umin = min(c[0] for c in coords)
    vstart = min(c[1] for c in coords if c[0] <= umin + TOL)
    return (round(umin / TOL), round(vstart / TOL))


def decompose(free: FreeSpace, frame: SweepFrame) -> CellDecomposition:
    """
    Split the free space into slice-monotone cells.

    The free space is cut along the slice through every split and merge
    event, immediately below and above the event, and the arrangement is
    polygonized. Cells are numbered in opening order, ties broken by the
    along-track coordinate of their lower headland.

    Args:
        free: Free space to decompose
        frame: Sweep frame fixing the driving direction

    Returns:
        Cells with their adjacency graph and the critical points

    Raises:
        DecompositionError: On unresolvable degeneracies
    """
    local = _local_free(free, frame)
    events = _events(local)
    cuts = [
        cut
        for e in events
        if e.kind in (CriticalKind.SPLIT, CriticalKind.MERGE)
        for cut in _slice_cuts(local, e)
    ]
    lines = [LineString(ring.coords) for ring in (local.exterior, *local.interiors)] + cuts
    faces = [
        face
        for face in polygonize(unary_union(lines))
        if local.contains(face.representative_point())
    ]
    faces = [orient(f.simplify(0), sign=1.0) for f in _merge_slivers(faces)]
    faces.sort(key=_face_order)

    cells = tuple(_build_cell(i, face, frame) for i, face in enumerate(faces))
    adjacency = nx.Graph()
    adjacency.add_nodes_from(c.id for c in cells)
    for a in cells:
        for b in cells[a.id + 1 :]:
            if b.sweep_interval[0] > a.sweep_interval[1] + TOL:
                continue
            if a.sweep_interval[0] > b.sweep_interval[1] + TOL:
                continue
            if a.local.boundary.intersection(b.local.boundary).length > TOL:
                adjacency.add_edge(a.id, b.id)

    critical = tuple(CriticalPoint(frame.to_world(e.u, e.v), e.kind, e.u) for e in events)
    logger.info(
        "decomposed free space into %d cells (%d critical points, %d adjacencies)",
        len(cells),
        len(critical),
        adjacency.number_of_edges(),
    )
    return CellDecomposition(cells, frame, critical, adjacency, free)


def _shared_slice(a: Cell, b: Cell) -> float:
    if abs(a.sweep_interval[1] - b.sweep_interval[0]) <= TOL:
        return a.sweep_interval[1]
    return a.sweep_interval[0]


def _extent_at(cell: Cell, u0: float) -> Tuple[float, float]:
    vs = [c[1] for c in cell.local.exterior.coords if abs(c[0] - u0) <= TOL]
    return (min(vs), max(vs))


def headland_connectivity(d: CellDecomposition) -> nx.Graph:
    """
    Graph over headlands ``(cell_id, side)`` joining same-side headlands of
    adjacent cells that meet on their shared slice.

    Two lower headlands are joined when both cells start at the same
    along-track point on the shared slice, so the boundary runs on from one
    cell into the other; upper headlands likewise at the far end.
    """
    graph = nx.Graph()
    for cell in d.cells:
        graph.add_node((cell.id, Side.LOWER))
        graph.add_node((cell.id, Side.UPPER))
    for a_id, b_id in sorted(tuple(sorted(e)) for e in d.adjacency.edges):
        a, b = d.cell(a_id), d.cell(b_id)
        u0 = _shared_slice(a, b)
        a_lo, a_hi = _extent_at(a, u0)
        b_lo, b_hi = _extent_at(b, u0)
        if abs(a_lo - b_lo) <= TOL:
            graph.add_edge((a_id, Side.LOWER), (b_id, Side.LOWER))
        if abs(a_hi - b_hi) <= TOL:
            graph.add_edge((a_id, Side.UPPER), (b_id, Side.UPPER))
    logger.debug("headland graph has %d joins", graph.number_of_edges())
    return graph


def headland_components(graph: nx.Graph) -> Dict[HeadlandId, int]:
    """Map every headland to the index of its connected component."""
    components = sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])
    return {h: index for index, members in enumerate(components) for h in members}

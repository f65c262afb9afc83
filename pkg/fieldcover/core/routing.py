"""
fieldcover - coverage path planning for agricultural fields with obstacles.

Drivable route graph for moving between track ends: the free-space
boundary rings plus every track centerline, searched with Dijkstra.
"""

import logging
from typing import Dict, Iterable, List, Tuple

import networkx as nx
from shapely.geometry import LinearRing
from shapely.geometry import Point as ShapelyPoint

from fieldcover.core.errors import GeometryError
from fieldcover.core.geometry import SNAP, FreeSpace, Point
from fieldcover.core.tracks import Track

logger = logging.getLogger(__name__)

NodeKey = Tuple[int, int]


def _key(p: Point) -> NodeKey:
    return (round(p.x / SNAP), round(p.y / SNAP))


class HeadlandRouter:
    """
    Shortest routes between track ends that stay on drivable lanes.

    Track ends are inserted into the boundary ring they lie on; ends that lie
    on no ring (none, for tracks generated from a decomposition) are only
    reachable through their own track.
    """

    def __init__(self, free: FreeSpace, tracks: Iterable[Track]):
        self.graph = nx.Graph()
        self._points: Dict[NodeKey, Point] = {}
        tracks = list(tracks)
        ends = [end for t in tracks for end in (t.lower_end, t.upper_end)]
        for ring in free.rings:
            self._add_ring(ring.vertices, ends)
        for track in tracks:
            self._add_edge(track.lower_end, track.upper_end)
        logger.debug(
            "route graph: %d nodes, %d edges",
            self.graph.number_of_nodes(),
            self.graph.number_of_edges(),
        )

    def _add_edge(self, a: Point, b: Point) -> None:
        ka, kb = _key(a), _key(b)
        self._points.setdefault(ka, a)
        self._points.setdefault(kb, b)
        if ka != kb:
            self.graph.add_edge(ka, kb, weight=a.distance(b))

    def _add_ring(self, vertices: Tuple[Point, ...], ends: List[Point]) -> None:
        ring = LinearRing([v.xy for v in vertices])
        stops = [(ring.project(ShapelyPoint(v.xy)), i, v) for i, v in enumerate(vertices)]
        stops += [
            (ring.project(ShapelyPoint(e.xy)), len(vertices) + i, e)
            for i, e in enumerate(ends)
            if ring.distance(ShapelyPoint(e.xy)) <= SNAP
        ]
        # the first vertex sits at 0; keep it first so the ring closes on it
        stops.sort(key=lambda s: (s[0], s[1]))
        points = [s[2] for s in stops]
        for a, b in zip(points, points[1:] + points[:1]):
            self._add_edge(a, b)

    def route(self, a: Point, b: Point) -> List[Point]:
        """
        Shortest drivable polyline from ``a`` to ``b``.

        Raises:
            GeometryError: If either point is not a graph node or no route exists
        """
        ka, kb = _key(a), _key(b)
        for label, key in (("start", ka), ("end", kb)):
            if key not in self.graph:
                raise GeometryError("point is not on a drivable lane", field=label)
        try:
            keys = nx.shortest_path(self.graph, ka, kb, weight="weight")
        except nx.NetworkXNoPath:
            raise GeometryError(f"no drivable route from {a.xy} to {b.xy}")
        points = [self._points[k] for k in keys]
        points[0], points[-1] = a, b
        return points

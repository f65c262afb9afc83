"""
fieldcover - coverage path planning for agricultural fields with obstacles.

Plan assembly: decomposition, tracks and sequencing turned into a drivable
sequence of legs, either cell by cell (traditional) or across the whole
field at once (global), plus the comparison of the two.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

import networkx as nx
from shapely.geometry import LineString
from shapely.geometry import Point as ShapelyPoint

from fieldcover.config.schema import PlannerConfig
from fieldcover.core.decomposition import (
    Side,
    SweepFrame,
    decompose,
    headland_components,
    headland_connectivity,
    headland_name,
)
from fieldcover.core.errors import (
    DecompositionError,
    InfeasibleSequenceError,
    TurnDomainError,
)
from fieldcover.core.geometry import EPS, FreeSpace, Point, polyline_length
from fieldcover.core.routing import HeadlandRouter
from fieldcover.core.sequencing import (
    Sequence,
    build_cost_matrix,
    build_global_graph,
    solve,
    zigzag_sequence,
)
from fieldcover.core.tracks import MachineSpec, Track, generate_all_tracks, track_distance
from fieldcover.core.turns import TurnCost, TurnKind, min_turn

logger = logging.getLogger(__name__)

TRANSFER = "transfer"


class LegKind(str, Enum):
    TRACK = "track"
    TRANSIT = "transit"


class PlanMode(str, Enum):
    TRADITIONAL = "traditional"
    GLOBAL = "global"


@dataclass(frozen=True)
class Leg:
    """
    One piece of a plan.

    A TRACK leg drives the working part of a track from ``entry_end``. A
    TRANSIT leg either is a headland turn of kind ``turn`` whose length is
    the maneuver length, or a routed transfer (``turn`` is None) whose
    length is that of its polyline.
    """

    kind: LegKind
    points: Tuple[Point, ...]
    length: float
    track_id: Optional[int] = None
    entry_end: Optional[Side] = None
    turn: Optional[TurnKind] = None

    @property
    def start(self) -> Point:
        return self.points[0]

    @property
    def end(self) -> Point:
        return self.points[-1]

    @property
    def label(self) -> str:
        if self.kind is LegKind.TRACK:
            return LegKind.TRACK.value
        return self.turn.value if self.turn is not None else TRANSFER


@dataclass(frozen=True)
class PlanMetrics:
    productive_m: float
    nonproductive_m: float
    turn_counts: Dict[str, int] = field(hash=False)
    cells_visited: Tuple[int, ...] = ()

    @property
    def total_m(self) -> float:
        return self.productive_m + self.nonproductive_m


@dataclass(frozen=True)
class CoveragePlan:
    mode: PlanMode
    legs: Tuple[Leg, ...]
    metrics: PlanMetrics
    order: Tuple[int, ...]
    solver: str

    @property
    def track_legs(self) -> List[Leg]:
        return [leg for leg in self.legs if leg.kind is LegKind.TRACK]


@dataclass(frozen=True)
class PlanComparison:
    traditional: CoveragePlan
    global_plan: CoveragePlan
    savings_ratio: float


def _dedupe(points: List[Point]) -> Tuple[Point, ...]:
    kept = [points[0]]
    for p in points[1:]:
        if p.distance(kept[-1]) > EPS:
            kept.append(p)
    if len(kept) == 1:
        kept.append(points[-1])
    return tuple(kept)


def _metrics(legs: List[Leg], cells_visited: List[int]) -> PlanMetrics:
    counts = {kind.value: 0 for kind in TurnKind}
    counts[TRANSFER] = 0
    for leg in legs:
        if leg.kind is LegKind.TRANSIT:
            counts[leg.label] += 1
    return PlanMetrics(
        productive_m=math.fsum(leg.length for leg in legs if leg.kind is LegKind.TRACK),
        nonproductive_m=math.fsum(leg.length for leg in legs if leg.kind is LegKind.TRANSIT),
        turn_counts=counts,
        cells_visited=tuple(cells_visited),
    )


class CoveragePlanner:
    """
    Plans complete coverage of one field for one machine.

    Decomposition, tracks and headland structure are computed once and
    shared by both planning modes.
    """

    def __init__(
        self,
        free: FreeSpace,
        spec: MachineSpec,
        frame: SweepFrame,
        config: Optional[PlannerConfig] = None,
    ):
        self.free = free
        self.spec = spec
        self.frame = frame
        self.config = config or PlannerConfig()
        self.decomposition = decompose(free, frame)
        self.tracks = generate_all_tracks(self.decomposition, spec)
        self.connectivity = headland_connectivity(self.decomposition)
        self.components = headland_components(self.connectivity)
        self.router = HeadlandRouter(free, self.tracks)
        self.margin = (
            self.config.headland_margin
            if self.config.headland_margin is not None
            else 2.0 * spec.r_min
        )
        self._tracks_by_id = {t.id: t for t in self.tracks}
        self._tracks_by_cell: Dict[int, List[Track]] = {c.id: [] for c in self.decomposition.cells}
        for track in self.tracks:
            self._tracks_by_cell[track.cell_id].append(track)

    # -- geometry of legs -------------------------------------------------

    def working_end(self, track: Track, side: Side) -> Point:
        """Track end pulled in by the headland margin, at most a quarter of the track."""
        shift = min(self.margin, track.length / 4.0)
        if track.length <= EPS or shift <= 0:
            return track.end(side)
        ux = (track.upper_end.x - track.lower_end.x) / track.length
        uy = (track.upper_end.y - track.lower_end.y) / track.length
        if Side(side) is Side.LOWER:
            return track.lower_end.moved((ux, uy), shift)
        return track.upper_end.moved((ux, uy), -shift)

    def _track_leg(self, track: Track, entry: Side) -> Leg:
        start, stop = self.working_end(track, entry), self.working_end(track, entry.opposite)
        return Leg(
            LegKind.TRACK,
            (start, stop),
            start.distance(stop),
            track_id=track.id,
            entry_end=entry,
        )

    def _transit_points(self, a: Track, exit_side: Side, b: Track, entry_side: Side) -> List[Point]:
        route = self.router.route(a.end(exit_side), b.end(entry_side))
        return [self.working_end(a, exit_side), *route, self.working_end(b, entry_side)]

    def _turn(self, a: Track, b: Track, side: Side) -> Optional[TurnCost]:
        if self.components[(a.cell_id, side)] != self.components[(b.cell_id, side)]:
            return None
        try:
            return min_turn(track_distance(a, b), self.spec, self.config.tee_formula)
        except TurnDomainError:
            return None

    def _transit_leg(self, a: Track, exit_side: Side, b: Track, entry_side: Side) -> Leg:
        points = _dedupe(self._transit_points(a, exit_side, b, entry_side))
        turn = self._turn(a, b, exit_side) if exit_side is entry_side else None
        if turn is None:
            return Leg(LegKind.TRANSIT, points, polyline_length(points))
        return Leg(LegKind.TRANSIT, points, turn.length, turn=turn.kind)

    def _assemble(self, steps: List[Tuple[Track, Side]]) -> List[Leg]:
        legs: List[Leg] = []
        for index, (track, entry) in enumerate(steps):
            if index > 0:
                previous, previous_entry = steps[index - 1]
                legs.append(self._transit_leg(previous, previous_entry.opposite, track, entry))
            legs.append(self._track_leg(track, entry))
        return legs

    # -- traditional -------------------------------------------------------

    def _cell_walk(self) -> Tuple[List[int], List[int]]:
        adjacency = self.decomposition.adjacency
        start = self.config.start_cell
        if start not in adjacency:
            raise DecompositionError(
                f"start cell {start} does not exist ({adjacency.number_of_nodes()} cells)"
            )
        preorder = list(nx.dfs_preorder_nodes(adjacency, source=start))
        for node in sorted(adjacency.nodes):
            if node not in preorder:
                preorder.extend(nx.dfs_preorder_nodes(adjacency, source=node))
        walk = [preorder[0]]
        for cell_id in preorder[1:]:
            try:
                walk.extend(nx.shortest_path(adjacency, walk[-1], cell_id)[1:])
            except nx.NetworkXNoPath:
                walk.append(cell_id)
        return preorder, walk

    @staticmethod
    def _nearest_track(tracks: List[Track], target) -> Track:
        return min(
            tracks,
            key=lambda t: (LineString([t.lower_end.xy, t.upper_end.xy]).distance(target), t.id),
        )

    def _order_cell(
        self, tracks: List[Track], entry: Optional[Track], exit: Optional[Track]
    ) -> Tuple[Sequence, str]:
        start = entry.id if entry is not None else None
        end = exit.id if exit is not None and exit is not entry else None
        matrix = build_cost_matrix(tracks, self.spec, self.config.tee_formula)
        if self.config.per_cell_order == "zigzag":
            return zigzag_sequence(matrix, start, end), "zigzag"
        method = "exact" if matrix.n <= self.config.exact_threshold else "heuristic"
        sequence = solve(
            matrix,
            start,
            end,
            exact_threshold=self.config.exact_threshold,
            restarts=self.config.heuristic_restarts,
            seed=self.config.seed,
        )
        return sequence, method

    def plan_traditional(self) -> CoveragePlan:
        """
        Cover each cell completely before moving to the next.

        Cells are taken in depth-first preorder of the adjacency graph from
        the configured start cell; moving between cells that are not
        adjacent passes through the cells on a shortest adjacency path.
        Each cell is entered at the track nearest the previous exit and
        left at the track nearest the next cell.

        Raises:
            InfeasibleSequenceError: If a cell's tracks cannot be sequenced
        """
        preorder, walk = self._cell_walk()
        cells = {c.id: c for c in self.decomposition.cells}
        steps: List[Tuple[Track, Side]] = []
        methods: Set[str] = set()
        for position, cell_id in enumerate(preorder):
            tracks = self._tracks_by_cell[cell_id]
            if not tracks:
                continue
            here = steps[-1][0].end(steps[-1][1].opposite) if steps else None
            entry = self._nearest_track(tracks, ShapelyPoint(here.xy)) if here else None
            exit = None
            if position + 1 < len(preorder):
                exit = self._nearest_track(tracks, cells[preorder[position + 1]].polygon.shape)
            sequence, method = self._order_cell(tracks, entry, exit)
            methods.add(method)
            ordered = [self._tracks_by_id[i] for i in sequence.order]
            first_side = self._first_side(steps[-1] if steps else None, ordered[0])
            for k, track in enumerate(ordered):
                steps.append((track, first_side if k % 2 == 0 else first_side.opposite))
            logger.debug("cell %d: order %s entered %s", cell_id, sequence.order, first_side.value)

        legs = self._assemble(steps)
        metrics = _metrics(legs, walk)
        logger.info(
            "traditional plan: %d legs, nonproductive %.3f m", len(legs), metrics.nonproductive_m
        )
        return CoveragePlan(
            PlanMode.TRADITIONAL,
            tuple(legs),
            metrics,
            tuple(t.id for t, _ in steps),
            "+".join(sorted(methods)) or "exact",
        )

    def _first_side(self, previous: Optional[Tuple[Track, Side]], first: Track) -> Side:
        if previous is None:
            return Side.LOWER
        track, entry = previous
        options = [
            (self._transit_leg(track, entry.opposite, first, side).length, index, side)
            for index, side in enumerate((Side.LOWER, Side.UPPER))
        ]
        return min(options)[2]

    # -- global ------------------------------------------------------------

    def isolated_headlands(self) -> List[str]:
        """
        Names of headlands that connect to no other cell, those of cells
        cut off on both sides first.
        """
        sizes: Dict[int, int] = {}
        for component in self.components.values():
            sizes[component] = sizes.get(component, 0) + 1
        lonely = [h for h, c in sorted(self.components.items()) if sizes[c] == 1]
        both = [h for h in lonely if (h[0], h[1].opposite) in lonely]
        return [headland_name(h) for h in (both or lonely)]

    def plan_global(self) -> CoveragePlan:
        """
        Sequence all tracks at once over the track-end graph, allowing a
        cell to be entered and left several times.

        Raises:
            InfeasibleSequenceError: If no order reaches every track; the
                message names the isolated headlands
        """
        matrix = build_global_graph(
            self.decomposition,
            self.tracks,
            self.connectivity,
            self.spec,
            self.config.tee_formula,
        )
        try:
            sequence = solve(
                matrix,
                exact_threshold=self.config.exact_threshold,
                restarts=self.config.heuristic_restarts,
                seed=self.config.seed,
            )
        except InfeasibleSequenceError as e:
            raise InfeasibleSequenceError(
                "no global order covers every track", self.isolated_headlands()
            ) from e

        steps = [
            (self._tracks_by_id[track_id], entry)
            for track_id, entry in zip(sequence.order, sequence.entry_ends or ())
        ]
        legs = self._assemble(steps)
        cells_visited: List[int] = []
        for track, _ in steps:
            if not cells_visited or cells_visited[-1] != track.cell_id:
                cells_visited.append(track.cell_id)
        metrics = _metrics(legs, cells_visited)
        method = "exact" if matrix.n <= self.config.exact_threshold else "heuristic"
        logger.info(
            "global plan (%s): %d legs, nonproductive %.3f m",
            method,
            len(legs),
            metrics.nonproductive_m,
        )
        return CoveragePlan(PlanMode.GLOBAL, tuple(legs), metrics, sequence.order, method)

    def compare(self) -> PlanComparison:
        traditional = self.plan_traditional()
        global_plan = self.plan_global()
        base = traditional.metrics.nonproductive_m
        ratio = 1.0 - global_plan.metrics.nonproductive_m / base if base > 0 else 0.0
        return PlanComparison(traditional, global_plan, ratio)


def plan_traditional(
    free: FreeSpace, spec: MachineSpec, frame: SweepFrame, config: Optional[PlannerConfig] = None
) -> CoveragePlan:
    return CoveragePlanner(free, spec, frame, config).plan_traditional()


def plan_global(
    free: FreeSpace, spec: MachineSpec, frame: SweepFrame, config: Optional[PlannerConfig] = None
) -> CoveragePlan:
    return CoveragePlanner(free, spec, frame, config).plan_global()


def compare(
    free: FreeSpace, spec: MachineSpec, frame: SweepFrame, config: Optional[PlannerConfig] = None
) -> PlanComparison:
    return CoveragePlanner(free, spec, frame, config).compare()

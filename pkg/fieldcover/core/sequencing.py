"""
fieldcover - coverage path planning for agricultural fields with obstacles.

Track transition costs and the open-path travelling-salesman solvers that
order tracks.

Both solvers work on a common node model. In per-cell mode a node is a
track; in global mode a node is a track entered at a given end, so a track
is always driven through and the next transition starts at its other end.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence as SequenceT, Tuple, Union

import networkx as nx
import numpy as np

from fieldcover.core.decomposition import CellDecomposition, Side, headland_components
from fieldcover.core.errors import InfeasibleSequenceError, SolverLimitError, TurnDomainError
from fieldcover.core.tracks import MachineSpec, Track, track_distance
from fieldcover.core.turns import TeeFormula, min_turn

logger = logging.getLogger(__name__)

DEFAULT_EXACT_THRESHOLD = 15
DEFAULT_RESTARTS = 4
# Nearest-neighbour construction starts from at most this many nodes on large instances.
_MAX_NN_STARTS = 8
_IMPROVE_TOL = 1e-9


class MatrixMode(str, Enum):
    PER_CELL = "per_cell"
    GLOBAL = "global"


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """
    Turn lengths between tracks sharing one pair of headlands.

    Row and column ``i`` refer to ``track_ids[i]``; infeasible transitions
    are ``inf``.
    """

    track_ids: Tuple[int, ...]
    costs: np.ndarray
    mode: MatrixMode = MatrixMode.PER_CELL

    @property
    def n(self) -> int:
        return len(self.track_ids)

    def cost(self, a: int, b: int) -> float:
        return float(self.costs[self.track_ids.index(a), self.track_ids.index(b)])


@dataclass(frozen=True, eq=False)
class GlobalCostMatrix:
    """
    Costs between track ends across the whole field.

    End ``side`` of ``track_ids[i]`` is node ``2 * i + side`` with lower = 0
    and upper = 1. ``components`` holds the headland component of each node.
    """

    track_ids: Tuple[int, ...]
    end_costs: np.ndarray
    components: Tuple[int, ...]
    mode: MatrixMode = MatrixMode.GLOBAL

    @property
    def n(self) -> int:
        return len(self.track_ids)

    def node(self, track_id: int, side: Side) -> int:
        return 2 * self.track_ids.index(track_id) + _side_index(side)

    def cost(self, a: int, exit_side: Side, b: int, entry_side: Side) -> float:
        """Cost of leaving track ``a`` at ``exit_side`` and entering ``b`` at ``entry_side``."""
        return float(self.end_costs[self.node(a, exit_side), self.node(b, entry_side)])


Costs = Union[CostMatrix, GlobalCostMatrix]


@dataclass(frozen=True)
class Sequence:
    """
    Visiting order of tracks. ``entry_ends`` is set for global sequences
    and gives the end at which each track is entered.
    """

    order: Tuple[int, ...]
    entry_ends: Optional[Tuple[Side, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", tuple(self.order))
        if len(set(self.order)) != len(self.order):
            raise ValueError(f"sequence visits a track twice: {self.order}")
        if self.entry_ends is not None:
            ends = tuple(Side(e) for e in self.entry_ends)
            if len(ends) != len(self.order):
                raise ValueError("entry_ends must give one end per track")
            object.__setattr__(self, "entry_ends", ends)

    def exit_end(self, position: int) -> Side:
        if self.entry_ends is None:
            raise ValueError("per-cell sequences carry no track ends")
        return self.entry_ends[position].opposite


def _side_index(side: Side) -> int:
    return 0 if Side(side) is Side.LOWER else 1


def _turn_length(d: float, spec: MachineSpec, tee_formula: TeeFormula) -> float:
    try:
        return min_turn(d, spec, tee_formula).length
    except TurnDomainError:
        return np.inf


def build_cost_matrix(
    tracks: Iterable[Track], spec: MachineSpec, tee_formula: TeeFormula = TeeFormula.PAPER
) -> CostMatrix:
    """
    Per-cell cost matrix: the shortest turn between every pair of tracks.

    Args:
        tracks: Tracks sharing one sweep frame and one pair of headlands
        spec: Machine parameters
        tee_formula: Variant of the reversing-turn length

    Returns:
        Symmetric matrix with zero diagonal, ``inf`` where no turn is feasible
    """
    ordered = sorted(tracks, key=lambda t: t.id)
    n = len(ordered)
    costs = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            costs[i, j] = costs[j, i] = _turn_length(
                track_distance(ordered[i], ordered[j]), spec, tee_formula
            )
    return CostMatrix(tuple(t.id for t in ordered), costs)


def build_global_graph(
    d: CellDecomposition,
    tracks: Iterable[Track],
    connectivity: nx.Graph,
    spec: MachineSpec,
    tee_formula: TeeFormula = TeeFormula.PAPER,
) -> GlobalCostMatrix:
    """
    Cost matrix over track ends for sequencing the whole field at once.

    The two ends of a track cost 0 to each other. A lower end and an upper
    end of different tracks, or same-side ends on headlands that are not
    connected, are ``inf`` apart. Any other pair costs the shortest turn
    over the distance between the track offsets.

    Args:
        d: Decomposition the tracks were generated from
        tracks: All tracks of the field
        connectivity: Headland graph from ``headland_connectivity``
        spec: Machine parameters
        tee_formula: Variant of the reversing-turn length

    Returns:
        The end-to-end cost matrix with the headland component of every end
    """
    ordered = sorted(tracks, key=lambda t: t.id)
    known = {c.id for c in d.cells}
    component_of = headland_components(connectivity)
    components = []
    for track in ordered:
        if track.cell_id not in known:
            raise ValueError(f"track {track.id} belongs to unknown cell {track.cell_id}")
        components.append(component_of[(track.cell_id, Side.LOWER)])
        components.append(component_of[(track.cell_id, Side.UPPER)])

    m = 2 * len(ordered)
    end_costs = np.full((m, m), np.inf)
    for a in range(m):
        for b in range(a, m):
            ta, tb = a // 2, b // 2
            if ta == tb:
                cost = 0.0
            elif a % 2 != b % 2 or components[a] != components[b]:
                cost = np.inf
            else:
                cost = _turn_length(track_distance(ordered[ta], ordered[tb]), spec, tee_formula)
            end_costs[a, b] = end_costs[b, a] = cost
    logger.debug(
        "global graph: %d end nodes, %d finite transitions",
        m,
        int(np.isfinite(end_costs).sum()),
    )
    return GlobalCostMatrix(tuple(t.id for t in ordered), end_costs, tuple(components))


@dataclass(frozen=True, eq=False)
class _Model:
    track_ids: Tuple[int, ...]
    transitions: np.ndarray
    track_of: np.ndarray
    oriented: bool
    sentinel: float

    @property
    def n(self) -> int:
        return len(self.track_ids)

    @property
    def size(self) -> int:
        return self.transitions.shape[0]

    def index(self, track_id: Optional[int]) -> Optional[int]:
        if track_id is None:
            return None
        if track_id not in self.track_ids:
            raise ValueError(f"unknown track {track_id}")
        return self.track_ids.index(track_id)

    def flip(self, node: int) -> int:
        return node ^ 1 if self.oriented else node

    def path_cost(self, path: SequenceT[int]) -> float:
        return float(sum(self.transitions[a, b] for a, b in zip(path, path[1:])))

    def sequence(self, path: SequenceT[int]) -> Sequence:
        order = tuple(self.track_ids[self.track_of[k]] for k in path)
        if not self.oriented:
            return Sequence(order)
        return Sequence(order, tuple(Side.LOWER if k % 2 == 0 else Side.UPPER for k in path))


def _model(costs: Costs) -> _Model:
    if isinstance(costs, GlobalCostMatrix):
        nodes = np.arange(2 * costs.n)
        track_of = nodes // 2
        exit_node = 2 * track_of + (1 - nodes % 2)
        transitions = costs.end_costs[exit_node[:, None], nodes[None, :]].copy()
        oriented = True
    else:
        track_of = np.arange(costs.n)
        transitions = np.array(costs.costs, dtype=float)
        oriented = False
    transitions[track_of[:, None] == track_of[None, :]] = np.inf

    finite = transitions[np.isfinite(transitions)]
    top = float(finite.max()) if finite.size else 0.0
    sentinel = max(costs.n, 1) * (top if top > 0 else 1.0) * 10.0
    transitions = np.where(np.isfinite(transitions), transitions, sentinel)
    return _Model(tuple(costs.track_ids), transitions, track_of, oriented, sentinel)


def _check_constraints(model: _Model, start: Optional[int], end: Optional[int]) -> None:
    if start is not None and start == end and model.n > 1:
        raise InfeasibleSequenceError(f"track {start} cannot be both first and last")


def _start_nodes(model: _Model, s_idx: Optional[int], e_idx: Optional[int]) -> np.ndarray:
    nodes = np.arange(model.size)
    if s_idx is not None:
        return nodes[model.track_of == s_idx]
    if e_idx is not None and model.n > 1:
        return nodes[model.track_of != e_idx]
    return nodes


def _infeasible(model: _Model) -> InfeasibleSequenceError:
    return InfeasibleSequenceError(
        f"every order of the {model.n} tracks needs an impossible transition"
    )


def solve_exact(
    costs: Costs,
    start: Optional[int] = None,
    end: Optional[int] = None,
    threshold: int = DEFAULT_EXACT_THRESHOLD,
) -> Sequence:
    """
    Minimum-cost open path through all tracks by dynamic programming over
    (visited tracks, current node).

    Among cost-equal optima the lexicographically smallest order wins,
    comparing track ids first and entry ends second.

    Args:
        costs: Per-cell or global cost matrix
        start: Optional track that must come first
        end: Optional track that must come last
        threshold: Largest number of tracks accepted

    Returns:
        An optimal sequence

    Raises:
        SolverLimitError: If there are more tracks than ``threshold``
        InfeasibleSequenceError: If every complete order uses an impossible transition
    """
    model = _model(costs)
    n = model.n
    if n > threshold:
        raise SolverLimitError(f"{n} tracks exceed the exact-solver limit of {threshold}")
    _check_constraints(model, start, end)
    if n == 0:
        return Sequence(())
    s_idx, e_idx = model.index(start), model.index(end)
    if n == 1:
        return model.sequence([0])

    m = model.size
    full = (1 << n) - 1
    nodes = np.arange(m)
    bits = np.left_shift(1, model.track_of).astype(np.int64)
    end_nodes = model.track_of == e_idx if e_idx is not None else None

    def continuation(mask: int) -> np.ndarray:
        nxt = mask | bits
        h = cost_to_go[nxt, nodes]
        h[(mask & bits) != 0] = np.inf
        if end_nodes is not None:
            h[end_nodes & (nxt != full)] = np.inf
        return h

    # cost_to_go[mask, k]: cheapest completion from node k once the tracks in mask are driven
    cost_to_go = np.full((full + 1, m), np.inf)
    cost_to_go[full] = 0.0 if end_nodes is None else np.where(end_nodes, 0.0, np.inf)
    for mask in range(full - 1, 0, -1):
        cost_to_go[mask] = (model.transitions + continuation(mask)[None, :]).min(axis=1)

    candidates = _start_nodes(model, s_idx, e_idx)
    values = cost_to_go[bits[candidates], candidates]
    best = float(values.min())
    if not best < model.sentinel:
        raise _infeasible(model)
    tol = 1e-9 * max(1.0, abs(best))

    node = int(candidates[np.flatnonzero(values <= best + tol)[0]])
    path = [node]
    mask = int(bits[node])
    while mask != full:
        total = model.transitions[node] + continuation(mask)
        node = int(np.flatnonzero(total <= cost_to_go[mask, path[-1]] + tol)[0])
        path.append(node)
        mask |= int(bits[node])
    logger.debug("exact solver: %d tracks, %d nodes, cost %.6f", n, m, best)
    return model.sequence(path)


def _nearest_neighbour(model: _Model, first: int, e_idx: Optional[int]) -> List[int]:
    visited = np.zeros(model.n, dtype=bool)
    visited[model.track_of[first]] = True
    path = [first]
    while len(path) < model.n:
        row = model.transitions[path[-1]].copy()
        blocked = visited[model.track_of]
        if e_idx is not None and len(path) < model.n - 1:
            blocked = blocked | (model.track_of == e_idx)
        row[blocked] = np.inf
        node = int(np.argmin(row))
        path.append(node)
        visited[model.track_of[node]] = True
    return path


def _random_path(
    model: _Model, rng: np.random.Generator, s_idx: Optional[int], e_idx: Optional[int]
) -> List[int]:
    order = [int(t) for t in rng.permutation(model.n) if t not in (s_idx, e_idx)]
    if s_idx is not None:
        order.insert(0, s_idx)
    if e_idx is not None:
        order.append(e_idx)
    if not model.oriented:
        return order
    return [2 * t + int(e) for t, e in zip(order, rng.integers(0, 2, size=len(order)))]


def _two_opt(model: _Model, path: List[int], fixed_start: bool, fixed_end: bool) -> List[int]:
    """
    Improve a path with segment reversals until none shortens it.

    A reversed segment of oriented nodes is also driven the other way, so
    single-node reversals flip the track direction. Costs are symmetric,
    so only the two boundary transitions change.
    """
    path = list(path)
    size = len(path)
    cost = model.transitions
    lo = 1 if fixed_start else 0
    hi = size - 2 if fixed_end else size - 1
    improved = True
    while improved:
        improved = False
        for i in range(size):
            for j in range(i, size):
                if i == j and not model.oriented:
                    continue
                if i != j and (i < lo or j > hi):
                    continue
                first, last = path[i], path[j]
                before = after = 0.0
                if i > 0:
                    before += cost[path[i - 1], first]
                    after += cost[path[i - 1], model.flip(last)]
                if j < size - 1:
                    before += cost[last, path[j + 1]]
                    after += cost[model.flip(first), path[j + 1]]
                if before - after > _IMPROVE_TOL:
                    path[i : j + 1] = [model.flip(k) for k in reversed(path[i : j + 1])]
                    improved = True
    return path


def solve_heuristic(
    costs: Costs,
    start: Optional[int] = None,
    end: Optional[int] = None,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> Sequence:
    """
    Nearest-neighbour construction followed by 2-opt improvement.

    Construction runs from every admissible first node (a spread of eight
    on large instances) and from ``restarts`` seeded random orders; each
    result is improved to a 2-opt local optimum and the cheapest kept.

    Raises:
        InfeasibleSequenceError: If the best order found uses an impossible transition
    """
    model = _model(costs)
    _check_constraints(model, start, end)
    if model.n <= 1:
        return solve_exact(costs, start, end)
    s_idx, e_idx = model.index(start), model.index(end)

    firsts = _start_nodes(model, s_idx, e_idx)
    if len(firsts) > 30:
        picks = np.unique(np.linspace(0, len(firsts) - 1, _MAX_NN_STARTS).round().astype(int))
        firsts = firsts[picks]
    fixed_start, fixed_end = s_idx is not None, e_idx is not None
    found = [
        _two_opt(model, _nearest_neighbour(model, int(k), e_idx), fixed_start, fixed_end)
        for k in firsts
    ]
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        found.append(
            _two_opt(model, _random_path(model, rng, s_idx, e_idx), fixed_start, fixed_end)
        )

    best = min(found, key=lambda p: (model.path_cost(p), p))
    cost = model.path_cost(best)
    if not cost < model.sentinel:
        raise _infeasible(model)
    logger.debug(
        "heuristic solver: %d tracks, %d candidates, cost %.6f", model.n, len(found), cost
    )
    return model.sequence(best)


def solve(
    costs: Costs,
    start: Optional[int] = None,
    end: Optional[int] = None,
    exact_threshold: int = DEFAULT_EXACT_THRESHOLD,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> Sequence:
    """Exact solver up to ``exact_threshold`` tracks, heuristic above."""
    if costs.n <= exact_threshold:
        return solve_exact(costs, start, end, threshold=exact_threshold)
    logger.info("%d tracks exceed the exact threshold, using 2-opt heuristic", costs.n)
    return solve_heuristic(costs, start, end, restarts=restarts, seed=seed)


def zigzag_sequence(
    costs: CostMatrix, start: Optional[int] = None, end: Optional[int] = None
) -> Sequence:
    """
    Classical back-and-forth order: tracks by increasing id (and so by
    offset within a cell), swept from the side nearer the entry track.

    The sweep never starts mid-cell, so ``start`` and ``end`` only pick the
    direction: decreasing ids when ``start`` lies past the middle of the
    cell, or failing that when ``end`` lies before it. Ties keep the
    increasing order.
    """
    order = sorted(costs.track_ids)
    last = len(order) - 1
    if start is not None and start in order:
        backwards = 2 * order.index(start) > last
    elif end is not None and end in order:
        backwards = 2 * order.index(end) < last
    else:
        backwards = False
    if backwards:
        order.reverse()
    return Sequence(tuple(order))


def sequence_cost(seq: Sequence, costs: Costs) -> float:
    """
    Sum of the transition costs along a sequence.

    Raises:
        InfeasibleSequenceError: If a transition is impossible
        ValueError: If the sequence does not match the matrix
    """
    if sorted(seq.order) != sorted(costs.track_ids):
        raise ValueError("sequence must visit every track of the matrix exactly once")
    total = 0.0
    for position, (a, b) in enumerate(zip(seq.order, seq.order[1:])):
        if isinstance(costs, GlobalCostMatrix):
            if seq.entry_ends is None:
                raise ValueError("global sequences need entry ends")
            step = costs.cost(a, seq.exit_end(position), b, seq.entry_ends[position + 1])
        else:
            step = costs.cost(a, b)
        if not np.isfinite(step):
            raise InfeasibleSequenceError(f"transition from track {a} to track {b} is impossible")
        total += step
    return total

import math

import pytest
from shapely.geometry import LineString

from fieldcover.config.schema import PlannerConfig
from fieldcover.core.decomposition import Side
from fieldcover.core.errors import DecompositionError, InfeasibleSequenceError
from fieldcover.core.planner import (
    CoveragePlanner,
    LegKind,
    PlanMode,
    compare,
    plan_global,
    plan_traditional,
)
from fieldcover.core.tracks import MachineSpec
from fieldcover.core.turns import omega_length

OPTIMAL_SINGLE = 1.0 + 3 * math.pi


def _assert_complete(plan, planner):
    """Every track driven once, legs alternating and joined end to end."""
    assert sorted(leg.track_id for leg in plan.track_legs) == [t.id for t in planner.tracks]
    assert [leg.track_id for leg in plan.track_legs] == list(plan.order)
    kinds = [leg.kind for leg in plan.legs]
    assert kinds[::2] == [LegKind.TRACK] * len(plan.track_legs)
    assert all(kind is LegKind.TRANSIT for kind in kinds[1::2])
    for a, b in zip(plan.legs, plan.legs[1:]):
        assert a.end.distance(b.start) <= 1e-9


def _assert_in_free_space(plan, free):
    covered = free.shape.buffer(1e-6)
    for leg in plan.legs:
        assert covered.covers(LineString([p.xy for p in leg.points]))


def test_single_cell_plans_match(single_free, sweep_x, unit_machine):
    """Test that one cell gives the same optimal plan in both modes."""
    planner = CoveragePlanner(single_free, unit_machine, sweep_x)
    traditional = planner.plan_traditional()
    global_plan = planner.plan_global()

    for plan in (traditional, global_plan):
        assert plan.order == (1, 3, 0, 2)
        assert plan.metrics.nonproductive_m == pytest.approx(OPTIMAL_SINGLE)
        assert plan.metrics.turn_counts["pi"] == 3
        assert plan.metrics.turn_counts["omega"] == 0
        assert plan.metrics.cells_visited == (0,)
        _assert_complete(plan, planner)
    assert traditional.mode is PlanMode.TRADITIONAL
    assert global_plan.mode is PlanMode.GLOBAL
    assert global_plan.solver == "exact"


def test_default_margin_shortens_tracks(single_free, sweep_x, unit_machine):
    """Test that working segments lose 2 r_min at each end."""
    planner = CoveragePlanner(single_free, unit_machine, sweep_x)
    plan = planner.plan_traditional()

    assert planner.margin == pytest.approx(2.0)
    assert all(leg.length == pytest.approx(6.0) for leg in plan.track_legs)
    assert plan.metrics.productive_m == pytest.approx(24.0)
    first = plan.track_legs[0]
    assert first.entry_end is Side.LOWER
    assert first.start.y == pytest.approx(2.0)
    assert first.end.y == pytest.approx(8.0)


def test_zero_margin_drives_full_tracks(single_free, sweep_x, unit_machine):
    plan = plan_global(single_free, unit_machine, sweep_x, PlannerConfig(headland_margin=0.0))

    assert plan.metrics.productive_m == pytest.approx(40.0)
    assert plan.metrics.total_m == pytest.approx(40.0 + OPTIMAL_SINGLE)


def test_zigzag_comparison(single_free, sweep_x, unit_machine):
    """Test the savings of the optimal order over back-and-forth driving."""
    comparison = compare(
        single_free, unit_machine, sweep_x, PlannerConfig(per_cell_order="zigzag")
    )

    assert comparison.traditional.order == (0, 1, 2, 3)
    assert comparison.traditional.solver == "zigzag"
    assert comparison.traditional.metrics.nonproductive_m == pytest.approx(
        3 * omega_length(1.0, 1.0)
    )
    assert comparison.traditional.metrics.turn_counts["omega"] == 3
    assert comparison.savings_ratio == pytest.approx(0.424, abs=1e-3)


def test_single_cell_comparison_has_no_savings(single_free, sweep_x, unit_machine):
    comparison = compare(single_free, unit_machine, sweep_x)
    assert comparison.savings_ratio == pytest.approx(0.0, abs=1e-12)


def test_diamond_traditional_plan(diamond_free, sweep_x, unit_machine):
    planner = CoveragePlanner(diamond_free, unit_machine, sweep_x)
    plan = planner.plan_traditional()

    _assert_complete(plan, planner)
    _assert_in_free_space(plan, diamond_free)
    assert plan.metrics.cells_visited == (0, 1, 3, 2)
    cells = [planner.tracks[t].cell_id for t in plan.order]
    assert cells == sorted(cells, key=[0, 1, 3, 2].index)


def test_diamond_global_plan_beats_traditional(diamond_free, sweep_x, unit_machine):
    """Test that sequencing the whole field saves headland travel."""
    planner = CoveragePlanner(diamond_free, unit_machine, sweep_x)
    comparison = planner.compare()
    global_plan = comparison.global_plan

    _assert_complete(global_plan, planner)
    _assert_in_free_space(global_plan, diamond_free)
    assert global_plan.metrics.nonproductive_m < comparison.traditional.metrics.nonproductive_m
    assert comparison.savings_ratio > 0
    assert global_plan.metrics.turn_counts["transfer"] == 0
    assert global_plan.metrics.productive_m == pytest.approx(
        comparison.traditional.metrics.productive_m
    )


def test_global_plan_turns_on_shared_headlands(diamond_free, sweep_x, unit_machine):
    """Test that a turn below the obstacle leads to another track below it."""
    planner = CoveragePlanner(diamond_free, unit_machine, sweep_x)
    plan = planner.plan_global()
    cell_of = {t.id: t.cell_id for t in planner.tracks}

    track_legs = plan.track_legs
    for a, b in zip(track_legs, track_legs[1:]):
        if cell_of[a.track_id] == 1 and a.entry_end is Side.LOWER:
            assert cell_of[b.track_id] == 1
            assert b.entry_end is Side.UPPER


def test_global_plan_uses_heuristic_above_threshold(single_free, sweep_x, unit_machine):
    planner = CoveragePlanner(single_free, unit_machine, sweep_x, PlannerConfig(exact_threshold=2))
    plan = planner.plan_global()

    assert plan.solver == "heuristic"
    assert plan.metrics.nonproductive_m == pytest.approx(OPTIMAL_SINGLE)
    _assert_complete(plan, planner)


def test_enclosed_cell_is_infeasible(isolated_free, sweep_x, unit_machine):
    """Test that the error names the headlands no other cell reaches."""
    planner = CoveragePlanner(isolated_free, unit_machine, sweep_x)

    with pytest.raises(InfeasibleSequenceError) as excinfo:
        planner.plan_global()
    assert excinfo.value.isolated == ("cell 2 lower", "cell 2 upper")
    assert "cell 2 lower" in str(excinfo.value)


def test_enclosed_cell_traditional_plan(isolated_free, sweep_x, unit_machine):
    planner = CoveragePlanner(isolated_free, unit_machine, sweep_x)
    plan = planner.plan_traditional()

    _assert_complete(plan, planner)
    _assert_in_free_space(plan, isolated_free)
    assert plan.metrics.turn_counts["transfer"] > 0
    assert set(plan.metrics.cells_visited) == {0, 1, 2, 3, 4}


def test_start_cell_must_exist(single_free, sweep_x, unit_machine):
    with pytest.raises(DecompositionError):
        plan_traditional(single_free, unit_machine, sweep_x, PlannerConfig(start_cell=3))


def test_isolated_headlands_lists_one_sided_dead_ends(diamond_free, sweep_x, unit_machine):
    planner = CoveragePlanner(diamond_free, unit_machine, sweep_x)
    assert planner.isolated_headlands() == ["cell 1 upper", "cell 2 lower"]


def test_working_end_is_capped_at_quarter_track(single_free, sweep_x, unit_machine):
    planner = CoveragePlanner(single_free, unit_machine, sweep_x, PlannerConfig(headland_margin=5.0))
    track = planner.tracks[0]

    assert planner.working_end(track, Side.LOWER).y == pytest.approx(2.5)
    assert planner.working_end(track, Side.UPPER).y == pytest.approx(7.5)


@pytest.mark.parametrize(
    "field_name, width",
    [
        ("single_free", 1.0),
        ("diamond_free", 1.0),
        ("u_free", 1.0),
        ("two_diamond_free", 2.0),
    ],
)
def test_global_plan_never_worse_than_traditional(request, sweep_x, field_name, width):
    """Test that with exact solvers the global plan drives no more headland distance."""
    free = request.getfixturevalue(field_name)
    spec = MachineSpec(operating_width=width, r_min=1.0, reverse_capable=False)
    planner = CoveragePlanner(free, spec, sweep_x)
    comparison = planner.compare()

    assert len(planner.tracks) <= planner.config.exact_threshold
    assert comparison.global_plan.solver == "exact"
    assert "heuristic" not in comparison.traditional.solver
    for plan in (comparison.traditional, comparison.global_plan):
        _assert_complete(plan, planner)
        _assert_in_free_space(plan, free)
    assert (
        comparison.global_plan.metrics.nonproductive_m
        <= comparison.traditional.metrics.nonproductive_m + 1e-9
    )
    assert comparison.savings_ratio >= -1e-12

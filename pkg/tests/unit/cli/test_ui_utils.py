import logging

import pytest
from rich.console import Console
from rich.logging import RichHandler

from fieldcover.cli import ui_utils
from fieldcover.config.schema import PlannerConfig
from fieldcover.core.planner import CoveragePlanner


@pytest.fixture
def recorded(monkeypatch):
    """Replace the module consoles with recording ones."""
    out = Console(record=True, width=200)
    err = Console(record=True, width=200)
    monkeypatch.setattr(ui_utils, "console", out)
    monkeypatch.setattr(ui_utils, "error_console", err)
    return out, err


def test_theme_color_fallback():
    assert ui_utils.theme_color("error") == "red"
    assert ui_utils.theme_color("nope") == "white"


def test_print_error_goes_to_stderr_console(recorded):
    out, err = recorded
    ui_utils.print_error("bad ring")

    assert "Error: bad ring" in err.export_text()
    assert out.export_text() == ""


def test_display_decomposition(recorded, diamond_free, sweep_x, unit_machine):
    out, _ = recorded
    planner = CoveragePlanner(diamond_free, unit_machine, sweep_x)
    ui_utils.display_decomposition(planner.decomposition, {0: 3, 1: 4, 2: 4, 3: 3})
    text = out.export_text()

    assert "4 cells" in text
    assert "Tracks" in text
    assert "0.000 .. 3.000" in text


def test_display_comparison(recorded, single_free, sweep_x, unit_machine):
    out, _ = recorded
    planner = CoveragePlanner(
        single_free, unit_machine, sweep_x, PlannerConfig(per_cell_order="zigzag")
    )
    ui_utils.display_comparison(planner.compare())
    text = out.export_text()

    assert "traditional" in text
    assert "global" in text
    assert "Savings ratio:" in text
    assert "zigzag" in text


def test_setup_logging_installs_one_rich_handler():
    ui_utils.setup_logging("info")
    ui_utils.setup_logging("warning", verbose=True)
    logger = logging.getLogger("fieldcover")

    assert len(logger.handlers) == 1
    assert isinstance(logger.handlers[0], RichHandler)
    assert logger.level == logging.DEBUG
    logger.handlers.clear()

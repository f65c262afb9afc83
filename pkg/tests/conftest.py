import os
import tempfile
from pathlib import Path

import pytest
from click.testing import CliRunner

from fieldcover.core.decomposition import SweepFrame
from fieldcover.core.geometry import FreeSpace, Polygon
from fieldcover.core.tracks import MachineSpec

FIELDS_DIR = Path(__file__).parent.parent / "fields"


def rect(x0, y0, x1, y1):
    return Polygon.from_coords([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


def diamond(cx, cy, r):
    return Polygon.from_coords([(cx, cy - r), (cx + r, cy), (cx, cy + r), (cx - r, cy)])


@pytest.fixture
def cli_runner():
    """Fixture for testing CLI commands."""
    return CliRunner()


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        old_cwd = os.getcwd()
        os.chdir(tmpdir)
        yield Path(tmpdir)
        os.chdir(old_cwd)


@pytest.fixture
def fields_dir():
    """Directory of the bundled demo fields."""
    return FIELDS_DIR


@pytest.fixture
def sweep_x():
    """Tracks along +y, slices advancing along +x."""
    return SweepFrame.from_degrees(90)


@pytest.fixture
def unit_machine():
    """One meter implement with a one meter turning radius."""
    return MachineSpec(operating_width=1.0, r_min=1.0, reverse_capable=False)


@pytest.fixture
def square_free():
    return FreeSpace(rect(0, 0, 10, 10))


@pytest.fixture
def single_free():
    """4 x 10 m field covered by four one-meter tracks."""
    return FreeSpace(rect(0, 0, 4, 10))


@pytest.fixture
def diamond_free():
    return FreeSpace(rect(0, 0, 10, 10), (diamond(5, 5, 2),))


@pytest.fixture
def two_diamond_free():
    return FreeSpace(rect(0, 0, 16, 10), (diamond(5, 5, 2), diamond(11, 5, 2)))


@pytest.fixture
def u_free():
    return FreeSpace(
        Polygon.from_coords(
            [(0, 0), (10, 0), (10, 10), (6, 10), (6, 4), (4, 4), (4, 10), (0, 10)]
        )
    )


@pytest.fixture
def isolated_free():
    """Stacked obstacles enclosing a middle cell."""
    return FreeSpace(rect(0, 0, 10, 10), (rect(4, 2, 6, 4), rect(4, 6, 6, 8)))

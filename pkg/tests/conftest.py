import pytest

from primewalk.grid import VisitGrid
from primewalk.models import PrngSpec, WalkSnapshot
from primewalk.walk import Walker


@pytest.fixture
def trace_cells():
    """Dwell grid of the Prime Walk up to N = 13, traced by hand"""
    return {(0, 0): 2, (0, -1): 4, (-1, -1): 5, (-1, 0): 2}


@pytest.fixture
def trace_walker():
    """Prime Walk to N = 13 with arrival counting"""
    walker = Walker(arrivals=True)
    walker.run(13, cadence=1)
    return walker


@pytest.fixture
def prng():
    return PrngSpec(seed=42)


@pytest.fixture
def square_grid():
    """Create a function that returns a fully visited k x k grid"""

    def create_square(k, z=1):
        return VisitGrid({(x, y): z for x in range(k) for y in range(k)})

    return create_square


@pytest.fixture
def snapshot():
    """Create a function that returns a consistent WalkSnapshot with a 1 x area bbox"""

    def create_snapshot(n, area, z_max=1, pi_n=0):
        return WalkSnapshot(
            n=n,
            x=0,
            y=0,
            area=area,
            z_max=z_max,
            bbox_min_x=0,
            bbox_max_x=area - 1,
            bbox_min_y=0,
            bbox_max_y=0,
            interior_unvisited=0,
            pi_n=pi_n,
        )

    return create_snapshot

import io
import math

import numpy as np
import pytest

from primewalk.exceptions import ConfigurationError, EmptyInputError, SchemaError
from primewalk.grid import VisitGrid
from primewalk.raster import grid_to_array, read_pgm, write_pgm


def test_single_cell():
    image = grid_to_array(VisitGrid({(0, 0): 3}))
    assert image.shape == (1, 1)
    assert image[0, 0] == 255


def test_trace_grid_binary(trace_walker):
    image = grid_to_array(trace_walker.grid, "binary")
    assert image.shape == (2, 2)
    assert (image == 255).all()


def test_orientation_and_scalings():
    grid = VisitGrid({(0, 0): 1, (2, 1): 4, (0, 1): 9})
    binary = grid_to_array(grid, "binary")
    # Row 0 is y = 1, column 0 is x = 0
    assert binary.tolist() == [[255, 0, 255], [255, 0, 0]]

    linear = grid_to_array(grid, "linear")
    assert linear.tolist() == [[255, 0, 255 * 4 // 9], [255 // 9, 0, 0]]

    log = grid_to_array(grid, "log")
    four = math.floor(255 * math.log(5) / math.log(10))
    one = math.floor(255 * math.log(2) / math.log(10))
    assert log.tolist() == [[255, 0, four], [one, 0, 0]]
    assert log.dtype == np.uint8


def test_order_scaling_follows_first_visits(trace_walker):
    grid = VisitGrid({(0, 0): 1, (2, 1): 4, (0, 1): 9})
    assert grid_to_array(grid, "order").tolist() == [[255, 0, 128], [1, 0, 0]]
    assert grid_to_array(VisitGrid({(0, 0): 3}), "order").tolist() == [[1]]

    # (0, 0) then (0, -1), (-1, -1), (-1, 0)
    image = grid_to_array(trace_walker.grid, "order")
    assert image.tolist() == [[255, 1], [170, 85]]


def test_empty_grid():
    with pytest.raises(EmptyInputError):
        grid_to_array(VisitGrid())


def test_unknown_scaling():
    with pytest.raises(ConfigurationError):
        grid_to_array(VisitGrid({(0, 0): 1}), "sqrt")


@pytest.mark.parametrize("plain", (False, True))
def test_pgm_files(tmp_path, plain):
    grid = VisitGrid({(x, x % 3): x + 1 for x in range(-5, 7)})
    image = grid_to_array(grid, "linear")
    path = tmp_path / "grid.pgm"
    write_pgm(path, image, plain=plain, comment="test")

    data = path.read_bytes()
    assert data.startswith(b"P2\n" if plain else b"P5\n")
    assert b"# row 0 is max_y, column 0 is min_x\n# test\n12 3\n255\n" in data
    np.testing.assert_array_equal(read_pgm(path), image)


def test_write_pgm_to_stream():
    stream = io.BytesIO()
    write_pgm(stream, np.array([[0, 255]], dtype=np.uint8), plain=True)
    assert stream.getvalue().endswith(b"1\n255\n0 255\n")


def test_read_pgm_rejects_other_formats(tmp_path):
    path = tmp_path / "image.ppm"
    path.write_bytes(b"P6\n1 1\n255\n\x00\x00\x00")
    with pytest.raises(SchemaError):
        read_pgm(path)
